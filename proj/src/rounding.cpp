#include "thinbend/rounding.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>

#include "thinbend/density.hpp"

namespace thinbend {

namespace {

constexpr double kPi = std::numbers::pi;

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

// Unconstrained coordinates: logit delta1, ln delta2, ln gamma.
Vec3 to_free(double d1, double d2, double g) {
  return {std::log(d1 / (1.0 - d1)), std::log(d2), std::log(g)};
}

std::array<double, 3> from_free(const Vec3& x) {
  return {1.0 / (1.0 + std::exp(-x[0])), std::exp(x[1]), std::exp(x[2])};
}

struct System {
  const BendGeometry& g;
  RoundingTarget target;

  Vec3 operator()(const Vec3& x) const {
    const auto p = from_free(x);
    const auto r = rounding_residuals(g, target, p[0], p[1], p[2]);
    return {r[0], r[1], r[2]};
  }
};

Mat3 jacobian(const System& F, const Vec3& x) {
  Mat3 J;
  for (int i = 0; i < 3; ++i) {
    const double h = 1e-6 * std::max(1.0, std::abs(x[i]));
    Vec3 xp = x, xm = x;
    xp[i] += h;
    xm[i] -= h;
    J.col(i) = (F(xp) - F(xm)) / (2.0 * h);
  }
  return J;
}

bool finite(const Vec3& v) { return v.allFinite(); }

RoundingSolution finish(const BendGeometry& g, double rho, const Vec3& x, const Vec3& r,
                        RoundingStatus status, int iterations, double tol) {
  RoundingSolution s;
  s.rho = rho;
  const auto p = from_free(x);
  s.delta1 = p[0];
  s.delta2 = p[1];
  s.gamma = p[2];
  s.residuals = {r[0], r[1], r[2]};
  s.residual_norm = r.norm();
  s.iterations = iterations;
  s.status = status;
  s.feasible = status == RoundingStatus::Converged && s.residual_norm < tol && s.delta1 > 0.0 &&
               s.delta1 < 1.0 && s.delta2 > 0.0 && s.gamma > 0.0;
  try {
    const RoundedMapConstants rc = rounded_constants(g, s.delta1, s.delta2, s.gamma);
    s.j_corner = density_from_preimage(1.0, rc, g.J).j;
  } catch (const std::exception&) {
    s.j_corner = std::numeric_limits<double>::quiet_NaN();
    s.feasible = false;
  }
  if (!std::isfinite(s.j_corner)) s.feasible = false;
  return s;
}

}  // namespace

const char* to_string(RoundingStatus status) {
  switch (status) {
    case RoundingStatus::Converged: return "converged";
    case RoundingStatus::NotConverged: return "not_converged";
    case RoundingStatus::DomainExit: return "domain_exit";
    case RoundingStatus::SingularJacobian: return "singular_jacobian";
  }
  return "unknown";
}

RoundingTarget e_prime_target(const BendGeometry& g, double rho) {
  if (!(rho > 0.0) || !std::isfinite(rho)) throw GeometryError("rounding radius must be positive");
  const double half = 0.5 * g.alpha.radians();
  RoundingTarget t;
  t.rho = rho;
  t.dx = rho * (1.0 - std::sin(half));
  t.dy = t.dx / std::tan(half);
  const CornerGeometry cg = corners(g);
  t.x_target = cg.E.real() + t.dx;
  t.y_target = cg.E.imag() - t.dy;
  return t;
}

std::array<double, 3> rounding_residuals(const BendGeometry& g, const RoundingTarget& t,
                                         double d1, double d2, double gamma) {
  const RoundedMapConstants rc = rounded_constants(g, d1, d2, gamma);
  const cplx e = rounded_forward(1.0, rc);
  const cplx G = rounded_forward(cplx(1.0 - d1, 0.0), rc);
  const cplx H = rounded_forward(cplx(1.0 + d2, 0.0), rc);
  const double k = g.k;
  return {(e.real() - t.x_target) / k, (e.imag() - t.y_target) / k,
          (std::norm(e - G) - std::norm(e - H)) / (k * k)};
}

std::array<double, 3> rounding_seed(const BendGeometry& g, double rho) {
  const MapConstants c = compute_constants(g);
  const double p = g.alpha.exponent();
  const double scale = std::abs(c.C) * std::pow(1.0 + c.a, -p);
  double d = std::pow(rho / scale, 1.0 / (1.0 + p));
  d = std::min(d, 0.5);
  const RoundingTarget t = e_prime_target(g, rho);
  const double gamma = 1.0;
  // Two-parameter Newton for the placement equations at fixed gamma.
  Eigen::Vector2d x(std::log(d / (1.0 - d)), std::log(d));
  auto F = [&](const Eigen::Vector2d& y) {
    const double d1 = 1.0 / (1.0 + std::exp(-y[0]));
    const double d2 = std::exp(y[1]);
    const auto r = rounding_residuals(g, t, d1, d2, gamma);
    return Eigen::Vector2d(r[0], r[1]);
  };
  try {
    Eigen::Vector2d r = F(x);
    for (int it = 0; it < 40 && r.norm() > 1e-14 * std::max(1.0, rho); ++it) {
      Eigen::Matrix2d J;
      for (int i = 0; i < 2; ++i) {
        Eigen::Vector2d xp = x, xm = x;
        xp[i] += 1e-6;
        xm[i] -= 1e-6;
        J.col(i) = (F(xp) - F(xm)) / 2e-6;
      }
      const Eigen::Vector2d step = J.fullPivLu().solve(-r);
      if (!step.allFinite()) break;
      double lambda = 1.0;
      bool ok = false;
      for (int ls = 0; ls < 30; ++ls) {
        const Eigen::Vector2d xt = x + lambda * step;
        if (std::abs(xt[0]) > 30 || std::abs(xt[1]) > 30) {
          lambda *= 0.5;
          continue;
        }
        const Eigen::Vector2d rt = F(xt);
        if (rt.allFinite() && rt.norm() < r.norm()) {
          x = xt;
          r = rt;
          ok = true;
          break;
        }
        lambda *= 0.5;
      }
      if (!ok) break;
    }
  } catch (const std::exception&) {
    x = Eigen::Vector2d(std::log(d / (1.0 - d)), std::log(d));
  }
  return {1.0 / (1.0 + std::exp(-x[0])), std::exp(x[1]), gamma};
}

RoundingSolution solve_rounding(const BendGeometry& geometry, double rho, const RoundingOptions& opt) {
  const NormalizedGeometry ng = validate(geometry);
  const BendGeometry& g = ng.geometry;
  const System F{g, e_prime_target(g, rho)};
  const auto s0 = opt.seed ? *opt.seed : rounding_seed(g, rho);
  Vec3 x = to_free(std::clamp(s0[0], 1e-12, 1.0 - 1e-12), std::max(s0[1], 1e-12),
                   std::max(s0[2], 1e-12));
  Vec3 r = F(x);
  if (!finite(r)) return finish(g, rho, x, r, RoundingStatus::NotConverged, 0, opt.tolerance);

  // Levenberg-Marquardt with Marquardt scaling. Trial points are clipped to
  // the box |x_i| <= domain_bound; an accepted point on the box boundary
  // means a parameter is heading for the edge of its open domain.
  const double bound = opt.domain_bound;
  double lambda = 1e-3;
  RoundingStatus status = RoundingStatus::NotConverged;
  int it = 0;
  for (; it < opt.max_iterations; ++it) {
    if (r.norm() < 1e-2 * opt.tolerance) {
      status = RoundingStatus::Converged;
      break;
    }
    const Mat3 J = jacobian(F, x);
    if (!J.allFinite()) break;
    Eigen::JacobiSVD<Mat3> svd(J);
    const Vec3 sv = svd.singularValues();
    if (sv[0] == 0.0 || sv[2] < 1e-14 * sv[0]) {
      status = RoundingStatus::SingularJacobian;
      break;
    }
    const Mat3 JtJ = J.transpose() * J;
    const Vec3 grad = J.transpose() * r;
    const double before = r.norm();
    bool accepted = false;
    for (int inner = 0; inner < 12 && !accepted; ++inner) {
      Mat3 A = JtJ;
      for (int i = 0; i < 3; ++i) A(i, i) += lambda * std::max(JtJ(i, i), 1e-18);
      const Vec3 step = A.ldlt().solve(-grad);
      if (!finite(step)) {
        lambda *= 4.0;
        continue;
      }
      const Vec3 xt = (x + step).cwiseMax(-bound).cwiseMin(bound);
      Vec3 rt;
      try {
        rt = F(xt);
      } catch (const std::exception&) {
        lambda *= 4.0;
        continue;
      }
      if (finite(rt) && rt.norm() < before) {
        x = xt;
        r = rt;
        lambda = std::max(lambda / 3.0, 1e-12);
        accepted = true;
      } else {
        lambda *= 4.0;
      }
    }
    if (!accepted) break;
    if (x.cwiseAbs().maxCoeff() >= bound) {
      ++it;
      status = RoundingStatus::DomainExit;
      break;
    }
    // Below tolerance and no longer making real progress: done.
    if (r.norm() < opt.tolerance && r.norm() > 0.99 * before) {
      ++it;
      status = RoundingStatus::Converged;
      break;
    }
  }
  if ((status == RoundingStatus::NotConverged || status == RoundingStatus::SingularJacobian) &&
      r.norm() < opt.tolerance) {
    status = RoundingStatus::Converged;
  }
  return finish(g, rho, x, r, status, it, opt.tolerance);
}

SweepResult sweep(const BendGeometry& geometry, double rho_min, double rho_max, int n,
                  const RoundingOptions& options) {
  if (!(rho_min > 0.0) || !(rho_max > rho_min)) throw GeometryError("sweep needs 0 < rho_min < rho_max");
  if (n < 2) throw GeometryError("sweep needs at least 2 radii");
  const BendGeometry g = validate(geometry).geometry;
  const double p = g.alpha.exponent();
  SweepResult out;
  std::optional<RoundingSolution> prev;
  for (int i = 0; i < n; ++i) {
    const double rho = rho_min + (rho_max - rho_min) * i / (n - 1);
    RoundingOptions opt = options;
    if (prev) {
      // delta ~ rho^(1/(1+p)) in the small-rounding limit.
      const double f = std::pow(rho / prev->rho, 1.0 / (1.0 + p));
      opt.seed = std::array<double, 3>{std::min(prev->delta1 * f, 0.999), prev->delta2 * f, prev->gamma};
    }
    RoundingSolution s = solve_rounding(g, rho, opt);
    if (!s.feasible && prev) {
      // Retry from the cold seed before declaring the edge.
      RoundingOptions cold = options;
      cold.seed.reset();
      RoundingSolution s2 = solve_rounding(g, rho, cold);
      if (s2.feasible || s2.residual_norm < s.residual_norm) s = s2;
    }
    if (!s.feasible) {
      out.first_infeasible = s;
      break;
    }
    out.solutions.push_back(s);
    prev = s;
  }
  return out;
}

MaxRadiusResult max_radius(const BendGeometry& geometry, double tol, const RoundingOptions& options) {
  const BendGeometry g = validate(geometry).geometry;
  const double p = g.alpha.exponent();
  MaxRadiusResult out;
  auto solve_from = [&](double rho, const std::optional<RoundingSolution>& from) {
    RoundingOptions opt = options;
    if (from) {
      const double f = std::pow(rho / from->rho, 1.0 / (1.0 + p));
      opt.seed = std::array<double, 3>{std::min(from->delta1 * f, 0.999), from->delta2 * f, from->gamma};
    }
    RoundingSolution s = solve_rounding(g, rho, opt);
    ++out.solves;
    if (!s.feasible && from) {
      RoundingOptions cold = options;
      cold.seed.reset();
      RoundingSolution s2 = solve_rounding(g, rho, cold);
      ++out.solves;
      if (s2.feasible) s = s2;
    }
    return s;
  };

  double lo = 1e-6 * g.k;
  std::optional<RoundingSolution> good;
  RoundingSolution first = solve_from(lo, std::nullopt);
  if (!first.feasible) {
    out.rho_max = 0.0;
    out.first_infeasible = first;
    return out;
  }
  good = first;
  double hi = 0.0;
  const double cap = 4.0 * std::max(g.h, g.k);
  for (double rho = 2.0 * lo; rho <= cap; rho *= 2.0) {
    RoundingSolution s = solve_from(rho, good);
    if (!s.feasible) {
      hi = rho;
      out.first_infeasible = s;
      break;
    }
    good = s;
    lo = rho;
  }
  if (hi == 0.0) {
    out.rho_max = lo;
    out.last_feasible = *good;
    return out;
  }
  while ((hi - lo) > tol * lo) {
    const double mid = 0.5 * (lo + hi);
    RoundingSolution s = solve_from(mid, good);
    if (s.feasible) {
      lo = mid;
      good = s;
    } else {
      hi = mid;
      out.first_infeasible = s;
    }
  }
  out.rho_max = lo;
  out.last_feasible = *good;
  return out;
}

ArcFit fit_rounded_arc(const RoundedMapConstants& rc, int samples) {
  if (samples < 3) throw std::invalid_argument("arc fit needs at least 3 samples");
  const double lo = 1.0 - rc.delta1;
  const double hi = 1.0 + rc.delta2;
  std::vector<cplx> pts(samples);
  for (int i = 0; i < samples; ++i) {
    pts[i] = rounded_forward(cplx(lo + (hi - lo) * i / (samples - 1), 0.0), rc);
  }
  // Algebraic fit x^2 + y^2 + D x + E y + F = 0, centred on the first sample
  // for conditioning.
  const cplx o = pts[0];
  Eigen::MatrixXd A(samples, 3);
  Eigen::VectorXd b(samples);
  for (int i = 0; i < samples; ++i) {
    const cplx z = pts[i] - o;
    A(i, 0) = z.real();
    A(i, 1) = z.imag();
    A(i, 2) = 1.0;
    b(i) = -std::norm(z);
  }
  const Eigen::Vector3d c = A.colPivHouseholderQr().solve(b);
  ArcFit fit;
  fit.center = o + cplx(-0.5 * c[0], -0.5 * c[1]);
  fit.radius = std::sqrt(std::max(0.0, 0.25 * (c[0] * c[0] + c[1] * c[1]) - c[2]));
  for (const cplx& z : pts) {
    fit.max_deviation = std::max(fit.max_deviation, std::abs(std::abs(z - fit.center) - fit.radius));
  }
  return fit;
}

}  // namespace thinbend
