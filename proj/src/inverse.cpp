#include "thinbend/inverse.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace thinbend {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kMaxRealZeta = 690.0;

cplx clamp_zeta(cplx zeta) {
  return {std::clamp(zeta.real(), -kMaxRealZeta, kMaxRealZeta), std::clamp(zeta.imag(), 0.0, kPi)};
}

double dot(cplx a, cplx b) { return a.real() * b.real() + a.imag() * b.imag(); }

// Distance from p to the segment [a, b].
double segment_distance(cplx p, cplx a, cplx b) {
  const cplx ab = b - a;
  const double len2 = std::norm(ab);
  double t = len2 > 0.0 ? dot(p - a, ab) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return std::abs(p - (a + t * ab));
}

// Winding-number point-in-polygon test for a closed polyline.
bool inside_polygon(cplx p, const std::vector<cplx>& poly) {
  int wn = 0;
  const std::size_t n = poly.size();
  for (std::size_t i = 0; i < n; ++i) {
    const cplx a = poly[i], b = poly[(i + 1) % n];
    const double cross = (b.real() - a.real()) * (p.imag() - a.imag()) -
                         (p.real() - a.real()) * (b.imag() - a.imag());
    if (a.imag() <= p.imag()) {
      if (b.imag() > p.imag() && cross > 0) ++wn;
    } else if (b.imag() <= p.imag() && cross < 0) {
      --wn;
    }
  }
  return wn != 0;
}

}  // namespace

const char* to_string(Region region) {
  switch (region) {
    case Region::Inside: return "inside";
    case Region::Boundary: return "boundary";
    case Region::Outside: return "outside";
  }
  return "unknown";
}

InverseSolver::InverseSolver(std::shared_ptr<const ConformalMap> map, int grid_radii,
                             int grid_angles)
    : map_(std::move(map)), g_(map_->geometry()), corners_(corners(g_)) {
  if (grid_radii < 2 || grid_angles < 2) throw std::invalid_argument("seed grid needs >= 2 x 2 nodes");
  const double p = g_.alpha.exponent();
  const double beta = g_.alpha.beta();
  inner_corner_ = map_->position(1.0);

  // Far-field laws in zeta = ln z1.
  const double z_lo = 1e-12, z_hi = 1e12;
  low_slope_ = map_->log_derivative(cplx(0.0, z_lo));
  low_offset_ = map_->position(cplx(0.0, z_lo)) - low_slope_ * cplx(std::log(z_lo), kPi / 2);
  high_slope_ = map_->log_derivative(cplx(0.0, z_hi));
  high_offset_ = map_->position(cplx(0.0, z_hi)) - high_slope_ * cplx(std::log(z_hi), kPi / 2);

  // Local corner laws from one sample each.
  const double eps = 1e-7;
  const cplx we = cplx(0.0, eps);
  e_coeff_ = (map_->position(1.0 + we) - inner_corner_) / std::pow(we, 1.0 + p);
  const double xb = map_->outer_prevertex();
  b_coeff_ = map_->position(xb + we) / std::pow(we, beta);

  // Log-polar seed grid.
  grid_.reserve(static_cast<std::size_t>(grid_radii * grid_angles));
  const double lr_min = -12.0, lr_max = 12.0;
  for (int i = 0; i < grid_radii; ++i) {
    const double lr = lr_min + (lr_max - lr_min) * i / (grid_radii - 1);
    for (int j = 0; j < grid_angles; ++j) {
      const double th = kPi * (j + 0.5) / grid_angles;
      const cplx zeta(lr, th);
      grid_.push_back({zeta, map_->position(std::exp(zeta))});
    }
  }

  if (map_->is_rounded()) {
    const auto [lo, hi] = map_->rounded_interval();
    const int n = 2048;
    arc_.reserve(n + 1);
    for (int i = 0; i <= n; ++i) {
      // Cosine spacing clusters samples toward the interval ends.
      const double s = 0.5 * (1.0 - std::cos(kPi * i / n));
      const double x = lo + (hi - lo) * s;
      arc_.push_back(map_->position(cplx(x, 0.0)));
      // Seeds just above the rounded segment of the real axis.
      if (i % 32 == 16) {
        const cplx zeta(std::log(x), 1e-3);
        grid_.push_back({zeta, map_->position(std::exp(zeta))});
      }
    }
  }
}

double InverseSolver::sharp_margin(cplx z) const {
  // Signed margin of {x > 0} ∩ {p.n < 0} ∩ ({x < k} ∪ {p.n > -h}).
  const double pn = dot(z, corners_.normal);
  return std::min({z.real(), -pn, std::max(g_.k - z.real(), pn + g_.h)});
}

Region InverseSolver::locate(cplx z, double tol) const {
  if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return Region::Outside;
  const double scaled_tol = tol * g_.k;
  if (arc_.empty()) {
    const double m = sharp_margin(z);
    if (m > scaled_tol) return Region::Inside;
    if (m < -scaled_tol) return Region::Outside;
    return Region::Boundary;
  }
  // Rounded conductor: sharp region plus the fillet G -> arc -> H -> E.
  double arc_dist = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i + 1 < arc_.size(); ++i) {
    arc_dist = std::min(arc_dist, segment_distance(z, arc_[i], arc_[i + 1]));
  }
  if (arc_dist <= scaled_tol) return Region::Boundary;
  std::vector<cplx> fillet = arc_;
  fillet.push_back(corners_.E);
  const bool in_fillet = inside_polygon(z, fillet);
  if (in_fillet) return Region::Inside;
  const double m = sharp_margin(z);
  if (m < -scaled_tol) return Region::Outside;
  if (m > scaled_tol) return Region::Inside;
  // Near a sharp wall: the wall pieces G-E and E-H are interior once rounded.
  const cplx G = arc_.front(), H = arc_.back();
  const double d_ge = segment_distance(z, G, corners_.E);
  const double d_eh = segment_distance(z, corners_.E, H);
  if (std::min(d_ge, d_eh) <= scaled_tol) return Region::Inside;
  return Region::Boundary;
}

cplx InverseSolver::project_to_boundary(cplx z) const {
  const CornerGeometry& cg = corners_;
  // Candidate projections onto each wall line, restricted to its half-line.
  struct Cand { cplx p; double d; };
  std::vector<Cand> cands;
  const auto consider = [&](cplx p) { cands.push_back({p, std::abs(p - z)}); };
  // The four walls as half-lines ending at B or E.
  consider({0.0, std::min(z.imag(), 0.0)});
  consider(std::max(dot(z, cg.direction), 0.0) * cg.direction);
  consider({g_.k, std::min(z.imag(), cg.E.imag())});
  consider(cg.E + std::max(dot(z - cg.E, cg.direction), 0.0) * cg.direction);
  for (std::size_t i = 0; i + 1 < arc_.size(); ++i) {
    const cplx a = arc_[i], b = arc_[i + 1];
    const cplx ab = b - a;
    const double t = std::clamp(dot(z - a, ab) / std::max(std::norm(ab), 1e-300), 0.0, 1.0);
    consider(a + t * ab);
  }
  if (cands.empty()) return z;
  return std::min_element(cands.begin(), cands.end(),
                          [](const Cand& x, const Cand& y) { return x.d < y.d; })
      ->p;
}

std::vector<cplx> InverseSolver::seeds_for(cplx z) const {
  std::vector<cplx> seeds;
  const double p = g_.alpha.exponent();
  const double beta = g_.alpha.beta();
  const double alpha = g_.alpha.radians();
  const double k = g_.k;

  // Corner E: z - E ~ K (z1 - 1)^(1+p), arg(z1 - 1) in [0, pi].
  const cplx dE = z - inner_corner_;
  if (std::abs(dE) < 0.2 * k) {
    if (std::abs(dE) == 0.0) {
      seeds.push_back(0.0);  // ln 1
    } else {
      const double base = std::arg(e_coeff_);
      double phi = std::arg(dE) - base;
      while (phi < -0.5 * (2 * kPi - (1 + p) * kPi)) phi += 2 * kPi;
      while (phi >= 2 * kPi - 0.5 * (2 * kPi - (1 + p) * kPi)) phi -= 2 * kPi;
      const double th = std::clamp(phi / (1.0 + p), 0.0, kPi);
      const double r = std::pow(std::abs(dE) / std::abs(e_coeff_), 1.0 / (1.0 + p));
      const cplx z1 = 1.0 + std::polar(r, th);
      seeds.push_back(clamp_zeta(std::log(z1 == cplx(0.0) ? cplx(1e-300) : z1)));
    }
  }
  // Corner B: z ~ K_B (z1 - xB)^beta, arg(z1 - xB) in [0, pi].
  if (std::abs(z) < 0.2 * k && std::abs(z) > 0.0) {
    const double base = std::arg(b_coeff_);
    double phi = std::arg(z) - base;
    while (phi < -0.5 * (2 * kPi - alpha)) phi += 2 * kPi;
    while (phi >= 2 * kPi - 0.5 * (2 * kPi - alpha)) phi -= 2 * kPi;
    const double th = std::clamp(phi / beta, 0.0, kPi);
    const double r = std::pow(std::abs(z) / std::abs(b_coeff_), 1.0 / beta);
    const cplx z1 = map_->outer_prevertex() + std::polar(r, th);
    if (z1 != cplx(0.0)) seeds.push_back(clamp_zeta(std::log(z1)));
  }
  // Far fields.
  if (z.imag() < std::min(corners_.E.imag(), 0.0) - 0.5 * k) {
    seeds.push_back(clamp_zeta((z - low_offset_) / low_slope_));
  }
  if (dot(z, corners_.direction) > std::max(dot(corners_.E, corners_.direction), 0.0) + 0.5 * g_.h) {
    seeds.push_back(clamp_zeta((z - high_offset_) / high_slope_));
  }
  // Nearest grid nodes.
  std::vector<std::pair<double, std::size_t>> near;
  near.reserve(grid_.size());
  for (std::size_t i = 0; i < grid_.size(); ++i) near.emplace_back(std::abs(grid_[i].z - z), i);
  const std::size_t take = std::min<std::size_t>(4, near.size());
  std::partial_sort(near.begin(), near.begin() + static_cast<std::ptrdiff_t>(take), near.end());
  for (std::size_t i = 0; i < take; ++i) seeds.push_back(grid_[near[i].second].zeta);
  return seeds;
}

double InverseSolver::attainable_residual(cplx z1, cplx z) const {
  // Rounding floor of |z(z1) - z|: z1 itself is only known to one ulp, which
  // matters next to the outer corner where dz/dz1 blows up.
  constexpr double eps = std::numeric_limits<double>::epsilon();
  double d = 0.0;
  try {
    d = std::abs(map_->log_derivative(z1));
  } catch (const SingularPointError&) {
    d = 0.0;
  }
  return 16.0 * eps * (d + std::abs(z) + std::abs(inner_corner_) + g_.k);
}

InverseResult InverseSolver::newton(cplx z, cplx zeta0, double tol_req, int max_it) const {
  InverseResult best;
  best.residual = std::numeric_limits<double>::infinity();
  cplx zeta = clamp_zeta(zeta0);
  cplx F;
  try {
    F = map_->position(std::exp(zeta)) - z;
  } catch (const SingularPointError&) {
    return best;
  }
  double res = std::abs(F);
  best = {std::exp(zeta), res, 0, false, false};
  int polish = 0;
  for (int it = 1; it <= max_it; ++it) {
    const double tol_abs = std::max(tol_req, attainable_residual(std::exp(zeta), z));
    if (res <= tol_abs) {
      // A couple of extra steps once converged sharpen the preimage itself.
      if (++polish > 2 || res == 0.0) break;
    }
    cplx d;
    try {
      d = map_->log_derivative(std::exp(zeta));
    } catch (const SingularPointError&) {
      break;
    }
    if (d == cplx(0.0)) break;
    cplx step = -F / d;
    const double smax = 4.0;
    if (std::abs(step) > smax) step *= smax / std::abs(step);
    double lambda = 1.0;
    bool accepted = false;
    for (int ls = 0; ls < 40; ++ls) {
      const cplx trial = clamp_zeta(zeta + lambda * step);
      try {
        const cplx Ft = map_->position(std::exp(trial)) - z;
        const double rt = std::abs(Ft);
        if (rt < res || (rt == res && polish > 0)) {
          zeta = trial;
          F = Ft;
          res = rt;
          accepted = true;
          break;
        }
      } catch (const SingularPointError&) {
      }
      lambda *= 0.5;
    }
    best.iterations = it;
    if (!accepted) break;
    if (res < best.residual) {
      best.z1 = std::exp(zeta);
      best.residual = res;
    }
  }
  best.converged = best.residual <= std::max(tol_req, attainable_residual(best.z1, z));
  return best;
}

InverseResult InverseSolver::invert(cplx z, const InverseOptions& opt) const {
  const Region where = locate(z, opt.boundary_tolerance);
  if (where == Region::Outside) {
    throw OutsideConductorError("point (" + std::to_string(z.real()) + ", " +
                                std::to_string(z.imag()) + ") lies outside the conductor");
  }
  // Boundary points are first solved as given (clamping Im zeta already keeps
  // the preimage in the closed half-plane); projection onto the boundary is
  // the fallback for points that sit marginally outside.
  if (where == Region::Boundary) {
    InverseResult r = solve(z, opt);
    if (r.converged) return r;
    return solve(project_to_boundary(z), opt);
  }
  return solve(z, opt);
}

InverseResult InverseSolver::solve(cplx target, const InverseOptions& opt) const {
  const double k = g_.k;
  const double tol_abs = opt.tolerance * k;
  const bool near_corner = std::abs(target - inner_corner_) < opt.corner_radius * k;
  if (target == inner_corner_) return {1.0, 0.0, 0, true, near_corner};

  InverseResult best;
  best.residual = std::numeric_limits<double>::infinity();
  int total_iterations = 0;
  std::vector<std::pair<double, cplx>> ranked;
  for (const cplx seed : seeds_for(target)) {
    double r0 = std::numeric_limits<double>::infinity();
    try {
      r0 = std::abs(map_->position(std::exp(seed)) - target);
    } catch (const SingularPointError&) {
    }
    ranked.emplace_back(r0, seed);
  }
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const auto& x, const auto& y) { return x.first < y.first; });
  for (const auto& [r0, seed] : ranked) {
    InverseResult r = newton(target, seed, tol_abs, opt.max_iterations);
    total_iterations += r.iterations;
    if (r.residual < best.residual) best = r;
    if (r.converged) break;
  }
  best.iterations = total_iterations;
  best.residual = std::abs(map_->position(best.z1) - target);
  best.converged = best.residual <= std::max(tol_abs, attainable_residual(best.z1, target));
  if (!best.converged && near_corner && best.residual <= opt.corner_tolerance * k) {
    best.converged = true;
    best.near_corner = true;
  }
  if (near_corner) best.near_corner = true;
  return best;
}

InverseResult InverseSolver::invert_near(cplx z, cplx z1_guess, const InverseOptions& opt) const {
  if (z1_guess != cplx(0.0) && std::isfinite(std::abs(z1_guess)) && locate(z, opt.boundary_tolerance) != Region::Outside) {
    InverseResult r = newton(z, std::log(z1_guess), opt.tolerance * g_.k, opt.max_iterations);
    if (r.converged) {
      r.near_corner = std::abs(z - inner_corner_) < opt.corner_radius * g_.k;
      return r;
    }
  }
  return invert(z, opt);
}

InverseResult invert(cplx z, const MapConstants& constants, const InverseOptions& options) {
  return InverseSolver(std::make_shared<SharpMap>(constants)).invert(z, options);
}

InverseResult invert(cplx z, const RoundedMapConstants& constants, const InverseOptions& options) {
  return InverseSolver(std::make_shared<RoundedMap>(constants)).invert(z, options);
}

Region locate_region(cplx z, const MapConstants& constants, double tol) {
  return InverseSolver(std::make_shared<SharpMap>(constants), 2, 2).locate(z, tol);
}

Region locate_region(cplx z, const RoundedMapConstants& constants, double tol) {
  return InverseSolver(std::make_shared<RoundedMap>(constants), 2, 2).locate(z, tol);
}

}  // namespace thinbend
