#include "thinbend/sc_map.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace thinbend {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kSeriesThreshold = 0.1;
constexpr int kSeriesTerms = 40;

// Closed upper half-plane representative of z1, with +0 imaginary part on
// the real axis so principal logs pick arg = +pi on the negative axis.
cplx to_closed_upper(cplx z1) {
  if (!std::isfinite(z1.real()) || !std::isfinite(z1.imag())) {
    throw SingularPointError("z1 must be finite");
  }
  if (z1.imag() < -1e-12) {
    std::ostringstream msg;
    msg << "z1 = (" << z1.real() << ", " << z1.imag() << ") lies below the real axis";
    throw SingularPointError(msg.str());
  }
  return {z1.real(), z1.imag() > 0.0 ? z1.imag() : 0.0};
}

// log with arg restricted to the closed lower half-plane branch (-pi, 0] ∪ {-pi}.
cplx log_lower(cplx w) {
  return {std::log(std::abs(w)), std::atan2(-std::abs(w.imag()), w.real())};
}

// log with arg restricted to the closed upper half-plane branch [0, pi].
cplx log_upper(cplx w) {
  return {std::log(std::abs(w)), std::atan2(std::abs(w.imag()), w.real())};
}

// Sum_{j<Q} x^j without forming x^Q - 1.
cplx geometric_sum(cplx x, int Q) {
  cplx s = 0.0, term = 1.0;
  for (int j = 0; j < Q; ++j) {
    s += term;
    term *= x;
  }
  return s;
}

// Point data shared by the closed form and the series for one term I(m).
struct TermPoint {
  cplx w;          // u^Q = (z1 - m)/(z1 + aTilde)
  cplx log_u;      // (Log(z1 - m) - Log(z1 + aTilde))/Q, arg in [0, pi/Q]
  bool at_zero;    // z1 = m
  bool at_infinity;  // z1 = -aTilde
};

TermPoint term_point(cplx z1, double m, double a_tilde, int Q) {
  TermPoint tp{};
  const cplx num = z1 - m;
  const cplx den = z1 + a_tilde;
  tp.at_zero = (num == cplx(0.0, 0.0));
  tp.at_infinity = (den == cplx(0.0, 0.0));
  if (!tp.at_zero && !tp.at_infinity) {
    tp.w = num / den;
    tp.log_u = (std::log(num) - std::log(den)) / static_cast<double>(Q);
  }
  return tp;
}

// Coefficient-free series pieces, multiplied by scale = coefficient sum
// normalization (c_r = scale * r^-P).
cplx small_u_series(const PartialFractionForm& f, const TermPoint& tp, cplx scale) {
  // G(u) = -scale Q sum_j ((-a)^j - 1) u^(P + jQ) / (P + jQ)
  const cplx uP = std::exp(static_cast<double>(f.P) * tp.log_u);
  cplx wj = 1.0;
  double neg_a_j = 1.0;
  cplx sum = 0.0;
  for (int j = 1; j <= kSeriesTerms; ++j) {
    wj *= tp.w;
    neg_a_j *= -f.a;
    const cplx term = (neg_a_j - 1.0) * wj / static_cast<double>(f.P + j * f.Q);
    sum += term;
    if (std::abs(term) < 1e-18 * std::abs(sum)) break;
  }
  return -scale * static_cast<double>(f.Q) * uP * sum;
}

cplx large_u_series(const PartialFractionForm& f, const TermPoint& tp, cplx scale,
                    bool at_infinity) {
  // G(u) = G(inf) - scale Q sum_j ((-a)^-j - 1) u^-(jQ - P) / (jQ - P)
  if (at_infinity) return f.value_at_infinity;
  const cplx uP = std::exp(static_cast<double>(f.P) * tp.log_u);
  const cplx inv_w = 1.0 / tp.w;
  cplx inv_wj = 1.0;
  double neg_inv_a_j = 1.0;
  cplx sum = 0.0;
  for (int j = 1; j <= kSeriesTerms; ++j) {
    inv_wj *= inv_w;
    neg_inv_a_j *= -1.0 / f.a;
    const cplx term = (neg_inv_a_j - 1.0) * inv_wj / static_cast<double>(j * f.Q - f.P);
    sum += term;
    if (std::abs(term) < 1e-18 * std::abs(sum)) break;
  }
  return f.value_at_infinity - scale * static_cast<double>(f.Q) * uP * sum;
}

cplx closed_form(const PartialFractionForm& f, const TermPoint& tp, double m, double a_tilde,
                 cplx z1) {
  const cplx u = std::exp(tp.log_u);
  cplx sum = 0.0;
  for (std::size_t i = 0; i < f.roots.size(); ++i) {
    const cplx r = f.roots[i];
    cplx L;
    if (i == f.lower_edge_root) {
      // 1 - u = (1 - u^Q) / sum u^j, with 1 - u^Q = (m + aTilde)/(z1 + aTilde).
      const cplx one_minus = ((m + a_tilde) / (z1 + a_tilde)) / geometric_sum(u, f.Q);
      L = log_lower(one_minus);
    } else if (i == f.upper_edge_root) {
      // 1 - (r u)^Q = 1 + a' u^Q = z1 (m + aTilde) / (m (z1 + aTilde)).
      const cplx ru = r * u;
      const cplx one_minus = (z1 * (m + a_tilde) / (m * (z1 + a_tilde))) / geometric_sum(ru, f.Q);
      L = log_upper(one_minus);
    } else {
      L = std::log(1.0 - r * u);
    }
    sum += f.coefficients[i] * L;
  }
  return sum;
}

cplx scale_of(const PartialFractionForm& f) {
  // prefactor = -(1 + a) Q scale
  return -f.prefactor / ((1.0 + f.a) * static_cast<double>(f.Q));
}

void require_not_origin(cplx z1, const char* what) {
  if (z1 == cplx(0.0, 0.0)) {
    throw SingularPointError(std::string(what) + " is singular at z1 = 0 (far end of the narrow arm)");
  }
}

}  // namespace

double PartialFractionForm::max_root_modulus() const {
  double m = 0.0;
  for (const auto& r : roots) m = std::max(m, std::abs(r));
  return m;
}

PartialFractionForm make_partial_fractions(const RationalAngle& angle, double a, cplx scale) {
  if (!(a > 0.0) || !std::isfinite(a)) throw GeometryError("prevertex offset a must be positive");
  PartialFractionForm f;
  f.P = angle.p();
  f.Q = angle.q();
  f.a = a;
  const int P = f.P, Q = f.Q;
  const double qd = static_cast<double>(Q);
  f.prefactor = -(1.0 + a) * qd * scale;
  const double root_mod = std::pow(a, 1.0 / qd);
  f.roots.reserve(2 * Q);
  f.residues.reserve(2 * Q);
  f.coefficients.reserve(2 * Q);
  std::vector<double> angles;
  for (int j = 0; j < Q; ++j) {
    const double th = kPi * (2.0 * j + 1.0) / qd;
    const cplx r = std::polar(root_mod, th);
    const cplx r_negP = std::polar(std::pow(root_mod, -P), -P * th);
    f.roots.push_back(r);
    f.residues.push_back(-r_negP / (qd * (1.0 + a)));
    angles.push_back(th);
  }
  for (int j = 0; j < Q; ++j) {
    const double th = 2.0 * kPi * j / qd;
    const cplx r = std::polar(1.0, th);
    const cplx r_negP = std::polar(1.0, -P * th);
    f.roots.push_back(r);
    f.residues.push_back(r_negP / (qd * (1.0 + a)));
    angles.push_back(th);
  }
  for (const auto& res : f.residues) f.coefficients.push_back(f.prefactor * res);
  f.lower_edge_root = static_cast<std::size_t>(Q);        // r = 1
  f.upper_edge_root = static_cast<std::size_t>(Q - 1);    // a^(1/Q) e^{-i pi/Q}

  // Limit u -> infinity taken along the sector bisector arg u = pi/(2Q):
  // log(1 - r u) = log|r| + log|u| + i arg(-r u); the log|u| parts cancel
  // because the coefficients sum to zero.
  const double phi = kPi / (2.0 * qd);
  cplx g_inf = 0.0;
  for (std::size_t i = 0; i < f.roots.size(); ++i) {
    const cplx r = f.roots[i];
    double theta;
    if (i == f.lower_edge_root) {
      theta = phi - kPi;
    } else if (i == f.upper_edge_root) {
      theta = kPi - kPi / qd + phi;
    } else {
      theta = std::arg(-r * std::polar(1.0, phi));
    }
    g_inf += f.coefficients[i] * cplx(std::log(std::abs(r)), theta);
  }
  f.value_at_infinity = g_inf;
  return f;
}

cplx partial_fraction_integrand(const PartialFractionForm& f, cplx t) {
  const cplx tQ = std::pow(t, f.Q);
  return f.prefactor * std::pow(t, f.Q - 1 - f.P) / ((tQ + f.a) * (tQ - 1.0));
}

cplx sector_variable(cplx z1, double m, double a_tilde, int Q) {
  z1 = to_closed_upper(z1);
  const TermPoint tp = term_point(z1, m, a_tilde, Q);
  if (tp.at_zero) return 0.0;
  if (tp.at_infinity) throw SingularPointError("sector variable is infinite at z1 = -aTilde");
  return std::exp(tp.log_u);
}

cplx term_antiderivative(const PartialFractionForm& f, cplx z1, double m, double a_tilde) {
  z1 = to_closed_upper(z1);
  const TermPoint tp = term_point(z1, m, a_tilde, f.Q);
  if (tp.at_zero) return 0.0;
  if (tp.at_infinity) return f.value_at_infinity;
  const cplx scale = scale_of(f);
  const double wmod = std::abs(tp.w);
  if (wmod * std::max(f.a, 1.0) < kSeriesThreshold) return small_u_series(f, tp, scale);
  if (std::max(1.0 / f.a, 1.0) < kSeriesThreshold * wmod) {
    return large_u_series(f, tp, scale, false);
  }
  return closed_form(f, tp, m, a_tilde, z1);
}

MapConstants compute_constants(const BendGeometry& geometry) {
  const NormalizedGeometry ng = validate(geometry);
  if (ng.mirrored) throw GeometryError("compute_constants expects a normalized geometry (h >= k)");
  MapConstants c;
  c.geometry = geometry;
  const double p = geometry.alpha.exponent();
  const double alpha = geometry.alpha.radians();
  c.a = std::pow(geometry.h / geometry.k, 1.0 / p);
  c.C = std::polar(geometry.h / kPi, alpha - kPi / 2.0);
  c.b = std::pow(c.a, 1.0 / geometry.alpha.q());
  c.C1 = corners(geometry).E;
  c.form = make_partial_fractions(geometry.alpha, c.a, c.C);
  return c;
}

cplx forward_map(cplx z1, const MapConstants& c) {
  z1 = to_closed_upper(z1);
  require_not_origin(z1, "forward map");
  return c.C1 + term_antiderivative(c.form, z1, 1.0, c.a);
}

cplx forward_log_derivative(cplx z1, const MapConstants& c) {
  z1 = to_closed_upper(z1);
  const TermPoint tp = term_point(z1, 1.0, c.a, c.geometry.alpha.q());
  if (tp.at_infinity) throw SingularPointError("map derivative diverges at z1 = -a (corner B)");
  if (tp.at_zero) return 0.0;
  return c.C * std::exp(static_cast<double>(c.geometry.alpha.p()) * tp.log_u);
}

cplx forward_derivative(cplx z1, const MapConstants& c) {
  z1 = to_closed_upper(z1);
  require_not_origin(z1, "map derivative");
  return forward_log_derivative(z1, c) / z1;
}

RoundedMapConstants rounded_constants(const BendGeometry& geometry, double delta1, double delta2,
                                      double gamma) {
  if (!(delta1 >= 0.0 && delta1 < 1.0)) throw GeometryError("rounding parameter delta1 must lie in [0, 1)");
  if (!(delta2 >= 0.0) || !std::isfinite(delta2)) throw GeometryError("rounding parameter delta2 must be non-negative");
  if (!(gamma >= 0.0) || !std::isfinite(gamma)) throw GeometryError("rounding parameter gamma must be non-negative");
  const MapConstants base = compute_constants(geometry);
  const double p = geometry.alpha.exponent();
  const int Q = geometry.alpha.q();

  RoundedMapConstants rc;
  rc.geometry = geometry;
  rc.delta1 = delta1;
  rc.delta2 = delta2;
  rc.gamma = gamma;
  if (gamma == 0.0) {
    rc.aTilde = base.a;
    rc.CTilde = base.C;
  } else {
    const double ratio =
        (1.0 + gamma * std::pow(1.0 - delta1, p) + gamma * std::pow(1.0 + delta2, p)) /
        (1.0 + 2.0 * gamma);
    rc.aTilde = base.a * std::pow(ratio, 1.0 / p);
    rc.CTilde = base.C / (1.0 + 2.0 * gamma);
  }
  const std::array<std::pair<double, double>, 3> mw{
      {{1.0, 1.0}, {1.0 - delta1, gamma}, {1.0 + delta2, gamma}}};
  rc.offset = 0.0;
  for (std::size_t i = 0; i < 3; ++i) {
    RoundedTerm& t = rc.terms[i];
    t.m = mw[i].first;
    t.weight = mw[i].second;
    const double a_prime = rc.aTilde / t.m;
    t.b = std::pow(a_prime, 1.0 / Q);
    t.form = make_partial_fractions(geometry.alpha, a_prime, rc.CTilde * t.weight);
    if (t.weight != 0.0) rc.offset -= t.form.value_at_infinity;
  }
  return rc;
}

cplx rounded_forward(cplx z1, const RoundedMapConstants& rc) {
  z1 = to_closed_upper(z1);
  require_not_origin(z1, "rounded map");
  if (z1 == cplx(-rc.aTilde, 0.0)) return 0.0;
  cplx z = rc.offset;
  for (const auto& t : rc.terms) {
    if (t.weight == 0.0) continue;
    z += term_antiderivative(t.form, z1, t.m, rc.aTilde);
  }
  return z;
}

cplx rounded_log_derivative(cplx z1, const RoundedMapConstants& rc) {
  z1 = to_closed_upper(z1);
  const int P = rc.geometry.alpha.p();
  const int Q = rc.geometry.alpha.q();
  cplx sum = 0.0;
  for (const auto& t : rc.terms) {
    if (t.weight == 0.0) continue;
    const TermPoint tp = term_point(z1, t.m, rc.aTilde, Q);
    if (tp.at_infinity) throw SingularPointError("rounded map derivative diverges at z1 = -aTilde");
    if (tp.at_zero) continue;
    sum += t.weight * std::exp(static_cast<double>(P) * tp.log_u);
  }
  return rc.CTilde * sum;
}

cplx rounded_derivative(cplx z1, const RoundedMapConstants& rc) {
  z1 = to_closed_upper(z1);
  require_not_origin(z1, "rounded map derivative");
  return rounded_log_derivative(z1, rc) / z1;
}

}  // namespace thinbend
