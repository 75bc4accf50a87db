#include "thinbend/quadrature.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <queue>
#include <string>
#include <sstream>
#include <vector>

namespace thinbend {

namespace {

// Kronrod nodes (positive half, descending) and weights; Gauss weights for
// the odd-indexed nodes.
constexpr std::array<double, 8> kXgk{
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kWgk{
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kWg{
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
  double lo, hi;
  cplx value;
  double error;
  bool operator<(const Segment& o) const { return error < o.error; }
};

Segment gk15(const std::function<cplx(double)>& f, double lo, double hi) {
  const double c = 0.5 * (lo + hi);
  const double hl = 0.5 * (hi - lo);
  const cplx fc = f(c);
  cplx kron = kWgk[7] * fc;
  cplx gauss = kWg[3] * fc;
  for (int j = 0; j < 7; ++j) {
    const double dx = hl * kXgk[j];
    const cplx s = f(c - dx) + f(c + dx);
    kron += kWgk[j] * s;
    if (j % 2 == 1) gauss += kWg[j / 2] * s;
  }
  kron *= hl;
  gauss *= hl;
  if (!std::isfinite(kron.real()) || !std::isfinite(kron.imag())) {
    throw QuadratureError("integrand is not finite on [" + std::to_string(lo) + ", " +
                              std::to_string(hi) + "]",
                          std::numeric_limits<double>::infinity());
  }
  return {lo, hi, kron, std::abs(kron - gauss)};
}

}  // namespace

QuadratureResult integrate_gk15(const std::function<cplx(double)>& f, double lo, double hi,
                                double abs_tol, int max_intervals) {
  std::priority_queue<Segment> heap;
  Segment first = gk15(f, lo, hi);
  double err = first.error;
  heap.push(first);
  int intervals = 1;
  while (err > abs_tol) {
    if (intervals >= max_intervals) {
      std::ostringstream msg;
      msg << "adaptive quadrature did not converge: achieved error " << err << " > " << abs_tol;
      throw QuadratureError(msg.str(), err);
    }
    Segment worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.lo + worst.hi);
    Segment left = gk15(f, worst.lo, mid);
    Segment right = gk15(f, mid, worst.hi);
    err += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
    ++intervals;
    if (mid <= worst.lo || mid >= worst.hi) break;  // interval exhausted in floating point
  }
  // Re-sum to shed accumulated rounding from the incremental updates.
  cplx resum = 0.0;
  double err_sum = 0.0;
  while (!heap.empty()) {
    resum += heap.top().value;
    err_sum += heap.top().error;
    heap.pop();
  }
  if (err_sum > abs_tol) {
    std::ostringstream msg;
    msg << "adaptive quadrature did not converge: achieved error " << err_sum;
    throw QuadratureError(msg.str(), err_sum);
  }
  return {resum, err_sum, intervals};
}

namespace {

using Integrand = std::function<cplx(cplx)>;

// Integrates along x0 -> x0 + iH (substituted) -> Re z1 + iH -> z1.
QuadratureResult contour(const Integrand& dz, double x0, cplx start_value, cplx z1, int Q,
                         double abs_tol, double H) {
  QuadratureResult out{start_value, 0.0, 0};
  auto add = [&](const QuadratureResult& r) {
    out.value += r.value;
    out.error_estimate += r.error_estimate;
    out.intervals += r.intervals;
  };
  const double leg_tol = abs_tol / 3.0;
  const double q = static_cast<double>(Q);
  // Leg 1: z1(v) = x0 + iH v^Q, dz1 = iHQ v^(Q-1) dv. Smooth for an endpoint
  // factor (z1 - x0)^(+-P/Q).
  add(integrate_gk15(
      [&](double v) -> cplx {
        if (v == 0.0) return 0.0;
        const cplx w = cplx(x0, H * std::pow(v, q));
        return dz(w) * cplx(0.0, H * q * std::pow(v, q - 1.0));
      },
      0.0, 1.0, leg_tol));
  const cplx corner1(x0, H);
  const cplx corner2(z1.real(), H);
  if (corner2 != corner1) {
    add(integrate_gk15([&](double s) { return dz(corner1 + (corner2 - corner1) * s) * (corner2 - corner1); },
                       0.0, 1.0, leg_tol));
  }
  if (z1 != corner2) {
    add(integrate_gk15([&](double s) { return dz(corner2 + (z1 - corner2) * s) * (z1 - corner2); },
                       0.0, 1.0, leg_tol));
  }
  return out;
}

}  // namespace

QuadratureResult forward_map_quadrature(cplx z1, const MapConstants& c, QuadratureAnchor anchor,
                                        const ContourOptions& options) {
  if (z1.imag() < 0.0) throw SingularPointError("quadrature oracle requires Im z1 >= 0");
  const double p = c.geometry.alpha.exponent();
  const cplx C = c.C;
  const double a = c.a;
  const Integrand dz = [=](cplx w) { return C / w * std::pow((w - 1.0) / (w + a), p); };
  const double tol = options.relative_tolerance * std::abs(C);
  if (anchor == QuadratureAnchor::CornerE) {
    return contour(dz, 1.0, corners(c.geometry).E, z1, c.geometry.alpha.q(), tol, options.height);
  }
  return contour(dz, -a, cplx(0.0, 0.0), z1, c.geometry.alpha.q(), tol, options.height);
}

QuadratureResult rounded_forward_quadrature(cplx z1, const RoundedMapConstants& rc,
                                            const ContourOptions& options) {
  if (z1.imag() < 0.0) throw SingularPointError("quadrature oracle requires Im z1 >= 0");
  const double p = rc.geometry.alpha.exponent();
  const RoundedMapConstants* prc = &rc;
  const Integrand dz = [=](cplx w) {
    cplx s = 0.0;
    for (const auto& t : prc->terms) {
      if (t.weight == 0.0) continue;
      s += t.weight * std::pow((w - t.m) / (w + prc->aTilde), p);
    }
    return prc->CTilde / w * s;
  };
  const double tol = options.relative_tolerance * std::abs(rc.CTilde) *
                     (1.0 + 2.0 * rc.gamma);
  return contour(dz, -rc.aTilde, cplx(0.0, 0.0), z1, rc.geometry.alpha.q(), tol, options.height);
}

}  // namespace thinbend
