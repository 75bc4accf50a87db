#include "thinbend/geometry.hpp"

#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>

namespace thinbend {

RationalAngle::RationalAngle(int p, int q) : p_(p), q_(q) {
  if (p <= 0 || q <= p) {
    throw GeometryError("rational angle requires 0 < P < Q (got P=" + std::to_string(p) +
                        ", Q=" + std::to_string(q) + ")");
  }
  if (std::gcd(p, q) != 1) {
    throw GeometryError("rational angle P/Q must be reduced (got " + std::to_string(p) + "/" +
                        std::to_string(q) + ")");
  }
}

double RationalAngle::radians() const noexcept {
  return std::numbers::pi * static_cast<double>(q_ - p_) / q_;
}

namespace {

struct Fraction {
  long long num;
  long long den;
};

// Best rational approximation of x in (0, 1) with denominator <= cap, using
// continued-fraction convergents and the admissible semiconvergents.
Fraction best_rational(double x, int cap) {
  long long p0 = 0, q0 = 1;  // h_{n-2}/k_{n-2}
  long long p1 = 1, q1 = 0;  // h_{n-1}/k_{n-1}
  Fraction best{0, 1};
  double best_err = std::abs(x);
  double r = x;
  for (int iter = 0; iter < 64; ++iter) {
    const double a_real = std::floor(r);
    const long long a = static_cast<long long>(a_real);
    const long long p2 = a * p1 + p0;
    const long long q2 = a * q1 + q0;
    if (q2 > cap) {
      // largest semiconvergent that still fits
      const long long t = (cap - q0) / q1;
      if (t > 0) {
        const long long ps = t * p1 + p0;
        const long long qs = t * q1 + q0;
        const double err = std::abs(x - static_cast<double>(ps) / qs);
        if (err < best_err) {
          best = {ps, qs};
          best_err = err;
        }
      }
      break;
    }
    const double err = std::abs(x - static_cast<double>(p2) / q2);
    if (q2 > 0 && err < best_err) {
      best = {p2, q2};
      best_err = err;
    }
    p0 = p1;
    q0 = q1;
    p1 = p2;
    q1 = q2;
    const double frac = r - a_real;
    if (frac < 1e-15) break;
    r = 1.0 / frac;
  }
  return best;
}

}  // namespace

RationalAngle make_angle(double degrees, int denominator_cap, double tolerance_deg) {
  if (!std::isfinite(degrees) || degrees <= 0.0 || degrees >= 180.0) {
    std::ostringstream msg;
    msg << "bend angle must lie strictly between 0 and 180 degrees (got " << degrees << ")";
    throw GeometryError(msg.str());
  }
  if (denominator_cap < 2) throw GeometryError("denominator cap must be at least 2");
  const double exponent = (180.0 - degrees) / 180.0;
  const Fraction f = best_rational(exponent, denominator_cap);
  if (f.num <= 0 || f.num >= f.den) {
    std::ostringstream msg;
    msg << "angle " << degrees << " deg has no representation 180(1-P/Q) with Q <= "
        << denominator_cap;
    throw GeometryError(msg.str());
  }
  const double represented = 180.0 * static_cast<double>(f.den - f.num) / f.den;
  if (std::abs(represented - degrees) > tolerance_deg) {
    std::ostringstream msg;
    msg.precision(12);
    msg << "angle " << degrees << " deg is not representable as 180(1-P/Q) with Q <= "
        << denominator_cap << "; nearest representable angle is " << represented << " deg (P/Q = "
        << f.num << "/" << f.den << ")";
    throw GeometryError(msg.str());
  }
  return RationalAngle(static_cast<int>(f.num), static_cast<int>(f.den));
}

cplx NormalizedGeometry::to_user(cplx z) const {
  if (!mirrored) return z;
  // z -> -e^{i alpha} conj(z): swaps the arm directions -i and d about B.
  return -std::polar(1.0, geometry.alpha.radians()) * std::conj(z);
}

NormalizedGeometry validate(const BendGeometry& geometry) {
  auto bad = [](double v) { return !std::isfinite(v) || v <= 0.0; };
  if (bad(geometry.h) || bad(geometry.k)) {
    throw GeometryError("conductor widths h and k must be positive and finite");
  }
  if (bad(geometry.J)) throw GeometryError("applied current J must be positive and finite");
  NormalizedGeometry out{geometry, false};
  if (geometry.h < geometry.k) {
    std::swap(out.geometry.h, out.geometry.k);
    out.mirrored = true;
  }
  return out;
}

NormalizedGeometry validate(const NormalizedGeometry& normalized) {
  NormalizedGeometry again = validate(normalized.geometry);
  again.mirrored = again.mirrored != normalized.mirrored;
  return again;
}

CornerGeometry corners(const BendGeometry& g) {
  const double alpha = g.alpha.radians();
  const double s = std::sin(alpha);
  const double c = std::cos(alpha);
  const double yE = -(g.h + g.k * c) / s;
  CornerGeometry cg;
  cg.B = {0.0, 0.0};
  cg.E = {g.k, yE};
  cg.direction = {s, -c};
  cg.normal = {c, s};
  cg.length_BE = std::abs(cg.E - cg.B);
  return cg;
}

}  // namespace thinbend
