// Shared helpers for the unit tests: deterministic sampling and error norms.
#pragma once

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "thinbend/geometry.hpp"

namespace thinbend::testing {

/// Log-uniform modulus in [rmin, rmax], argument uniform in (eps, pi - eps).
inline std::vector<cplx> random_upper_points(std::size_t n, std::uint64_t seed, double rmin = 1e-3,
                                             double rmax = 1e3, double eps = 1e-3) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> lr(std::log(rmin), std::log(rmax));
  std::uniform_real_distribution<double> th(eps, std::numbers::pi - eps);
  std::vector<cplx> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double r = std::exp(lr(rng));
    out.push_back(std::polar(r, th(rng)));
  }
  return out;
}

/// |a - b| relative to max(|b|, length scale); the origin B is a legitimate
/// image point, so a pure relative error would be ill-defined there.
inline double scaled_error(cplx a, cplx b, double length) {
  return std::abs(a - b) / std::max(std::abs(b), length);
}

inline BendGeometry geometry_for(int p, int q, double h = 2.0, double k = 1.0, double J = 1.0) {
  return BendGeometry{h, k, RationalAngle(p, q), J};
}

}  // namespace thinbend::testing
