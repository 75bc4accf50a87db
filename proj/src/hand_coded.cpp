#include "thinbend/hand_coded.hpp"

#include <cmath>
#include <numbers>

#include "thinbend/sc_map.hpp"

namespace thinbend {

namespace {

constexpr double kPi = std::numbers::pi;
const double kS3 = std::sqrt(3.0);
constexpr cplx I{0.0, 1.0};

void require_matching(const BendGeometry& g, ExplicitAngle which) {
  if (!(g.alpha == angle_of(which))) {
    throw GeometryError("geometry angle does not match the requested explicit formula");
  }
  validate(g);
  if (g.h < g.k) throw GeometryError("explicit formulas assume h >= k");
}

cplx scale(const BendGeometry& g, ExplicitAngle which) {
  switch (which) {
    case ExplicitAngle::Deg60: return g.h / (2.0 * kPi) * cplx(kS3, -1.0);
    case ExplicitAngle::Deg30: return g.h / (2.0 * kPi) * cplx(1.0, -kS3);
    case ExplicitAngle::Deg120: return g.h / (2.0 * kPi) * cplx(kS3, 1.0);
  }
  return 0.0;
}

double b_of(const BendGeometry& g, ExplicitAngle which) {
  switch (which) {
    case ExplicitAngle::Deg60: return std::sqrt(g.h / g.k);
    case ExplicitAngle::Deg30: return std::pow(g.h / g.k, 0.2);
    case ExplicitAngle::Deg120: return g.h / g.k;
  }
  return 1.0;
}

}  // namespace

RationalAngle angle_of(ExplicitAngle which) {
  switch (which) {
    case ExplicitAngle::Deg60: return {2, 3};
    case ExplicitAngle::Deg30: return {5, 6};
    case ExplicitAngle::Deg120: return {1, 3};
  }
  return {2, 3};
}

cplx explicit_integration_constant(const BendGeometry& g, ExplicitAngle which) {
  require_matching(g, which);
  const double h = g.h, k = g.k;
  switch (which) {
    case ExplicitAngle::Deg60: return {-(h + k) / 4.0, -kS3 / 12.0 * (7.0 * k - h)};
    case ExplicitAngle::Deg30: return {k - h * kS3 / 2.0, -(h / 2.0 + k * kS3)};
    case ExplicitAngle::Deg120: return {(h - k) / 4.0, kS3 / 12.0 * (7.0 * k + h)};
  }
  return 0.0;
}

cplx sheet_correction(const BendGeometry& g, ExplicitAngle which) {
  require_matching(g, which);
  const cplx C = scale(g, which);
  const double b = b_of(g, which);
  switch (which) {
    case ExplicitAngle::Deg60: return 2.0 * kPi * I * C * (0.5 - 1.0 / (2.0 * b * b));
    case ExplicitAngle::Deg30: return 2.0 * kPi * C / std::pow(b, 5);
    case ExplicitAngle::Deg120: return 2.0 * kPi * I * C * (0.5 + 1.0 / (2.0 * b));
  }
  return 0.0;
}

cplx hand_coded_map(cplx z1, const BendGeometry& g, ExplicitAngle which) {
  require_matching(g, which);
  if (!(z1.imag() > 0.0)) throw SingularPointError("explicit formulas are evaluated on the open upper half-plane");
  const cplx C = scale(g, which);
  const double b = b_of(g, which);
  const auto L = [](cplx w) { return std::log(w); };
  cplx v;
  switch (which) {
    case ExplicitAngle::Deg60: {
      const cplx t = std::exp((L(z1 + b * b * b) - L(z1 - 1.0)) / 3.0);
      const double b2 = b * b;
      v = 1.0 / b2 * L(t + b) - 1.0 / (2.0 * b2) * L(t * t - b * t + b2) - L(t - 1.0) +
          0.5 * L(t * t + t + 1.0) +
          I * kS3 / (2.0 * b2) * L((-2.0 * t + b - I * kS3 * b) / (2.0 * t - b - I * kS3 * b)) +
          I * kS3 / 2.0 * L((-2.0 * t - 1.0 - I * kS3) / (2.0 * t + 1.0 - I * kS3));
      break;
    }
    case ExplicitAngle::Deg30: {
      const cplx t = std::exp((L(z1 + std::pow(b, 6)) - L(z1 - 1.0)) / 6.0);
      const double b5 = std::pow(b, 5);
      v = I / b5 * L((t + I * b) / (-t + I * b)) +
          kS3 / (2.0 * b5) * L((t * t + kS3 * b * t + b * b) / (t * t - kS3 * b * t + b * b)) +
          I * kS3 / 2.0 * L((2.0 * t + 1.0 + I * kS3) / (-2.0 * t - 1.0 + I * kS3)) +
          I * kS3 / 2.0 * L((2.0 * t - 1.0 + I * kS3) / (-2.0 * t + 1.0 + I * kS3)) +
          I / (2.0 * b5) * L((2.0 * t + kS3 * b + I * b) / (-2.0 * t - kS3 * b + I * b)) +
          I / (2.0 * b5) * L((2.0 * t - kS3 * b + I * b) / (-2.0 * t + kS3 * b + I * b)) +
          L((t + 1.0) / (t - 1.0)) + 0.5 * L((t * t + t + 1.0) / (t * t - t + 1.0));
      break;
    }
    case ExplicitAngle::Deg120: {
      const cplx t = std::exp((L(z1 + b * b * b) - L(z1 - 1.0)) / 3.0);
      v = -1.0 / b * L(t + b) + 1.0 / (2.0 * b) * L(t * t - b * t + b * b) - L(t - 1.0) +
          0.5 * L(t * t + t + 1.0) -
          I * kS3 / (2.0 * b) * L((2.0 * t - b - I * kS3 * b) / (-2.0 * t + b - I * kS3 * b)) +
          I * kS3 / 2.0 * L((2.0 * t + 1.0 - I * kS3) / (-2.0 * t - 1.0 - I * kS3));
      break;
    }
  }
  return C * v + explicit_integration_constant(g, which) - sheet_correction(g, which);
}

}  // namespace thinbend
