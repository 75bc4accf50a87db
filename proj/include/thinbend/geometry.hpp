// Conductor geometry for a thin-film wire bent at a rational angle.
//
// Coordinate frame used throughout the library:
//   - the narrow arm (width k) runs along -y, occupying 0 < x < k;
//   - the outer corner B sits at the origin, the inner (reentrant) corner E
//     at (k, y_E) with y_E = -(h + k cos a) / sin a;
//   - the wide arm (width h) leaves the bend along d = (sin a, -cos a).
#pragma once

#include <complex>
#include <stdexcept>
#include <string>

namespace thinbend {

using cplx = std::complex<double>;

class GeometryError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Bend angle alpha = pi (1 - P/Q), 0 < P < Q, gcd(P, Q) = 1.
class RationalAngle {
 public:
  RationalAngle(int p, int q);

  [[nodiscard]] int p() const noexcept { return p_; }
  [[nodiscard]] int q() const noexcept { return q_; }
  /// 1 - beta = P/Q, the exponent of the Schwarz-Christoffel factor.
  [[nodiscard]] double exponent() const noexcept { return static_cast<double>(p_) / q_; }
  /// beta = alpha / pi.
  [[nodiscard]] double beta() const noexcept { return static_cast<double>(q_ - p_) / q_; }
  [[nodiscard]] double radians() const noexcept;
  [[nodiscard]] double degrees() const noexcept { return 180.0 * (q_ - p_) / q_; }

  friend bool operator==(const RationalAngle&, const RationalAngle&) = default;

 private:
  int p_;
  int q_;
};

inline constexpr int kDefaultDenominatorCap = 64;

/// Converts an angle in degrees to P/Q form. Angles that are not exactly
/// representable are accepted when the best convergent with Q <= cap lies
/// within `tolerance_deg`; otherwise GeometryError names the nearest
/// representable angle.
RationalAngle make_angle(double degrees, int denominator_cap = kDefaultDenominatorCap,
                         double tolerance_deg = 1e-9);

struct BendGeometry {
  double h = 2.0;  // wide arm
  double k = 1.0;  // narrow arm
  RationalAngle alpha{2, 3};
  double J = 1.0;  // total current

  friend bool operator==(const BendGeometry&, const BendGeometry&) = default;
};

/// Result of `validate`: an h >= k geometry plus the reflection needed to
/// map internal coordinates back to the caller's frame.
struct NormalizedGeometry {
  BendGeometry geometry;
  bool mirrored = false;

  /// Reflection across the bend bisector; an involution, so it maps both ways.
  [[nodiscard]] cplx to_user(cplx z) const;
  [[nodiscard]] cplx to_internal(cplx z) const { return to_user(z); }
};

NormalizedGeometry validate(const BendGeometry& geometry);
/// Idempotent overload: validating an already normalized geometry keeps its flag.
NormalizedGeometry validate(const NormalizedGeometry& normalized);

/// Straight-edged corner points and wall lines of the sharp conductor.
struct CornerGeometry {
  cplx B;          // outer corner (origin)
  cplx E;          // inner corner
  cplx direction;  // unit vector along the wide arm, away from the bend
  cplx normal;     // unit normal (cos a, sin a); wide arm is -h < p.n < 0
  double length_BE;
};

CornerGeometry corners(const BendGeometry& geometry);

/// Which arm of the conductor a far-field quantity refers to.
enum class Arm { Narrow, Wide };

}  // namespace thinbend
