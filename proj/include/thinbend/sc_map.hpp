// Forward Schwarz-Christoffel maps from the upper half-plane onto the bent
// conductor: the sharp-corner map and its three-parameter rounded variant.
//
// Both maps are evaluated in closed form through the partial-fraction
// expansion of the rational integrand in t = ((z1 + a)/(z1 - 1))^(1/Q).
// The library works with u = 1/t, which sweeps the closed sector
// 0 <= arg u <= pi/Q as z1 sweeps the closed upper half-plane. On that
// sector every term log(1 - r u) is single valued with principal branches,
// except for the two roots sitting on the sector edges, which get fixed
// half-plane branches. No path tracking is needed.
#pragma once

#include <array>
#include <complex>
#include <stdexcept>
#include <vector>

#include "thinbend/geometry.hpp"

namespace thinbend {

/// z1 hit a point where the requested quantity is singular.
class SingularPointError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Closed-form expansion of  -(1+a) Q C  t^(Q-1-P) / ((t^Q + a)(t^Q - 1)).
struct PartialFractionForm {
  int P = 0;
  int Q = 0;
  double a = 0.0;                 // t-plane roots solve t^Q = -a and t^Q = 1
  cplx prefactor;                 // -(1 + a) Q C
  std::vector<cplx> roots;        // Q roots of -a followed by Q roots of unity
  std::vector<cplx> residues;     // simple-pole residues N(r)/D'(r)
  std::vector<cplx> coefficients; // prefactor * residue
  std::size_t lower_edge_root = 0;  // r = 1, on the edge arg u = 0
  std::size_t upper_edge_root = 0;  // r = a^(1/Q) e^{-i pi/Q}, on the edge arg u = pi/Q
  /// Antiderivative at u -> infinity minus its value at u = 0.
  cplx value_at_infinity;

  [[nodiscard]] double max_root_modulus() const;
};

PartialFractionForm make_partial_fractions(const RationalAngle& angle, double a, cplx scale);

/// Rational integrand in the t variable, for checking the expansion.
cplx partial_fraction_integrand(const PartialFractionForm& form, cplx t);

/// Antiderivative of  scale/z1 ((z1 - m)/(z1 + aTilde))^(P/Q)  normalized so
/// it vanishes at z1 = m. `form` must have been built with a = aTilde/m.
cplx term_antiderivative(const PartialFractionForm& form, cplx z1, double m, double a_tilde);

/// Branch of ((z1 - m)/(z1 + aTilde))^(1/Q) used by the closed forms.
cplx sector_variable(cplx z1, double m, double a_tilde, int Q);

struct MapConstants {
  BendGeometry geometry;
  double a = 1.0;   // prevertex of B is -a
  cplx C;           // |C| = h/pi, arg C = alpha - pi/2
  double b = 1.0;   // b^Q = a
  cplx C1;          // integration constant: z(1) = E
  PartialFractionForm form;
};

MapConstants compute_constants(const BendGeometry& geometry);

/// z(z1). Accepts the finite limits z1 = 1 (E) and z1 = -a (B); throws
/// SingularPointError at z1 = 0 and for Im z1 < -1e-12.
cplx forward_map(cplx z1, const MapConstants& constants);
/// dz/dz1 = (C/z1) ((z1 - 1)/(z1 + a))^(1-beta).
cplx forward_derivative(cplx z1, const MapConstants& constants);
/// dz/d(ln z1) = z1 dz/dz1; bounded away from the corners.
cplx forward_log_derivative(cplx z1, const MapConstants& constants);

/// One of the three integrals I(m) of the rounded map.
struct RoundedTerm {
  double m = 1.0;
  double weight = 1.0;  // 1 for I(1), gamma for the shifted terms
  double b = 1.0;       // (aTilde/m)^(1/Q)
  PartialFractionForm form;
};

struct RoundedMapConstants {
  BendGeometry geometry;
  double delta1 = 0.0;
  double delta2 = 0.0;
  double gamma = 0.0;
  double aTilde = 1.0;
  cplx CTilde;
  std::array<RoundedTerm, 3> terms;
  /// Integration constant; places the outer corner at z_R(-aTilde) = 0 so
  /// all four straight walls coincide with those of the sharp conductor.
  cplx offset;
};

RoundedMapConstants rounded_constants(const BendGeometry& geometry, double delta1, double delta2,
                                      double gamma);

cplx rounded_forward(cplx z1, const RoundedMapConstants& rc);
cplx rounded_derivative(cplx z1, const RoundedMapConstants& rc);
cplx rounded_log_derivative(cplx z1, const RoundedMapConstants& rc);

/// Uniform view over the sharp and rounded maps used by inversion, density
/// and export code.
class ConformalMap {
 public:
  virtual ~ConformalMap() = default;

  [[nodiscard]] virtual cplx position(cplx z1) const = 0;
  [[nodiscard]] virtual cplx log_derivative(cplx z1) const = 0;
  [[nodiscard]] virtual const BendGeometry& geometry() const = 0;
  /// Preimage of the outer corner B.
  [[nodiscard]] virtual double outer_prevertex() const = 0;
  /// Real-axis interval whose image is the curved part of the inner wall;
  /// degenerate (1, 1) for the sharp map.
  [[nodiscard]] virtual std::pair<double, double> rounded_interval() const = 0;
  [[nodiscard]] bool is_rounded() const {
    const auto [lo, hi] = rounded_interval();
    return hi > lo;
  }
};

class SharpMap final : public ConformalMap {
 public:
  explicit SharpMap(MapConstants constants) : c_(std::move(constants)) {}
  explicit SharpMap(const BendGeometry& geometry) : c_(compute_constants(geometry)) {}

  [[nodiscard]] cplx position(cplx z1) const override { return forward_map(z1, c_); }
  [[nodiscard]] cplx log_derivative(cplx z1) const override {
    return forward_log_derivative(z1, c_);
  }
  [[nodiscard]] const BendGeometry& geometry() const override { return c_.geometry; }
  [[nodiscard]] double outer_prevertex() const override { return -c_.a; }
  [[nodiscard]] std::pair<double, double> rounded_interval() const override { return {1.0, 1.0}; }
  [[nodiscard]] const MapConstants& constants() const { return c_; }

 private:
  MapConstants c_;
};

class RoundedMap final : public ConformalMap {
 public:
  explicit RoundedMap(RoundedMapConstants constants) : c_(std::move(constants)) {}

  [[nodiscard]] cplx position(cplx z1) const override { return rounded_forward(z1, c_); }
  [[nodiscard]] cplx log_derivative(cplx z1) const override {
    return rounded_log_derivative(z1, c_);
  }
  [[nodiscard]] const BendGeometry& geometry() const override { return c_.geometry; }
  [[nodiscard]] double outer_prevertex() const override { return -c_.aTilde; }
  [[nodiscard]] std::pair<double, double> rounded_interval() const override {
    return {1.0 - c_.delta1, 1.0 + c_.delta2};
  }
  [[nodiscard]] const RoundedMapConstants& constants() const { return c_; }

 private:
  RoundedMapConstants c_;
};

}  // namespace thinbend
