// Numeric contour quadrature of the Schwarz-Christoffel integrands. Used as
// an independent oracle for the closed forms and for flux integrals.
#pragma once

#include <functional>
#include <stdexcept>

#include "thinbend/sc_map.hpp"

namespace thinbend {

class QuadratureError : public std::runtime_error {
 public:
  QuadratureError(const std::string& what, double achieved)
      : std::runtime_error(what), achieved_error(achieved) {}
  double achieved_error;
};

struct QuadratureResult {
  cplx value;
  double error_estimate = 0.0;
  int intervals = 0;
};

/// Globally adaptive 15-point Gauss-Kronrod rule for complex integrands on
/// [lo, hi]. Throws QuadratureError when `max_intervals` is exhausted before
/// the estimated absolute error drops below `abs_tol`.
QuadratureResult integrate_gk15(const std::function<cplx(double)>& f, double lo, double hi,
                                double abs_tol, int max_intervals = 4000);

struct ContourOptions {
  /// Height of the horizontal leg of the integration polyline.
  double height = 1.0;
  /// Target absolute error, relative to |C|.
  double relative_tolerance = 1e-12;
};

/// Anchor prevertex for the sharp-map oracle: start at E (z1 = 1) or at B (z1 = -a).
enum class QuadratureAnchor { CornerE, CornerB };

/// z(z1) by direct integration of dz/dz1 along
///   x0 -> x0 + iH -> Re z1 + iH -> z1,
/// starting from a prevertex x0 with known image; the endpoint power law at
/// x0 is removed by the substitution z1 = x0 + iH v^Q.
QuadratureResult forward_map_quadrature(cplx z1, const MapConstants& constants,
                                        QuadratureAnchor anchor = QuadratureAnchor::CornerE,
                                        const ContourOptions& options = {});

/// Rounded-map oracle, anchored at B' = z_R(-aTilde) = 0.
QuadratureResult rounded_forward_quadrature(cplx z1, const RoundedMapConstants& rc,
                                            const ContourOptions& options = {});

}  // namespace thinbend
