// Explicit log-sum maps for the three bend angles worked out by hand
// (60, 30 and 120 degrees). They serve as an independent oracle for the
// general partial-fraction evaluator.
#pragma once

#include "thinbend/geometry.hpp"

namespace thinbend {

enum class ExplicitAngle { Deg30, Deg60, Deg120 };

RationalAngle angle_of(ExplicitAngle which);

/// Integration constant in the closed form customarily quoted with each
/// explicit formula.
cplx explicit_integration_constant(const BendGeometry& geometry, ExplicitAngle which);

/// Constant shift between the explicit formula (principal logs, quoted C1)
/// and the map that places the corner E at (k, y_E). It is a whole multiple
/// of 2 pi i C per log term, i.e. the quoted logs live on another sheet.
cplx sheet_correction(const BendGeometry& geometry, ExplicitAngle which);

/// Evaluates the explicit log-sum formula with principal logs and
/// t = ((z1 + b^Q)/(z1 - 1))^(1/Q), plus explicit_integration_constant minus
/// sheet_correction. Valid on the open upper half-plane.
cplx hand_coded_map(cplx z1, const BendGeometry& geometry, ExplicitAngle which);

}  // namespace thinbend
