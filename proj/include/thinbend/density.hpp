// Current density, cross-section profiles, flux integrals and current lines.
//
// The complex potential of the point source at z1 = 0 is W = A ln z1 with
// A = J/pi: the stream function U = A arg z1 is constant on the insulating
// walls (arg z1 = 0 and pi) and the current density magnitude is
// |dW/dz| = A / |dz/d(ln z1)|.
#pragma once

#include <vector>

#include "thinbend/inverse.hpp"

namespace thinbend {

struct FieldPotential {
  double amplitude = 1.0 / 3.14159265358979323846;  // A = J/pi

  [[nodiscard]] double stream(cplx z1) const;     // U = A arg z1
  [[nodiscard]] double potential(cplx z1) const;  // V = -A ln|z1|
};

FieldPotential field_potential(double J);

struct DensityValue {
  double j = 0.0;  // +infinity when divergent
  bool divergent = false;
};

struct DensitySample {
  double x = 0.0;
  double y = 0.0;
  double j = 0.0;
  bool divergent = false;
};

/// j = (J/pi) / |dz/d(ln z1)|. Divergent exactly at the sharp corner
/// preimage z1 = 1; zero at the outer corner z1 = -a.
DensityValue density_from_preimage(cplx z1, const ConformalMap& map, double J);
DensityValue density_from_preimage(cplx z1, const MapConstants& constants, double J);
DensityValue density_from_preimage(cplx z1, const RoundedMapConstants& constants, double J);

/// Current density vector (x, y components as a complex number); it points
/// from the narrow arm toward the wide arm.
cplx current_vector(cplx z1, const ConformalMap& map, double J);

/// Inverts z and evaluates the density. The exact sharp corner E is reported
/// as divergent.
DensityValue density_at_point(cplx z, const InverseSolver& solver, double J);

enum class Spacing { Uniform, EndpointRefined };

struct ProfileSpec {
  cplx start;  // typically B
  cplx end;    // E, or E' for a rounded map
  int n = 200;
  Spacing spacing = Spacing::Uniform;
};

struct ProfileSample {
  double s = 0.0;         // arclength from start
  double j = 0.0;
  double s_over_l = 0.0;  // s / l
  double j_scaled = 0.0;  // j k / J
  bool divergent = false;
};

/// Straight profile from B to the inner corner image z(1).
ProfileSpec corner_profile(const InverseSolver& solver, int n, Spacing spacing);

/// Samples on the open interval (0, l). EndpointRefined clusters points
/// geometrically toward the end point (distances down to 1e-7 l).
std::vector<ProfileSample> profile(const ProfileSpec& spec, const InverseSolver& solver, double J);

struct FluxResult {
  double current = 0.0;
  double error_estimate = 0.0;
};

/// Line integral of the normal current density across the straight segment
/// p0 -> p1 (normal i (p1-p0)/|p1-p0|). Both endpoints must lie on the
/// conductor walls; throws std::invalid_argument otherwise.
FluxResult flux_across(cplx p0, cplx p1, const InverseSolver& solver, double J);

struct Streamline {
  double parameter = 0.0;  // ray angle theta (current line) or ln r (equipotential)
  double level = 0.0;      // U = A theta, or V = -A ln r
  std::vector<cplx> points;
};

struct TraceOptions {
  int samples = 400;
  /// Extent of each current line past the bend, in units of the arm width.
  double arm_extent = 3.0;
};

/// Images of the rays arg z1 = i pi/(count+1), i = 1..count: current lines
/// with equal current between neighbours.
std::vector<Streamline> trace_streamlines(int count, const ConformalMap& map, double J,
                                          const TraceOptions& options = {});

/// Images of the half circles |z1| = exp(l) for the given log radii.
std::vector<Streamline> trace_equipotentials(const std::vector<double>& log_radii,
                                             const ConformalMap& map, double J,
                                             int samples = 200);

/// Log radii of `count` equipotentials spread evenly across the bend region.
std::vector<double> default_equipotential_levels(const ConformalMap& map, int count);

}  // namespace thinbend
