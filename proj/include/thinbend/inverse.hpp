// Numerical inversion z -> z1 of the forward conformal maps.
//
// Newton's method runs in zeta = ln z1, where the map is close to linear in
// both far fields (z ~ (i k/pi) zeta in the narrow arm, z ~ C zeta in the
// wide arm) and the closed upper half-plane becomes the strip
// 0 <= Im zeta <= pi. Seeds come from the far-field asymptotics, local power
// laws at the two corners, and a precomputed log-polar grid.
#pragma once

#include <memory>
#include <stdexcept>
#include <vector>

#include "thinbend/sc_map.hpp"

namespace thinbend {

class OutsideConductorError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Newton did not reach the requested tolerance.
class InversionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Region { Inside, Boundary, Outside };

const char* to_string(Region region);

struct InverseResult {
  cplx z1;
  // Convergence means residual <= max(tolerance k, rounding floor), where the
  // floor ~ 16 eps (|dz/d ln z1| + |z| + k) accounts for the conditioning
  // near the outer corner.
  double residual = 0.0;  // |z(z1) - z|
  int iterations = 0;
  bool converged = false;
  bool near_corner = false;  // accepted with the relaxed corner tolerance
};

struct InverseOptions {
  /// Residual tolerance in units of k.
  double tolerance = 1e-12;
  /// Relaxed tolerance (units of k) accepted within corner_radius of E.
  double corner_tolerance = 1e-6;
  double corner_radius = 1e-3;  // units of k
  int max_iterations = 60;
  /// Classification tolerance (units of k) for boundary projection.
  double boundary_tolerance = 1e-9;
};

class InverseSolver {
 public:
  explicit InverseSolver(std::shared_ptr<const ConformalMap> map, int grid_radii = 32,
                         int grid_angles = 32);

  /// Preimage of z. Throws OutsideConductorError for points outside the
  /// conductor; returns converged = false (best iterate) when Newton fails.
  [[nodiscard]] InverseResult invert(cplx z, const InverseOptions& options = {}) const;

  /// Newton from a caller-supplied preimage guess (continuation along a
  /// path), falling back to the seeded search when that fails.
  [[nodiscard]] InverseResult invert_near(cplx z, cplx z1_guess,
                                          const InverseOptions& options = {}) const;

  [[nodiscard]] Region locate(cplx z, double tol = 1e-9) const;

  [[nodiscard]] const ConformalMap& map() const { return *map_; }
  [[nodiscard]] std::shared_ptr<const ConformalMap> map_ptr() const { return map_; }

  /// Image of the inner corner, z(1); E for the sharp map, E' when rounded.
  [[nodiscard]] cplx inner_corner() const { return inner_corner_; }
  /// Sampled image of the rounded part of the inner wall (empty when sharp).
  [[nodiscard]] const std::vector<cplx>& rounded_boundary() const { return arc_; }

 private:
  struct Seed {
    cplx zeta;
    cplx z;
  };

  [[nodiscard]] InverseResult solve(cplx target, const InverseOptions& options) const;
  [[nodiscard]] std::vector<cplx> seeds_for(cplx z) const;
  [[nodiscard]] InverseResult newton(cplx z, cplx zeta0, double tol_abs, int max_it) const;
  [[nodiscard]] cplx project_to_boundary(cplx z) const;
  [[nodiscard]] double attainable_residual(cplx z1, cplx z) const;
  [[nodiscard]] double sharp_margin(cplx z) const;

  std::shared_ptr<const ConformalMap> map_;
  BendGeometry g_;
  CornerGeometry corners_;
  cplx inner_corner_;
  // zeta-plane far-field laws z ~ slope * zeta + offset.
  cplx low_slope_, low_offset_, high_slope_, high_offset_;
  // Local corner laws.
  cplx e_coeff_;  // z - E ~ e_coeff (z1 - 1)^(1 + p)
  cplx b_coeff_;  // z ~ b_coeff (z1 + a)^beta
  std::vector<Seed> grid_;
  std::vector<cplx> arc_;  // rounded boundary polyline, G ... H
};

InverseResult invert(cplx z, const MapConstants& constants, const InverseOptions& options = {});
InverseResult invert(cplx z, const RoundedMapConstants& constants, const InverseOptions& options = {});
Region locate_region(cplx z, const MapConstants& constants, double tol = 1e-9);
Region locate_region(cplx z, const RoundedMapConstants& constants, double tol = 1e-9);

}  // namespace thinbend
