// Rounding of the inner corner: solves for the three rounding parameters
// (delta1, delta2, gamma) that put z_R(1) at the apex E' of a circular arc of
// radius rho and make the arc symmetric (|E'G| = |E'H|, with G, H the images
// of 1 - delta1 and 1 + delta2), then sweeps rho.
#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "thinbend/sc_map.hpp"

namespace thinbend {

struct RoundingTarget {
  double rho = 0.0;
  double dx = 0.0;  // rho (1 - sin(alpha/2))
  double dy = 0.0;  // dx cot(alpha/2)
  double x_target = 0.0;  // k + dx
  double y_target = 0.0;  // y_E - dy
};

RoundingTarget e_prime_target(const BendGeometry& geometry, double rho);

enum class RoundingStatus {
  Converged,         // scaled residual norm below tolerance
  NotConverged,      // iteration budget exhausted or no further descent
  DomainExit,        // a parameter ran to the edge of its open domain
  SingularJacobian,  // the linearized system lost rank
};

const char* to_string(RoundingStatus status);

struct RoundingSolution {
  double rho = 0.0;
  double delta1 = 0.0;
  double delta2 = 0.0;
  double gamma = 0.0;
  /// Scaled residuals: placement (x, y)/k and (|E'G|^2 - |E'H|^2)/k^2.
  std::array<double, 3> residuals{};
  double residual_norm = 0.0;
  double j_corner = 0.0;  // density at E' = z_R(1)
  bool feasible = false;
  RoundingStatus status = RoundingStatus::NotConverged;
  int iterations = 0;
};

struct RoundingOptions {
  double tolerance = 1e-8;
  int max_iterations = 80;
  /// Bound on |logit delta1|, |ln delta2| and |ln gamma|; reaching it counts
  /// as leaving the open parameter domain.
  double domain_bound = 30.0;
  /// Continuation seed (delta1, delta2, gamma); a power-law seed is used when absent.
  std::optional<std::array<double, 3>> seed;
};

/// Scaled residuals of the rounding system at the given parameters.
std::array<double, 3> rounding_residuals(const BendGeometry& geometry, const RoundingTarget& target,
                                         double delta1, double delta2, double gamma);

/// Small-rho seed: delta1 = delta2 = (rho (1 + a)^p / |C|)^(Q/(P+Q)) after a
/// two-parameter placement solve at gamma = 1.
std::array<double, 3> rounding_seed(const BendGeometry& geometry, double rho);

RoundingSolution solve_rounding(const BendGeometry& geometry, double rho,
                                const RoundingOptions& options = {});

struct SweepResult {
  std::vector<RoundingSolution> solutions;           // feasible prefix
  std::optional<RoundingSolution> first_infeasible;  // where the sweep stopped
};

/// Continuation over n evenly spaced radii in [rho_min, rho_max].
SweepResult sweep(const BendGeometry& geometry, double rho_min, double rho_max, int n,
                  const RoundingOptions& options = {});

struct MaxRadiusResult {
  double rho_max = 0.0;  // 0 when even the smallest probe radius is infeasible
  RoundingSolution last_feasible;
  std::optional<RoundingSolution> first_infeasible;
  int solves = 0;
};

/// Largest feasible rho: geometric probe from 1e-6 k upward, then bisection
/// to relative tolerance `tol`.
MaxRadiusResult max_radius(const BendGeometry& geometry, double tol = 1e-3,
                           const RoundingOptions& options = {});

/// Least-squares circle through the rounded part of the inner wall.
struct ArcFit {
  cplx center;
  double radius = 0.0;
  double max_deviation = 0.0;  // max | |z - center| - radius | over the samples
};

ArcFit fit_rounded_arc(const RoundedMapConstants& rc, int samples = 201);

}  // namespace thinbend
