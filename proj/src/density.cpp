#include "thinbend/density.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "thinbend/quadrature.hpp"

namespace thinbend {

namespace {

constexpr double kPi = std::numbers::pi;

double dot(cplx a, cplx b) { return a.real() * b.real() + a.imag() * b.imag(); }

void require_current(double J) {
  if (!(J > 0.0) || !std::isfinite(J)) throw GeometryError("current J must be positive and finite");
}

// Far-field laws z ~ slope * zeta + offset in both arms.
struct FarField {
  cplx low_slope, low_offset, high_slope, high_offset;
};

FarField far_field(const ConformalMap& map) {
  const double z_lo = 1e-12, z_hi = 1e12;
  FarField f;
  f.low_slope = map.log_derivative(cplx(0.0, z_lo));
  f.low_offset = map.position(cplx(0.0, z_lo)) - f.low_slope * cplx(std::log(z_lo), kPi / 2);
  f.high_slope = map.log_derivative(cplx(0.0, z_hi));
  f.high_offset = map.position(cplx(0.0, z_hi)) - f.high_slope * cplx(std::log(z_hi), kPi / 2);
  return f;
}

}  // namespace

double FieldPotential::stream(cplx z1) const { return amplitude * std::arg(z1); }
double FieldPotential::potential(cplx z1) const { return -amplitude * std::log(std::abs(z1)); }

FieldPotential field_potential(double J) {
  require_current(J);
  return FieldPotential{J / kPi};
}

DensityValue density_from_preimage(cplx z1, const ConformalMap& map, double J) {
  require_current(J);
  if (!map.is_rounded() && z1 == cplx(1.0, 0.0)) {
    return {std::numeric_limits<double>::infinity(), true};
  }
  const cplx d = map.log_derivative(z1);
  if (d == cplx(0.0)) return {std::numeric_limits<double>::infinity(), true};
  if (!std::isfinite(std::abs(d))) return {0.0, false};
  return {J / kPi / std::abs(d), false};
}

DensityValue density_from_preimage(cplx z1, const MapConstants& constants, double J) {
  return density_from_preimage(z1, SharpMap(constants), J);
}

DensityValue density_from_preimage(cplx z1, const RoundedMapConstants& constants, double J) {
  return density_from_preimage(z1, RoundedMap(constants), J);
}

cplx current_vector(cplx z1, const ConformalMap& map, double J) {
  require_current(J);
  const cplx d = map.log_derivative(z1);
  if (!std::isfinite(std::abs(d))) return 0.0;  // outer corner: density vanishes
  return std::conj(J / kPi / d);
}

DensityValue density_at_point(cplx z, const InverseSolver& solver, double J) {
  if (!solver.map().is_rounded() && z == solver.inner_corner()) {
    return {std::numeric_limits<double>::infinity(), true};
  }
  const InverseResult r = solver.invert(z);
  if (!r.converged) {
    std::ostringstream msg;
    msg << "inversion did not converge at (" << z.real() << ", " << z.imag()
        << "), residual " << r.residual;
    throw InversionError(msg.str());
  }
  return density_from_preimage(r.z1, solver.map(), J);
}

ProfileSpec corner_profile(const InverseSolver& solver, int n, Spacing spacing) {
  return ProfileSpec{cplx(0.0, 0.0), solver.inner_corner(), n, spacing};
}

std::vector<ProfileSample> profile(const ProfileSpec& spec, const InverseSolver& solver, double J) {
  require_current(J);
  if (spec.n < 2) throw std::invalid_argument("profile needs at least 2 samples");
  const cplx seg = spec.end - spec.start;
  const double l = std::abs(seg);
  if (!(l > 0.0)) throw std::invalid_argument("profile segment has zero length");
  const double k = solver.map().geometry().k;

  std::vector<double> s_values(static_cast<std::size_t>(spec.n));
  for (int i = 0; i < spec.n; ++i) {
    const double t = (i + 0.5) / spec.n;
    if (spec.spacing == Spacing::Uniform) {
      s_values[i] = l * t;
    } else {
      // Distance to the end point runs geometrically from ~l down to 1e-7 l.
      s_values[i] = l * (1.0 - std::pow(1e-7, t));
    }
  }
  std::vector<ProfileSample> out;
  out.reserve(s_values.size());
  cplx guess = 0.0;
  for (const double s : s_values) {
    const cplx z = spec.start + seg * (s / l);
    ProfileSample ps;
    ps.s = s;
    ps.s_over_l = s / l;
    const InverseResult r = guess == cplx(0.0) ? solver.invert(z) : solver.invert_near(z, guess);
    if (!r.converged) {
      std::ostringstream msg;
      msg << "profile inversion failed at s = " << s << " (residual " << r.residual << ")";
      throw InversionError(msg.str());
    }
    guess = r.z1;
    const DensityValue dv = density_from_preimage(r.z1, solver.map(), J);
    ps.j = dv.j;
    ps.divergent = dv.divergent;
    ps.j_scaled = dv.j * k / J;
    out.push_back(ps);
  }
  return out;
}

FluxResult flux_across(cplx p0, cplx p1, const InverseSolver& solver, double J) {
  require_current(J);
  const double wall_tol = 1e-7;
  if (solver.locate(p0, wall_tol) != Region::Boundary || solver.locate(p1, wall_tol) != Region::Boundary) {
    throw std::invalid_argument("flux cross-section endpoints must lie on the conductor walls");
  }
  const cplx seg = p1 - p0;
  const cplx normal = cplx(0.0, 1.0) * seg / std::abs(seg);
  const ConformalMap& map = solver.map();
  // s = v^2 (3 - 2v) clusters nodes at both ends, which tames the
  // integrable d^(-p/(1+p)) growth when an endpoint is a sharp corner.
  const auto integrand = [&](double v) -> cplx {
    const double s = v * v * (3.0 - 2.0 * v);
    const double ds = 6.0 * v * (1.0 - v);
    if (ds == 0.0) return 0.0;
    const cplx z = p0 + seg * s;
    const InverseResult r = solver.invert(z);
    if (!r.converged) throw InversionError("flux integrand inversion failed");
    if (density_from_preimage(r.z1, map, J).divergent) return 0.0;
    const cplx jv = current_vector(r.z1, map, J);
    return dot(jv, normal) * std::abs(seg) * ds;
  };
  const QuadratureResult q = integrate_gk15(integrand, 0.0, 1.0, 1e-10 * J, 2000);
  return {q.value.real(), q.error_estimate};
}

namespace {

double zeta_low_end(const ConformalMap& map, const FarField& ff, double extent) {
  const BendGeometry& g = map.geometry();
  const CornerGeometry cg = corners(g);
  // Im z ~ Im(low_slope zeta + offset) with low_slope = i k / pi.
  const double y_target = std::min(cg.E.imag(), 0.0) - extent * g.k;
  return (y_target - ff.low_offset.imag()) / ff.low_slope.imag();
}

double zeta_high_end(const ConformalMap& map, const FarField& ff, double extent) {
  const BendGeometry& g = map.geometry();
  const CornerGeometry cg = corners(g);
  const double target = std::max(dot(cg.E, cg.direction), 0.0) + extent * g.h;
  // z . d ~ Re(conj(d) (C zeta + offset)), with conj(d) C = h / pi real.
  const double slope = (std::conj(cg.direction) * ff.high_slope).real();
  return (target - dot(ff.high_offset, cg.direction)) / slope;
}

}  // namespace

std::vector<Streamline> trace_streamlines(int count, const ConformalMap& map, double J,
                                          const TraceOptions& options) {
  const FieldPotential fp = field_potential(J);
  if (count < 1) throw std::invalid_argument("streamline count must be at least 1");
  if (options.samples < 2) throw std::invalid_argument("streamlines need at least 2 samples");
  const FarField ff = far_field(map);
  const double lo = zeta_low_end(map, ff, options.arm_extent);
  const double hi = zeta_high_end(map, ff, options.arm_extent);
  std::vector<Streamline> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int i = 1; i <= count; ++i) {
    Streamline sl;
    sl.parameter = kPi * i / (count + 1);
    sl.level = fp.amplitude * sl.parameter;
    sl.points.reserve(static_cast<std::size_t>(options.samples));
    for (int s = 0; s < options.samples; ++s) {
      const double lr = lo + (hi - lo) * s / (options.samples - 1);
      sl.points.push_back(map.position(std::exp(cplx(lr, sl.parameter))));
    }
    out.push_back(std::move(sl));
  }
  return out;
}

std::vector<Streamline> trace_equipotentials(const std::vector<double>& log_radii,
                                             const ConformalMap& map, double J, int samples) {
  const FieldPotential fp = field_potential(J);
  if (samples < 2) throw std::invalid_argument("equipotentials need at least 2 samples");
  std::vector<Streamline> out;
  out.reserve(log_radii.size());
  for (const double lr : log_radii) {
    Streamline sl;
    sl.parameter = lr;
    sl.level = -fp.amplitude * lr;
    for (int s = 0; s < samples; ++s) {
      const double th = kPi * s / (samples - 1);
      sl.points.push_back(map.position(std::polar(std::exp(lr), th)));
    }
    out.push_back(std::move(sl));
  }
  return out;
}

std::vector<double> default_equipotential_levels(const ConformalMap& map, int count) {
  if (count < 1) return {};
  const FarField ff = far_field(map);
  const double lo = zeta_low_end(map, ff, 1.0);
  const double hi = zeta_high_end(map, ff, 1.0);
  std::vector<double> out;
  for (int i = 0; i < count; ++i) out.push_back(lo + (hi - lo) * (i + 0.5) / count);
  return out;
}

}  // namespace thinbend
