// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails. Usage: acceptance <path-to-thinbend_cli>
#include <unistd.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

#include "test_support.hpp"
#include "thinbend/density.hpp"
#include "thinbend/hand_coded.hpp"
#include "thinbend/inverse.hpp"
#include "thinbend/quadrature.hpp"
#include "thinbend/rounding.hpp"
#include "thinbend/sc_map.hpp"

using namespace thinbend;
using thinbend::testing::random_upper_points;
using thinbend::testing::scaled_error;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

BendGeometry geom(int p, int q, double h, double k = 1.0, double J = 1.0) {
  return BendGeometry{h, k, RationalAngle(p, q), J};
}

// The three explicit angles at their reference aspect ratios.
struct ExplicitCase {
  ExplicitAngle which;
  BendGeometry g;
};
std::vector<ExplicitCase> explicit_cases() {
  return {{ExplicitAngle::Deg60, geom(2, 3, 2.0)},
          {ExplicitAngle::Deg30, geom(5, 6, 2.0)},
          {ExplicitAngle::Deg120, geom(1, 3, 1.5)}};
}

double slope(const std::vector<double>& x, const std::vector<double>& y) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

double dot(cplx a, cplx b) { return a.real() * b.real() + a.imag() * b.imag(); }

Outcome c1_hand_coded() {
  double worst = 0.0;
  for (const auto& pc : explicit_cases()) {
    const MapConstants c = compute_constants(pc.g);
    for (const cplx z1 : random_upper_points(20, 101 + static_cast<int>(pc.which))) {
      worst = std::max(worst, scaled_error(hand_coded_map(z1, pc.g, pc.which), forward_map(z1, c), pc.g.k));
    }
  }
  return {worst < 1e-9, "max relative error " + fmt("%.2e", worst) + " (60/30/120 deg, 20 points each)"};
}

Outcome c2_quadrature() {
  double worst = 0.0;
  for (auto [p, q] : std::vector<std::pair<int, int>>{{2, 3}, {5, 6}, {1, 3}, {1, 2}, {3, 4}}) {
    const BendGeometry g = geom(p, q, 2.0);
    const MapConstants c = compute_constants(g);
    for (const cplx z1 : random_upper_points(100, 7 * p + 13 * q)) {
      worst = std::max(worst, scaled_error(forward_map(z1, c), forward_map_quadrature(z1, c).value, g.k));
    }
  }
  return {worst < 1e-9, "max relative error " + fmt("%.2e", worst) + " over 5 angles x 100 points"};
}

Outcome c3_boundary() {
  double wall = 0.0, width = 0.0;
  for (const auto& pc : explicit_cases()) {
    const BendGeometry& g = pc.g;
    const MapConstants c = compute_constants(g);
    const CornerGeometry cg = corners(g);
    for (int e = -8; e <= 8; ++e) {
      const double s = std::pow(10.0, 0.5 * e);
      wall = std::max(wall, std::abs(dot(forward_map(-c.a * (1.0 + s), c), cg.normal)));
      wall = std::max(wall, std::abs(forward_map(-c.a / (1.0 + s), c).real()));
      wall = std::max(wall, std::abs(forward_map(1.0 / (1.0 + s), c).real() - g.k));
      wall = std::max(wall, std::abs(dot(forward_map(1.0 + s, c), cg.normal) + g.h));
    }
    const double wk = forward_map(1e-9, c).real() - forward_map(-1e-9, c).real();
    const double wh = dot(forward_map(-1e9, c) - forward_map(1e9, c), cg.normal);
    width = std::max({width, std::abs(wk / g.k - 1.0), std::abs(wh / g.h - 1.0)});
  }
  return {wall < 1e-8 && width < 1e-6,
          "max wall distance " + fmt("%.2e", wall) + " k, max width error " + fmt("%.2e", width)};
}

Outcome c4_corner() {
  double worst = 0.0;
  for (const auto& pc : explicit_cases()) {
    const BendGeometry& g = pc.g;
    const double a = g.alpha.radians();
    // The corner coordinates written out directly.
    const cplx expected(g.k, -(g.h + g.k * std::cos(a)) / std::sin(a));
    worst = std::max(worst, std::abs(forward_map(1.0, compute_constants(g)) - expected) / g.k);
    worst = std::max(worst, std::abs(forward_map(1.0 + cplx(1e-14, 1e-14), compute_constants(g)) -
                                     expected) / g.k);
  }
  const cplx e60 = forward_map(1.0, compute_constants(geom(2, 3, 2.0)));
  const double ex = std::abs(e60 - cplx(1.0, -2.886751346)) ;
  return {worst < 1e-8 && ex < 1e-9,
          "max |z(1) - E| " + fmt("%.2e", worst) + " k; 60 deg E = (" + fmt("%.10f", e60.real()) +
              ", " + fmt("%.10f", e60.imag()) + ")"};
}

Outcome c5_far_field() {
  double worst = 0.0;
  for (const auto& pc : explicit_cases()) {
    const BendGeometry& g = pc.g;
    const InverseSolver solver(std::make_shared<SharpMap>(g));
    const CornerGeometry cg = corners(g);
    const double low = density_at_point(cplx(0.5 * g.k, cg.E.imag() - 50.0 * g.k), solver, g.J).j;
    const cplx deep = (dot(cg.E, cg.direction) + 50.0 * g.k) * cg.direction - 0.5 * g.h * cg.normal;
    const double high = density_at_point(deep, solver, g.J).j;
    worst = std::max({worst, std::abs(low / (g.J / g.k) - 1.0), std::abs(high / (g.J / g.h) - 1.0)});
  }
  return {worst < 1e-3, "max relative deviation from J/k and J/h " + fmt("%.2e", worst)};
}

Outcome c6_flux() {
  double worst = 0.0;
  for (const auto& pc : explicit_cases()) {
    const BendGeometry& g = pc.g;
    const InverseSolver solver(std::make_shared<SharpMap>(g));
    const CornerGeometry cg = corners(g);
    const double y = cg.E.imag() - 20.0 * g.k;
    const double low = flux_across(cplx(0.0, y), cplx(g.k, y), solver, g.J).current;
    const cplx p0 = (dot(cg.E, cg.direction) + 20.0 * g.h) * cg.direction;
    const double high = flux_across(p0, p0 - g.h * cg.normal, solver, g.J).current;
    worst = std::max({worst, std::abs(low / g.J - 1.0), std::abs(high / g.J - 1.0)});
  }
  return {worst < 1e-6, "max relative flux error " + fmt("%.2e", worst)};
}

Outcome c7_exponent() {
  bool ok = true;
  std::ostringstream d;
  for (const auto& pc : explicit_cases()) {
    const BendGeometry& g = pc.g;
    const InverseSolver solver(std::make_shared<SharpMap>(g));
    const CornerGeometry cg = corners(g);
    const cplx toward_b = (cg.B - cg.E) / std::abs(cg.B - cg.E);
    std::vector<double> lx, ly;
    for (double e = -5.0; e <= -2.0 + 1e-9; e += 0.25) {
      const double dist = std::pow(10.0, e) * g.k;
      lx.push_back(std::log(dist));
      ly.push_back(std::log(density_at_point(cg.E + dist * toward_b, solver, g.J).j));
    }
    const double beta = g.alpha.beta();
    const double expected = -(1.0 - beta) / (2.0 - beta);
    const double fit = slope(lx, ly);
    ok = ok && std::abs(fit / expected - 1.0) < 0.02;
    d << g.alpha.degrees() << " deg: " << fmt("%.4f", fit) << " vs " << fmt("%.4f", expected) << "; ";
  }
  return {ok, d.str()};
}

Outcome c8_gamma_zero() {
  double worst = 0.0;
  bool constants = true;
  for (auto [p, q] : std::vector<std::pair<int, int>>{{2, 3}, {5, 6}, {1, 3}, {1, 2}, {3, 4}}) {
    const BendGeometry g = geom(p, q, 2.0);
    const MapConstants c = compute_constants(g);
    const RoundedMapConstants r = rounded_constants(g, 0.1, 0.2, 0.0);
    constants = constants && std::abs(r.aTilde - c.a) <= 1e-12 * c.a &&
                std::abs(r.CTilde - c.C) <= 1e-12 * std::abs(c.C);
    for (const cplx z1 : random_upper_points(50, 31 * p + q)) {
      worst = std::max(worst, scaled_error(rounded_forward(z1, r), forward_map(z1, c), g.k));
    }
  }
  return {constants && worst < 1e-12,
          std::string(constants ? "constants equal" : "constants differ") + ", max pointwise error " +
              fmt("%.2e", worst)};
}

Outcome c9_reference_rounding() {
  struct Case {
    BendGeometry g;
    double rho;
  };
  const std::vector<Case> cases{{geom(1, 3, 1.5), 0.1}, {geom(2, 3, 2.0), 0.02}, {geom(5, 6, 2.0), 0.011}};
  bool ok = true;
  std::ostringstream d;
  for (const auto& c : cases) {
    const RoundingSolution s = solve_rounding(c.g, c.rho);
    const bool good = s.residual_norm < 1e-8 && std::isfinite(s.j_corner) && s.feasible;
    ok = ok && good;
    d << c.g.alpha.degrees() << " deg rho=" << c.rho << ": residual " << fmt("%.2e", s.residual_norm)
      << " (" << to_string(s.status) << "); ";
  }
  return {ok, d.str()};
}

Outcome c10_feasibility() {
  const double r120 = max_radius(geom(1, 3, 1.5), 1e-3).rho_max;
  const double r30 = max_radius(geom(5, 6, 2.0), 1e-3).rho_max;
  const bool ok = r120 >= 0.5 && r120 <= 1.0 && r30 >= 0.008 && r30 <= 0.02;
  return {ok, "rho_max(120 deg, h/k=1.5) = " + fmt("%.4g", r120) + " k (want [0.5, 1.0]); rho_max(30 deg, h/k=2) = " +
                  fmt("%.4g", r30) + " k (want [0.008, 0.02])"};
}

Outcome c11_sweep_shape() {
  bool ok = true;
  std::ostringstream d;
  for (const auto& pc : explicit_cases()) {
    const BendGeometry& g = pc.g;
    const double edge = max_radius(g, 1e-3).rho_max;
    const SweepResult sw = sweep(g, 0.02 * edge, 0.9 * edge, 15);
    bool shape = sw.solutions.size() >= 2;
    for (std::size_t i = 0; i < sw.solutions.size(); ++i) {
      shape = shape && sw.solutions[i].j_corner * g.k / g.J > 1.0;
      if (i > 0) shape = shape && sw.solutions[i].j_corner < sw.solutions[i - 1].j_corner;
    }
    ok = ok && shape;
    d << g.alpha.degrees() << " deg: " << sw.solutions.size() << " radii up to "
      << fmt("%.3g", sw.solutions.empty() ? 0.0 : sw.solutions.back().rho) << " k; ";
  }
  return {ok, d.str()};
}

Outcome c12_inversion() {
  double worst = 0.0, worst_corner = 0.0;
  for (const auto& pc : explicit_cases()) {
    const BendGeometry& g = pc.g;
    auto map = std::make_shared<SharpMap>(g);
    const InverseSolver solver(map);
    for (const cplx z1 : random_upper_points(200, 900 + static_cast<int>(pc.which))) {
      const InverseResult r = solver.invert(map->position(z1));
      worst = std::max(worst, r.converged ? std::abs(r.z1 - z1) / std::abs(z1) : HUGE_VAL);
    }
    const cplx E = corners(g).E;
    for (double rr : {1e-3, 1e-4, 1e-5, 1e-6, 1e-7}) {
      for (double th : {0.05, 0.8, 1.6, 2.4, 3.1}) {
        const cplx z1 = 1.0 + std::polar(rr, th);
        const cplx z = map->position(z1);
        if (std::abs(z - E) >= 1e-3 * g.k) continue;
        const InverseResult r = solver.invert(z);
        worst_corner = std::max(worst_corner, r.converged ? std::abs(r.z1 - z1) : HUGE_VAL);
      }
    }
  }
  return {worst < 1e-9 && worst_corner < 1e-6,
          "max relative preimage error " + fmt("%.2e", worst) + "; near E " + fmt("%.2e", worst_corner)};
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream f(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

Outcome c13_determinism(const std::string& cli) {
  if (cli.empty()) return {false, "no CLI path given"};
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / ("thinbend_acceptance_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  const std::vector<std::pair<std::string, std::string>> runs{
      {"map --alpha 60 --h 2 --k 1 --nx 25 --ny 25 --threads 3", "csv"},
      {"map --alpha 120 --h 1.5 --k 1 --nx 15 --ny 15 --format svg", "svg"},
      {"streamlines --alpha 60 --h 2 --k 1 --lines 7", "svg"},
      {"profile --alpha 30 --h 2 --k 1 --n 50 --spacing refined", "csv"},
      {"round-sweep --alpha 60 --h 2 --k 1 --rho-max 0.0002 --n 8", "csv"},
  };
  bool ok = true;
  std::size_t bytes = 0;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    std::string first;
    for (int rep = 0; rep < 2; ++rep) {
      const fs::path out = dir / ("run" + std::to_string(i) + "_" + std::to_string(rep) + "." + runs[i].second);
      const std::string cmd = "\"" + cli + "\" " + runs[i].first + " --out \"" + out.string() + "\" > /dev/null";
      if (std::system(cmd.c_str()) != 0) {
        ok = false;
        continue;
      }
      const std::string content = slurp(out);
      if (rep == 0) {
        first = content;
        bytes += content.size();
        ok = ok && !content.empty();
      } else {
        ok = ok && content == first;
      }
    }
  }
  fs::remove_all(dir);
  return {ok, std::to_string(runs.size()) + " CSV/SVG runs repeated, " + std::to_string(bytes) + " bytes compared"};
}

}  // namespace

int main(int argc, char** argv) {
  const std::string cli = argc > 1 ? argv[1] : "";
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"closed form matches the explicit 60/30/120 degree formulas", c1_hand_coded},
      {"closed form matches contour quadrature", c2_quadrature},
      {"boundary conformity and arm widths", c3_boundary},
      {"corner E placement", c4_corner},
      {"far-field density normalization", c5_far_field},
      {"flux conservation", c6_flux},
      {"corner singularity exponent", c7_exponent},
      {"rounded map with gamma = 0 equals the sharp map", c8_gamma_zero},
      {"reference rounding radii solvable", c9_reference_rounding},
      {"maximal rounding radius brackets", c10_feasibility},
      {"corner density decreases with radius and exceeds far field", c11_sweep_shape},
      {"inversion round trip", c12_inversion},
      {"CLI output is byte-identical across runs", [&] { return c13_determinism(cli); }},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += o.pass ? 0 : 1;
    std::printf("%s %2zu %s -- %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(),
                o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%zu criteria, %d failed\n", criteria.size(), failed);
  return failed == 0 ? 0 : 1;
}
