#include <cmath>
#include <numbers>

#include "doctest.h"
#include "test_support.hpp"
#include "thinbend/inverse.hpp"

using namespace thinbend;
using thinbend::testing::geometry_for;
using thinbend::testing::random_upper_points;

TEST_CASE("round trip over random preimages") {
  for (auto [p, q] : std::vector<std::pair<int, int>>{{2, 3}, {5, 6}, {1, 3}, {1, 2}, {3, 4}}) {
    const BendGeometry g = geometry_for(p, q, q == 3 && p == 1 ? 1.5 : 2.0);
    auto map = std::make_shared<SharpMap>(g);
    const InverseSolver solver(map);
    int worst_iterations = 0;
    double worst = 0.0;
    for (const cplx z1 : random_upper_points(200, 4242 + p + 7 * q)) {
      const InverseResult r = solver.invert(map->position(z1));
      CHECK(r.converged);
      worst = std::max(worst, std::abs(r.z1 - z1) / std::abs(z1));
      worst_iterations = std::max(worst_iterations, r.iterations);
      CHECK(r.z1.imag() >= -1e-12);
    }
    INFO("P/Q = " << p << "/" << q);
    CHECK(worst < 1e-9);
    CHECK(worst_iterations <= 25);
  }
}

TEST_CASE("inversion of special points") {
  const BendGeometry g = geometry_for(2, 3);
  const MapConstants c = compute_constants(g);
  const CornerGeometry cg = corners(g);

  const InverseResult e = invert(cg.E, c);
  CHECK(e.converged);
  CHECK(std::abs(e.z1 - 1.0) < 1e-6);

  const cplx z2i = forward_map(cplx(0.0, 2.0), c);
  CHECK(std::abs(invert(z2i, c).z1 - cplx(0.0, 2.0)) < 1e-10);

  const InverseResult deep = invert(cplx(0.5 * g.k, -40.0 * g.k), c);
  CHECK(deep.converged);
  CHECK(std::abs(deep.z1) < 1e-20);
  CHECK(std::arg(deep.z1) == doctest::Approx(std::numbers::pi / 2).epsilon(1e-9));

  const cplx far_wide = 40.0 * g.h * cg.direction - 0.5 * g.h * cg.normal;
  const InverseResult wide = invert(far_wide, c);
  CHECK(wide.converged);
  CHECK(std::abs(wide.z1) > 1e20);

  // Beyond the outer corner B (outside both arms).
  CHECK_THROWS_AS(invert(cplx(-g.k, 0.5 * g.k), c), OutsideConductorError);
}

TEST_CASE("near-corner inversion meets the relaxed tolerance") {
  for (auto [p, q] : std::vector<std::pair<int, int>>{{2, 3}, {5, 6}, {1, 3}}) {
    const BendGeometry g = geometry_for(p, q);
    auto map = std::make_shared<SharpMap>(g);
    const InverseSolver solver(map);
    const cplx E = corners(g).E;
    for (double r : {1e-3, 1e-5, 1e-7}) {
      for (double th : {0.05, 1.0, 2.0, 3.1}) {
        const cplx z1 = 1.0 + std::polar(r, th);
        const cplx z = map->position(z1);
        REQUIRE(std::abs(z - E) < 1e-3 * g.k);
        const InverseResult res = solver.invert(z);
        CHECK(res.converged);
        CHECK(std::abs(res.z1 - z1) < 1e-6);
      }
    }
  }
}

TEST_CASE("region classification") {
  const BendGeometry g = geometry_for(2, 3);
  const MapConstants c = compute_constants(g);
  const CornerGeometry cg = corners(g);
  CHECK(locate_region(0.5 * cg.E, c) == Region::Inside);
  CHECK(locate_region(cplx(-g.k, 0.5 * g.k), c) == Region::Outside);
  // Past the inner corner E, between the extensions of the two inner walls.
  CHECK(locate_region(cg.E + 0.1 * g.k * (cg.direction + cplx(0.0, -1.0)), c) == Region::Outside);
  CHECK(locate_region(cplx(-0.1, -3.0), c) == Region::Outside);
  for (const double x : {-5.0, -0.3, 0.2, 0.9, 1.5, 30.0}) {
    const cplx zb = forward_map(cplx(x, 0.0), c);
    CHECK(locate_region(zb, c) == Region::Boundary);
  }
}

TEST_CASE("boundary points invert onto the real axis") {
  const BendGeometry g = geometry_for(2, 3);
  const MapConstants c = compute_constants(g);
  for (const double x : {-7.0, -1.0, 0.4, 3.0}) {
    const cplx zb = forward_map(cplx(x, 0.0), c);
    const InverseResult r = invert(zb + cplx(1e-11, 1e-11), c);
    CHECK(r.converged);
    CHECK(std::abs(r.z1.imag()) < 1e-9);
    CHECK(std::abs(r.z1.real() - x) < 1e-8 * std::abs(x));
  }
}

TEST_CASE("preimages vary continuously along interior segments") {
  const BendGeometry g = geometry_for(2, 3);
  auto map = std::make_shared<SharpMap>(g);
  const InverseSolver solver(map);
  const CornerGeometry cg = corners(g);
  // From the narrow arm through the middle of BE into the wide arm.
  const std::vector<cplx> knots = {cplx(0.5 * g.k, -5.0), 0.5 * cg.E,
                                   4.0 * cg.direction - 0.5 * g.h * cg.normal};
  cplx prev = solver.invert(knots.front()).z1;
  const int n = 400;
  for (std::size_t leg = 0; leg + 1 < knots.size(); ++leg) {
    const cplx a = knots[leg], b = knots[leg + 1];
    for (int i = 1; i <= n; ++i) {
      const cplx z = a + (b - a) * (static_cast<double>(i) / n);
      REQUIRE(solver.locate(z) == Region::Inside);
      const InverseResult r = solver.invert(z);
      REQUIRE(r.converged);
      // |dz1| ~ |dz| |z1| / |dz/dzeta|
      const double linear = std::abs((b - a) / static_cast<double>(n)) * std::abs(r.z1) /
                            std::abs(map->log_derivative(r.z1));
      CHECK(std::abs(r.z1 - prev) < 10.0 * linear);
      prev = r.z1;
    }
  }
}

TEST_CASE("rounded map inversion and classification") {
  const BendGeometry g = geometry_for(2, 3);
  const RoundedMapConstants rc = rounded_constants(g, 0.1, 0.1, 0.05);
  auto map = std::make_shared<RoundedMap>(rc);
  const InverseSolver solver(map);
  for (const cplx z1 : random_upper_points(200, 31337)) {
    const InverseResult r = solver.invert(map->position(z1));
    CHECK(r.converged);
    CHECK(std::abs(r.z1 - z1) < 1e-9 * std::abs(z1));
  }
  // z_R(1) sits outside the sharp conductor but inside the rounded one.
  const cplx e_prime = map->position(1.0);
  CHECK(locate_region(e_prime, compute_constants(g)) == Region::Outside);
  CHECK(solver.locate(e_prime) == Region::Boundary);
  const cplx inward = map->position(cplx(1.0, 0.01));
  CHECK(solver.locate(inward) == Region::Inside);
  CHECK(solver.locate(corners(g).E) == Region::Inside);
  CHECK(std::abs(solver.invert(corners(g).E).z1 - invert(corners(g).E, rc).z1) < 1e-12);
}
