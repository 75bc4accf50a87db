#include <cmath>
#include <numbers>
#include <numeric>

#include "doctest.h"
#include "thinbend/geometry.hpp"

using namespace thinbend;

TEST_CASE("make_angle converts the standard bend angles to reduced fractions") {
  const RationalAngle a60 = make_angle(60.0);
  CHECK(a60.p() == 2);
  CHECK(a60.q() == 3);
  CHECK(a60.beta() == doctest::Approx(1.0 / 3.0));
  const RationalAngle a120 = make_angle(120.0);
  CHECK(a120.p() == 1);
  CHECK(a120.q() == 3);
  const RationalAngle a90 = make_angle(90.0);
  CHECK(a90.p() == 1);
  CHECK(a90.q() == 2);
  const RationalAngle a30 = make_angle(30.0);
  CHECK(a30.p() == 5);
  CHECK(a30.q() == 6);
}

TEST_CASE("make_angle round trip is exact for representable angles") {
  for (int q = 2; q <= 64; ++q) {
    for (int p = 1; p < q; ++p) {
      if (std::gcd(p, q) != 1) continue;
      const RationalAngle a(p, q);
      const RationalAngle back = make_angle(a.degrees());
      CHECK(back == a);
    }
  }
}

TEST_CASE("make_angle rejects out-of-range and unrepresentable angles") {
  CHECK_THROWS_AS(make_angle(0.0), GeometryError);
  CHECK_THROWS_AS(make_angle(180.0), GeometryError);
  CHECK_THROWS_AS(make_angle(-10.0), GeometryError);
  CHECK_THROWS_AS(make_angle(std::nan("")), GeometryError);
  // 180/sqrt(2) degrees is irrational; the nearest Q <= 64 angle is reported.
  try {
    make_angle(180.0 / std::numbers::sqrt2);
    FAIL("expected an error");
  } catch (const GeometryError& e) {
    CHECK(std::string(e.what()).find("nearest representable angle") != std::string::npos);
  }
  // A looser tolerance accepts the approximation.
  const RationalAngle approx = make_angle(180.0 / std::numbers::sqrt2, 64, 0.1);
  CHECK(std::abs(approx.degrees() - 180.0 / std::numbers::sqrt2) < 0.1);
  CHECK(approx.q() <= 64);
}

TEST_CASE("RationalAngle enforces its invariants") {
  CHECK_THROWS_AS(RationalAngle(0, 3), GeometryError);
  CHECK_THROWS_AS(RationalAngle(3, 3), GeometryError);
  CHECK_THROWS_AS(RationalAngle(2, 4), GeometryError);
  const RationalAngle a(5, 6);
  CHECK(a.exponent() + a.beta() == doctest::Approx(1.0));
  CHECK(a.radians() == doctest::Approx(std::numbers::pi / 6.0));
}

TEST_CASE("validate keeps h >= k and mirrors h < k") {
  const BendGeometry g{2.0, 1.0, RationalAngle(2, 3), 1.0};
  const NormalizedGeometry n = validate(g);
  CHECK_FALSE(n.mirrored);
  CHECK(n.geometry == g);

  const BendGeometry swapped{1.0, 2.0, RationalAngle(2, 3), 1.0};
  const NormalizedGeometry m = validate(swapped);
  CHECK(m.mirrored);
  CHECK(m.geometry.h == 2.0);
  CHECK(m.geometry.k == 1.0);

  const NormalizedGeometry twice = validate(m);
  CHECK(twice.mirrored == m.mirrored);
  CHECK(twice.geometry == m.geometry);

  CHECK_THROWS_AS(validate(BendGeometry{0.0, 1.0, RationalAngle(2, 3), 1.0}), GeometryError);
  CHECK_THROWS_AS(validate(BendGeometry{1.0, -1.0, RationalAngle(2, 3), 1.0}), GeometryError);
  CHECK_THROWS_AS(validate(BendGeometry{1.0, 1.0, RationalAngle(2, 3), 0.0}), GeometryError);
}

TEST_CASE("mirror reflection is an involution that swaps the arm directions") {
  const BendGeometry g{2.0, 1.0, RationalAngle(2, 3), 1.0};
  NormalizedGeometry n{g, true};
  const cplx z(0.3, -1.7);
  const cplx back = n.to_internal(n.to_user(z));
  CHECK(std::abs(back - z) < 1e-15);
  const CornerGeometry cg = corners(g);
  // The narrow-arm direction -i maps to the wide-arm direction d.
  CHECK(std::abs(n.to_user(cplx(0.0, -1.0)) - cg.direction) < 1e-15);
}

TEST_CASE("corner E matches the closed-form coordinates") {
  const CornerGeometry cg = corners(BendGeometry{2.0, 1.0, RationalAngle(2, 3), 1.0});
  CHECK(cg.E.real() == doctest::Approx(1.0));
  CHECK(cg.E.imag() == doctest::Approx(-2.886751346).epsilon(1e-9));
  CHECK(std::abs(cg.B) == 0.0);
}
