#include <cmath>
#include <vector>

#include "doctest.h"
#include "oracles.hpp"
#include "sievelab/geometry.hpp"
#include "sievelab/util.hpp"

using namespace sievelab;

TEST_CASE("interface canonicalization is orientation independent") {
  Interface fwd = build_interface({-1.0, 0.0}, {1.0, 0.0});
  Interface rev = build_interface({1.0, 0.0}, {-1.0, 0.0});
  CHECK(fwd.a.x == rev.a.x);
  CHECK(fwd.b.x == rev.b.x);
  CHECK(fwd.normal.y > 0.0);
  CHECK(rev.normal.y > 0.0);
  // right-handed pair: tangent is the normal rotated by -90 degrees
  CHECK(fwd.tangent.x == doctest::Approx(fwd.normal.y));
  CHECK(fwd.tangent.y == doctest::Approx(-fwd.normal.x));
  CHECK(fwd.half_width == doctest::Approx(1.0));
  CHECK(fwd.length() == doctest::Approx(2.0));
  CHECK(fwd.flat());
}

TEST_CASE("vertical interface picks the nu.x > 0 tie break") {
  Interface itf = build_interface({0.0, 0.0}, {0.0, 1.0});
  CHECK(itf.normal.y == doctest::Approx(0.0));
  CHECK(itf.normal.x > 0.0);
  CHECK(itf.length() == doctest::Approx(1.0));
}

TEST_CASE("profile is re-centered so phi(center) = 0") {
  // constant-ish profile: after re-centering the midpoint offset vanishes
  Interface itf = build_interface({-1.0, 0.0}, {1.0, 0.0}, {0.1, 0.2, 0.1});
  CHECK(itf.profile[1] == doctest::Approx(0.0));
  CHECK(itf.profile[0] == doctest::Approx(-0.1));
  CHECK(itf.profile_at_base(1.0) == doctest::Approx(0.0));
  CHECK_FALSE(itf.flat());
  // the polyline is longer than the base segment once curved
  CHECK(itf.length() > 2.0);
}

TEST_CASE("profile amplitude limits are enforced after re-centering") {
  // r0 = 1: values must stay within (-0.25, 0.25); 0.3 - 0.0 violates
  CHECK_THROWS_AS(build_interface({-1.0, 0.0}, {1.0, 0.0}, {0.0, 0.3, 0.0}), GeometryError);
  // re-centering can push an otherwise admissible sample out of range
  CHECK_THROWS_AS(build_interface({-1.0, 0.0}, {1.0, 0.0}, {0.2, -0.2, 0.2}, false),
                  GeometryError);
  CHECK_THROWS_AS(build_interface({0.0, 0.0}, {0.0, 0.0}), GeometryError);
  // oblique bases are fine here; only the mesher requires axis alignment
  Interface diag = build_interface({0.0, 0.0}, {1.0, 1.0});
  CHECK(norm(diag.normal) == doctest::Approx(1.0));
  CHECK(diag.normal.y > 0.0);
}

TEST_CASE("point_at and arc_of_base on a flat interface") {
  Interface itf = build_interface({-1.0, 2.0}, {1.0, 2.0});
  Vec2 p = itf.point_at(0.5);
  CHECK(p.x == doctest::Approx(-0.5));
  CHECK(p.y == doctest::Approx(2.0));
  CHECK(itf.arc_of_base(0.75) == doctest::Approx(0.75));
  CHECK(itf.point_at(itf.length()).x == doctest::Approx(1.0));
}

TEST_CASE("decay laws") {
  DecayLaw pow{2.0, 1.0, DecayLaw::Form::Power};
  CHECK(pow.at(1) == doctest::Approx(2.0));
  CHECK(pow.at(4) == doctest::Approx(0.5));
  DecayLaw exp{1.0, std::log(2.0), DecayLaw::Form::Exp};
  CHECK(exp.at(3) == doctest::Approx(0.125));
  CHECK_THROWS_AS(pow.at(0), GeometryError);
  DecayLaw bad_c{0.0, 1.0, DecayLaw::Form::Power};
  CHECK_THROWS_AS(bad_c.validate("k"), GeometryError);
  DecayLaw bad_a{1.0, -0.5, DecayLaw::Form::Power};
  CHECK_THROWS_AS(bad_a.validate("k"), GeometryError);
  CHECK_THROWS_WITH(bad_c.validate("sieve.gap"), doctest::Contains("sieve.gap"));
}

TEST_CASE("domain checks") {
  Domain d{-1.0, 1.0, 0.0, 2.0};
  CHECK(d.width() == doctest::Approx(2.0));
  CHECK(d.contains({0.0, 1.0}));
  CHECK_FALSE(d.contains({0.0, 2.5}));
  Domain bad{1.0, 1.0, 0.0, 2.0};
  CHECK_THROWS_AS(bad.validate(), GeometryError);
}

TEST_CASE("strip of a flat interface is an exact rectangle band") {
  Interface itf = build_interface({-1.0, 0.0}, {1.0, 0.0});
  StripRegion s = strip(itf, 0.25);
  CHECK(s.area() == doctest::Approx(2.0 * 0.25 * 2.0));
  CHECK(polygon_area(s.polygon) > 0.0);  // CCW
  REQUIRE(s.plus.size() == s.minus.size());
  for (std::size_t i = 0; i < s.plus.size(); ++i) {
    CHECK(s.plus[i].y == doctest::Approx(0.25));
    CHECK(s.minus[i].y == doctest::Approx(-0.25));
  }
  CHECK_THROWS_AS(strip(itf, 0.5), GeometryError);   // rho >= r0/2
  CHECK_THROWS_AS(strip(itf, 0.0), GeometryError);
}

TEST_CASE("crack sieve intervals match the trailing-gap layout") {
  Interface itf = build_interface({0.0, 0.0}, {2.0, 0.0});
  SieveSpec spec;
  spec.kind = SieveKind::CrackSieve;
  spec.period = {1.0, std::log(2.0), DecayLaw::Form::Exp};  // eps_j = 2^-j
  spec.gap = {0.5, std::log(2.0), DecayLaw::Form::Exp};     // delta_j = eps_j / 2
  spec.validate();
  for (int j = 1; j <= 4; ++j) {
    CompactSet k = sieve_at(spec, itf, j);
    REQUIRE(k.kind == CompactSet::Kind::CrackSubset);
    CHECK(k.j == j);
    CHECK(k.max_distance == doctest::Approx(0.0));
    auto walls = oracle::crack_walls(itf.length(), spec.period.at(j), spec.gap.at(j));
    REQUIRE(k.intervals.size() == walls.size());
    double wall_total = 0.0;
    for (std::size_t i = 0; i < walls.size(); ++i) {
      CHECK(k.intervals[i].s0 == doctest::Approx(walls[i].first).epsilon(1e-12));
      CHECK(k.intervals[i].s1 == doctest::Approx(walls[i].second).epsilon(1e-12));
      wall_total += k.intervals[i].len();
    }
    // gap fraction 1/2 covers half of every full period
    CHECK(wall_total == doctest::Approx(itf.length() / 2.0));
  }
}

TEST_CASE("crack sieve with a partial trailing period keeps it walled") {
  Interface itf = build_interface({0.0, 0.0}, {1.0, 0.0});  // L = 1
  SieveSpec spec;
  spec.kind = SieveKind::CrackSieve;
  spec.period = {0.4, 0.0, DecayLaw::Form::Power};  // constant laws
  spec.gap = {0.1, 0.0, DecayLaw::Form::Power};
  CompactSet k = sieve_at(spec, itf, 1);
  auto walls = oracle::crack_walls(1.0, 0.4, 0.1);
  REQUIRE(k.intervals.size() == walls.size());
  // trailing partial period [0.8, 1.0] is all wall
  CHECK(k.intervals.back().s0 == doctest::Approx(0.8));
  CHECK(k.intervals.back().s1 == doctest::Approx(1.0));
}

TEST_CASE("empty and slab sieves") {
  Interface itf = build_interface({-1.0, 0.0}, {1.0, 0.0});
  SieveSpec empty;  // default Empty
  CompactSet none = sieve_at(empty, itf, 3);
  CHECK(none.intervals.empty());
  CHECK(none.polygons.empty());
  CHECK(none.max_distance == doctest::Approx(0.0));

  SieveSpec slab;
  slab.kind = SieveKind::FullSlab;
  slab.thickness = {0.1, 0.0, DecayLaw::Form::Power};
  CompactSet k = sieve_at(slab, itf, 2);
  REQUIRE(k.kind == CompactSet::Kind::Polygon);
  REQUIRE(k.polygons.size() == 1);
  CHECK(polygon_area(k.polygons[0]) == doctest::Approx(2.0 * 0.1));
  CHECK(k.max_distance == doctest::Approx(0.05));
  CHECK(slab.max_distance_law(2) == doctest::Approx(0.05));
}

TEST_CASE("perforated slab carves gap columns through the slab") {
  Interface itf = build_interface({0.0, 0.0}, {2.0, 0.0});
  SieveSpec spec;
  spec.kind = SieveKind::PerforatedSlab;
  spec.period = {0.5, 0.0, DecayLaw::Form::Power};
  spec.gap = {0.25, 0.0, DecayLaw::Form::Power};
  spec.thickness = {0.1, 0.0, DecayLaw::Form::Power};
  CompactSet k = sieve_at(spec, itf, 1);
  REQUIRE(k.kind == CompactSet::Kind::Polygon);
  CHECK(k.polygons.size() == 4);  // one block per full period
  double area = 0.0;
  for (const auto& poly : k.polygons) area += polygon_area(poly);
  CHECK(area == doctest::Approx(4 * 0.25 * 0.1));
}

TEST_CASE("sieve validation rejects broken laws") {
  SieveSpec spec;
  spec.kind = SieveKind::CrackSieve;
  spec.period = {1.0, 1.0, DecayLaw::Form::Power};
  spec.gap = {0.0, 1.0, DecayLaw::Form::Power};  // c must be positive
  CHECK_THROWS_AS(spec.validate(), GeometryError);
}

TEST_CASE("shoelace area and point location") {
  std::vector<Vec2> tri{{0.0, 0.0}, {2.0, 0.0}, {0.0, 2.0}};
  CHECK(polygon_area(tri) == doctest::Approx(2.0));
  CHECK(polygon_area(tri) ==
        doctest::Approx(oracle::shoelace({{0.0, 0.0}, {2.0, 0.0}, {0.0, 2.0}})));
  CHECK(point_in_polygon({0.5, 0.5}, tri));
  CHECK_FALSE(point_in_polygon({2.0, 2.0}, tri));
  std::vector<Vec2> square{{0.0, 0.0}, {1.0, 0.0}, {1.0, 1.0}, {0.0, 1.0}};
  CHECK(point_in_polygon({0.25, 0.75}, square));
  CHECK_FALSE(point_in_polygon({1.5, 0.5}, square));
}
