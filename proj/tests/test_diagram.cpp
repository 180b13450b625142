#include <doctest.h>

#include "optlim/diagram.hpp"
#include "optlim/pipeline.hpp"

using namespace optlim;

TEST_CASE("parse standard PD codes") {
  auto tre = parse_pd("X(1,4,2,5) X(3,6,4,1) X(5,2,6,3)");
  CHECK(tre.n() == 3);
  CHECK(tre.arc_count == 6);
  CHECK(tre.sign(0) == tre.sign(1));
  CHECK(tre.sign(1) == tre.sign(2));

  auto fig8 = parse_pd("X(4,2,5,1) X(8,6,1,5) X(6,3,7,4) X(2,7,3,8)");
  CHECK(fig8.n() == 4);
  int writhe = 0;
  for (int ci = 0; ci < 4; ++ci) writhe += fig8.sign(ci);
  CHECK(writhe == 0);
}

TEST_CASE("parse errors") {
  CHECK_THROWS_AS(parse_pd(""), ParseError);
  CHECK_THROWS_AS(parse_pd("Y(1,2,3,4)"), ParseError);
  CHECK_THROWS_AS(parse_pd("X(1,2,3)"), ParseError);
  // single-crossing kink is rejected outright
  CHECK_THROWS_AS(parse_pd("X(1,1,2,2)"), ValidationError);
  // arc multiplicity
  CHECK_THROWS_AS(parse_pd("X(1,4,2,5) X(3,6,4,1) X(5,2,6,5)"), ValidationError);
  // two-component link: arc orientations cannot close a single curve
  CHECK_THROWS_AS(
      parse_pd("X(1,5,2,6) X(3,7,4,8) X(5,1,6,2) X(7,3,8,4)"), ValidationError);
}

TEST_CASE("comments and header") {
  auto d = parse_pd("# a comment\nknot 4_1\nX(4,2,5,1) X(8,6,1,5)\nX(6,3,7,4) X(2,7,3,8)\n");
  CHECK(d.name == "4_1");
  CHECK(d.n() == 4);
  // canonical text round-trips
  auto d2 = parse_pd(d.canonical_pd_text());
  CHECK(d2.canonical_pd_text() == d.canonical_pd_text());
}

TEST_CASE("trefoil fails on every split side") {
  auto tre = parse_pd(bundled_fixtures().at("3_1"));
  for (int a = 1; a <= tre.arc_count; ++a) {
    bool rejected = false;
    try {
      auto t = open_tangle(tre, a);
      rejected = !check_assumptions(t).empty();
    } catch (const EndpointClash&) {
      rejected = true;
    } catch (const AssumptionViolation&) {
      rejected = true;
    }
    CHECK(rejected);
  }
  CHECK_THROWS_AS(auto_open(tre), AssumptionViolation);
}

TEST_CASE("figure-eight opening") {
  auto d = parse_pd(bundled_fixtures().at("4_1"));
  auto t = auto_open(d);
  CHECK(t.i_endpoint != t.j_endpoint);
  CHECK(check_assumptions(t).empty());
  // exactly two trivalent vertices among the survivors
  int triv = 0;
  for (int ci : t.alive) triv += t.trivalent(ci) ? 1 : 0;
  CHECK(triv == 2);
  // Euler relation for G: vertices - sides + regions = 2
  int V = static_cast<int>(t.alive.size());
  int E = static_cast<int>(t.gsides.size());
  int F = static_cast<int>(t.regions.size());
  CHECK(V - E + F == 2);
  // every alive crossing keeps >= 1 surviving tetrahedron marker
  for (int ci : t.alive) {
    int live_corners = 0;
    for (int i = 0; i < 4; ++i)
      if (!t.corner_merged_away(ci, i) && t.corner_region(ci, i) != t.unbounded)
        ++live_corners;
    CHECK(live_corners >= 1);
  }
}

TEST_CASE("variable assignment") {
  auto d = parse_pd(bundled_fixtures().at("4_1"));
  auto t = auto_open(d);
  auto va = assign_variables(t);
  CHECK(va.m == static_cast<int>(t.regions.size()) - 2);  // unit + unbounded
  CHECK(va.g >= 1);
  CHECK(va.region_kind(t.unbounded) == RegionKind::Zero);
  CHECK(va.region_kind(va.unit_region) == RegionKind::Unit);
  CHECK_THROWS_AS(assign_variables(t, t.unbounded), InvalidRegion);
  // the unbounded region touches no contributing side
  for (int rep : t.gsides)
    if (t.side_contributing(rep))
      CHECK(va.side_kind_of_rep(rep) == SideKind::Var);
}

TEST_CASE("every side borders exactly two regions") {
  for (const char* k : {"4_1", "5_2", "6_1", "6_2", "6_3"}) {
    auto d = parse_pd(bundled_fixtures().at(k));
    auto t = auto_open(d);
    for (int a = 1; a <= d.arc_count; ++a) {
      if (t.deleted_arcs.count(a)) continue;
      auto [e0, e1] = std::pair{d.arc_ends(a)[0], d.arc_ends(a)[1]};
      int f0 = t.face_root[t.dart_face[e0.first * 4 + e0.second]];
      int f1 = t.face_root[t.dart_face[e1.first * 4 + e1.second]];
      // the two flanks are well defined region representatives
      CHECK(f0 >= 0);
      CHECK(f1 >= 0);
    }
  }
}

TEST_CASE("open_tangle respects an explicit side") {
  auto d = parse_pd(bundled_fixtures().at("5_2"));
  auto t = auto_open(d);
  auto t2 = open_tangle(d, t.cut_arc);
  CHECK(t2.i_endpoint == t.i_endpoint);
  CHECK(t2.j_endpoint == t.j_endpoint);
}
