#include <doctest.h>

#include <cmath>
#include <map>
#include <set>

#include "optlim/pipeline.hpp"
#include "optlim/rng.hpp"
#include "optlim/solver.hpp"
#include "optlim/triangulation.hpp"

using namespace optlim;

TEST_CASE("move_45 at the calibration point") {
  Cx i(0, 1);
  auto u = move_45({i, i, i, i});
  for (int k = 0; k < 4; ++k) CHECK(std::abs(u[static_cast<size_t>(k)] - i) < 1e-15);
  CHECK(std::abs(u[4] - Cx(-1, 0)) < 1e-15);
}

TEST_CASE("move_32 at the calibration point") {
  Cx w = std::polar(1.0, 2 * kPi / 3);
  auto u = move_32({w, w, w});
  Cx expect = std::polar(1.0, kPi / 3);
  CHECK(std::abs(u[0] - expect) < 1e-14);
  CHECK(std::abs(u[1] - expect) < 1e-14);
}

TEST_CASE("move round-trips and volume invariance") {
  Rng rng(99);
  double worst = 0;
  for (int s = 0; s < 3000; ++s) {
    // constrained sample t1 t2 t3 t4 = 1
    Cx t1, t2, t3, t4;
    for (;;) {
      t1 = rng.annulus(0.3, 2.0);
      t2 = rng.annulus(0.3, 2.0);
      t3 = rng.annulus(0.3, 2.0);
      t4 = 1.0 / (t1 * t2 * t3);
      if (std::abs(t4) > 0.05 && std::abs(t4 - 1.0) > 0.05 &&
          std::abs(t1 - 1.0) > 0.05 && std::abs(t2 - 1.0) > 0.05 &&
          std::abs(t3 - 1.0) > 0.05)
        break;
    }
    std::array<Cx, 5> u;
    try {
      u = move_45({t1, t2, t3, t4});
    } catch (const DegenerateShape&) {
      continue;
    }
    auto back = move_45_inverse(u);
    worst = std::max(worst, std::abs(back[0] - t1));
    worst = std::max(worst, std::abs(back[1] - t2));
    worst = std::max(worst, std::abs(back[2] - t3));
    worst = std::max(worst, std::abs(back[3] - t4));
    double dl = bloch_wigner(t1) + bloch_wigner(t2) + bloch_wigner(t3) +
                bloch_wigner(t4);
    double dr = 0;
    for (Cx v : u) dr += bloch_wigner(v);
    worst = std::max(worst, std::abs(dl - dr));
    CHECK(std::abs(u[4] - 1.0 / (u[0] * u[2])) < 1e-11 * std::abs(u[4]));
    CHECK(std::abs(u[4] - 1.0 / (u[1] * u[3])) < 1e-11 * std::abs(u[4]));
  }
  CHECK(worst < 1e-12);
}

TEST_CASE("move_32 volume identity") {
  Rng rng(7);
  double worst = 0;
  for (int s = 0; s < 3000; ++s) {
    Cx t1, t2, t4;
    for (;;) {
      t1 = rng.annulus(0.3, 2.0);
      t2 = rng.annulus(0.3, 2.0);
      t4 = 1.0 / (t1 * t2);
      if (std::abs(t4) > 0.05 && std::abs(t4 - 1.0) > 0.05 &&
          std::abs(t1 - 1.0) > 0.05 && std::abs(t2 - 1.0) > 0.05)
        break;
    }
    std::array<Cx, 2> u;
    try {
      u = move_32({t1, t2, t4});
    } catch (const DegenerateShape&) {
      continue;
    }
    double lhs = bloch_wigner(t1) - bloch_wigner(1.0 / t2) - bloch_wigner(1.0 / t4);
    double rhs = bloch_wigner(u[0]) + bloch_wigner(u[1]);
    worst = std::max(worst, std::abs(lhs - rhs));
    auto back = move_32_inverse(u);
    worst = std::max(worst, std::abs(back[0] - t1));
    worst = std::max(worst, std::abs(back[1] - t2));
    worst = std::max(worst, std::abs(back[2] - t4));
  }
  CHECK(worst < 1e-12);
}

namespace {

struct Built {
  PipelineObjects po;
  SolutionSet h2, h1;
};

Built build_knot(const char* name) {
  Built b;
  ComputeOptions co;
  co.knot = name;
  b.po = build_objects(co);
  SolveOptions so;
  so.seeds = 250;
  so.rng_seed = 20260809;
  b.h2 = solve(system_from_potential(b.po.W), so);
  classify(b.h2, b.po.thurston);
  b.h1 = solve(system_from_potential(b.po.V), so);
  classify(b.h1, b.po.yokota);
  return b;
}

}  // namespace

TEST_CASE("tetrahedron counts on the fixtures") {
  auto b41 = build_knot("4_1");
  CHECK(b41.po.yokota.tets.size() == 2);
  CHECK(b41.po.thurston.tets.size() == 2);
  auto b52 = build_knot("5_2");
  CHECK(b52.po.yokota.tets.size() == 6);
  CHECK(b52.po.thurston.tets.size() == 5);
  // yokota tets = surviving horizontal edges of G
  int live_corners = 0;
  const auto& t = b52.po.tangle;
  for (int ci : t.alive)
    for (int i = 0; i < 4; ++i)
      if (!t.corner_merged_away(ci, i) && t.corner_region(ci, i) != t.unbounded)
        ++live_corners;
  CHECK(live_corners == 6);
}

TEST_CASE("edge classes partition and tags") {
  for (const char* k : {"4_1", "5_2", "6_1", "6_3"}) {
    auto b = build_knot(k);
    for (const auto& tri : {b.po.thurston, b.po.yokota}) {
      // every (tet, edge) member appears in exactly one class
      std::set<std::tuple<int, int, int>> seen;
      size_t total = 0;
      for (const auto& kls : tri.edge_classes) {
        for (const auto& m : kls.members) {
          auto key = std::tuple{m.tet, std::min(m.x, m.y), std::max(m.x, m.y)};
          CHECK(!seen.count(key));
          seen.insert(key);
          ++total;
        }
      }
      CHECK(total == tri.tets.size() * 6);
    }
    // class-A count equals the number of bounded regions
    int nA = 0;
    for (const auto& kls : b.po.thurston.edge_classes)
      if (kls.tag == 'A') ++nA;
    CHECK(nA == b.po.vars.m + 1);
  }
}

TEST_CASE("edge relations at the geometric solution; B/C structural") {
  for (const char* k : {"4_1", "5_2", "6_1"}) {
    auto b = build_knot(k);
    REQUIRE(b.h2.geometric_index >= 0);
    const auto& w0 = b.h2.solutions[static_cast<size_t>(b.h2.geometric_index)];
    for (const auto& er : verify_edge_relations(b.po.thurston, w0.values)) {
      CHECK(er.residual < 1e-9);
      if (er.tag != 'A') CHECK(er.structural);
    }
    // class-B/C products are 1 even at random points
    Rng rng(77);
    for (int s = 0; s < 20; ++s) {
      std::vector<Cx> pt(static_cast<size_t>(b.po.vars.m));
      for (auto& v : pt) v = rng.annulus(0.3, 1.8);
      for (size_t kls = 0; kls < b.po.thurston.edge_classes.size(); ++kls) {
        if (b.po.thurston.edge_classes[kls].tag == 'A') continue;
        CHECK(std::abs(b.po.thurston.class_product(static_cast<int>(kls), pt) -
                       1.0) < 1e-11);
      }
    }
    // a random point breaks at least one class-A relation
    std::vector<Cx> pt(static_cast<size_t>(b.po.vars.m));
    Rng rng2(3);
    for (auto& v : pt) v = rng2.annulus(0.3, 1.8);
    double worstA = 0;
    for (const auto& er : verify_edge_relations(b.po.thurston, pt))
      if (er.tag == 'A') worstA = std::max(worstA, er.residual);
    CHECK(worstA > 0.1);
  }
}

TEST_CASE("shape product form matches the class-A product") {
  for (const char* k : {"4_1", "5_2", "6_2"}) {
    auto b = build_knot(k);
    Rng rng(11);
    for (int l = 0; l < b.po.vars.m; ++l) {
      int kls = b.po.thurston.class_of_region(
          b.po.vars.wvars[static_cast<size_t>(l)]);
      REQUIRE(kls >= 0);
      auto lhs = canonicalize(shape_product_form(b.po.W, l));
      auto rhs = canonicalize(b.po.thurston.class_product_form(kls));
      CHECK(lhs == rhs);
      for (int s = 0; s < 100; ++s) {
        std::vector<Cx> pt(static_cast<size_t>(b.po.vars.m));
        for (auto& v : pt) v = rng.annulus(0.2, 2.0);
        Cx a = eval_shape_product(shape_product_form(b.po.W, l), pt);
        Cx bb = b.po.thurston.class_product(kls, pt);
        CHECK(std::abs(a - bb) <= 1e-12 * std::max(1.0, std::abs(a)));
      }
    }
  }
}

TEST_CASE("cusp holonomy: translation at geometric, broken at random") {
  for (const char* k : {"4_1", "5_2", "6_1", "6_3"}) {
    auto b = build_knot(k);
    const auto& w0 = b.h2.solutions[static_cast<size_t>(b.h2.geometric_index)];
    CHECK(verify_cusp(b.po.thurston, w0.values) < 1e-9);
    Rng rng(5);
    std::vector<Cx> pt(static_cast<size_t>(b.po.vars.m));
    for (auto& v : pt) v = rng.annulus(0.4, 1.6);
    CHECK(verify_cusp(b.po.thurston, pt) > 0.1);
  }
}

TEST_CASE("volumes agree between the two triangulations") {
  for (const char* k : {"4_1", "5_2", "6_1", "6_2", "6_3"}) {
    auto b = build_knot(k);
    const auto& w0 = b.h2.solutions[static_cast<size_t>(b.h2.geometric_index)];
    const auto& z0 = b.h1.solutions[static_cast<size_t>(b.h1.geometric_index)];
    CHECK(b.po.thurston.volume(w0.values) ==
          doctest::Approx(b.po.yokota.volume(z0.values)).epsilon(1e-9));
  }
}

TEST_CASE("NonEssentialPoint on degenerate inputs") {
  auto b = build_knot("4_1");
  std::vector<Cx> bad(static_cast<size_t>(b.po.vars.m), Cx(1.0, 0.0));
  CHECK_THROWS_AS(verify_edge_relations(b.po.thurston, bad), NonEssentialPoint);
}

TEST_CASE("triangulation JSON round-trip") {
  auto b = build_knot("5_2");
  auto t2 = Triangulation::from_json(b.po.thurston.to_json());
  CHECK(t2.to_json() == b.po.thurston.to_json());
  const auto& w0 = b.h2.solutions[static_cast<size_t>(b.h2.geometric_index)];
  CHECK(std::abs(t2.volume(w0.values) - b.po.thurston.volume(w0.values)) <
        1e-12);
}

TEST_CASE("class-C edges on a diagram with an interior crossing") {
  // braid closure with one fully uncollapsed crossing (a non-minimal
  // 6_2 diagram; the volume pins the knot type)
  ComputeOptions co;
  co.pd_text =
      "X(5,1,6,16) X(1,10,2,11) X(11,7,12,6) X(7,13,8,12) "
      "X(2,14,3,13) X(3,14,4,15) X(15,9,16,8) X(9,4,10,5)";
  co.open_side = 1;
  auto po = build_objects(co);
  int nC = 0;
  for (const auto& kls : po.thurston.edge_classes)
    if (kls.tag == 'C') ++nC;
  CHECK(nC == 2);
  // the interior octahedron keeps all five tetrahedra
  std::map<int, int> per_crossing;
  for (const auto& t : po.thurston.tets) ++per_crossing[t.crossing];
  bool has5 = false;
  for (auto [ci, n] : per_crossing) has5 = has5 || n == 5;
  CHECK(has5);
  // class-C products are 1 even at random points
  Rng rng(21);
  for (int s = 0; s < 50; ++s) {
    std::vector<Cx> pt(static_cast<size_t>(po.vars.m));
    for (auto& v : pt) v = rng.annulus(0.4, 1.7);
    for (size_t k = 0; k < po.thurston.edge_classes.size(); ++k)
      if (po.thurston.edge_classes[k].tag == 'C')
        CHECK(std::abs(po.thurston.class_product(static_cast<int>(k), pt) - 1.0) <
              1e-12);
  }
  // and the full pipeline still closes
  auto r = run_compute(co);
  REQUIRE(r.status == ComputeStatus::Ok);
  CHECK(r.vol == doctest::Approx(4.40083251673499).epsilon(1e-8));
  CHECK(r.flattened_congruence_residual < 1e-9);
}

TEST_CASE("trivalent crossing with an extra collapse keeps a single pair") {
  // on 5_2 one endpoint crossing also has a corner in the unbounded region:
  // one tetrahedron survives in each subdivision and they share classes
  ComputeOptions co;
  co.knot = "5_2";
  auto po = build_objects(co);
  std::map<int, int> yok, thu;
  for (const auto& t : po.yokota.tets) ++yok[t.crossing];
  for (const auto& t : po.thurston.tets) ++thu[t.crossing];
  bool single = false;
  for (int ci : po.tangle.alive) {
    if (!po.tangle.trivalent(ci)) continue;
    CHECK(yok[ci] == thu[ci]);
    if (yok[ci] == 1) single = true;
  }
  CHECK(single);
}

TEST_CASE("re-ingested triangulation guards the gluing-dependent calls") {
  auto b = build_knot("4_1");
  auto t2 = Triangulation::from_json(b.po.thurston.to_json());
  const auto& w0 = b.h2.solutions[static_cast<size_t>(b.h2.geometric_index)];
  CHECK_THROWS_AS(verify_cusp(t2, w0.values), std::logic_error);
  CHECK_NOTHROW(verify_edge_relations(t2, w0.values));
}
