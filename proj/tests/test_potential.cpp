#include <doctest.h>

#include <cmath>

#include "optlim/pipeline.hpp"
#include "optlim/potential.hpp"
#include "optlim/rng.hpp"

using namespace optlim;

namespace {

PotentialFunction kashaev_52() {
  // F(z,u) = -2 Li2(z) - Li2(1/u) - log z log u + pi^2/2, vars (z, u)
  PotentialFunction F;
  F.variable_count = 2;
  F.add_dilog(-1, Monomial::var(0));
  F.add_dilog(-1, Monomial::var(0));
  F.add_dilog(-1, Monomial::var(1, -1));
  F.add_loglog(-1, Monomial::var(0), Monomial::var(1));
  F.pi2_sixths = 3;
  return F;
}

}  // namespace

TEST_CASE("monomial algebra") {
  Monomial a = Monomial::var(0) * Monomial::var(1, -2);
  Monomial b = Monomial::var(1, 2);
  CHECK((a * b).exponents().size() == 1);
  CHECK((a * a.inverse()).is_one());
  std::vector<Cx> x{Cx(2, 0), Cx(0, 1)};
  CHECK(std::abs(a.eval(x) - Cx(2, 0) / Cx(0, 1) / Cx(0, 1)) < 1e-15);
  CHECK(Monomial::zero_factor().is_zero());
  CHECK((Monomial::zero_factor() * b).is_zero());
}

TEST_CASE("log_derivative matches central differences") {
  auto d = parse_pd(bundled_fixtures().at("5_2"));
  auto t = auto_open(d);
  auto va = assign_variables(t);
  auto W = build_W(t, va);
  Rng rng(17);
  double worst = 0;
  for (int s = 0; s < 300; ++s) {
    std::vector<Cx> x(static_cast<size_t>(va.m));
    for (auto& v : x) v = rng.annulus(0.4, 1.8);
    for (int l = 0; l < va.m; ++l) {
      double h = 1e-6;
      auto xp = x, xm = x;
      xp[static_cast<size_t>(l)] *= std::exp(h);
      xm[static_cast<size_t>(l)] *= std::exp(-h);
      Cx fd = (W.eval(xp) - W.eval(xm)) / (2 * h);
      Cx an = W.log_derivative(x, l);
      worst = std::max(worst, std::abs(fd - an) / std::max(1.0, std::abs(an)));
    }
  }
  CHECK(worst < 1e-6);
}

TEST_CASE("shape_product_form equals exp of the derivative") {
  for (const char* k : {"4_1", "5_2", "6_2"}) {
    auto d = parse_pd(bundled_fixtures().at(k));
    auto t = auto_open(d);
    auto va = assign_variables(t);
    auto W = build_W(t, va);
    auto V = build_V(t, va);
    Rng rng(5);
    double worst = 0;
    for (int s = 0; s < 100; ++s) {
      std::vector<Cx> w(static_cast<size_t>(va.m)), z(static_cast<size_t>(va.g));
      for (auto& v : w) v = rng.annulus(0.4, 1.8);
      for (auto& v : z) v = rng.annulus(0.4, 1.8);
      for (int l = 0; l < va.m; ++l)
        worst = std::max(worst,
                         std::abs(eval_shape_product(shape_product_form(W, l), w) -
                                  std::exp(W.log_derivative(w, l))));
      for (int l = 0; l < va.g; ++l)
        worst = std::max(worst,
                         std::abs(eval_shape_product(shape_product_form(V, l), z) -
                                  std::exp(V.log_derivative(z, l))));
    }
    CHECK(worst < 1e-12);
  }
}

TEST_CASE("Kashaev 5_2 potential: derivative closed forms") {
  auto F = kashaev_52();
  // z dF/dz = 2 log(1-z) - log u, so exp = (1-z)^2/u
  Rng rng(23);
  for (int i = 0; i < 50; ++i) {
    std::vector<Cx> x{rng.annulus(0.2, 2.0), rng.annulus(0.2, 2.0)};
    Cx e = std::exp(F.log_derivative(x, 0));
    Cx expect = (1.0 - x[0]) * (1.0 - x[0]) / x[1];
    CHECK(std::abs(e - expect) < 1e-12 * std::max(1.0, std::abs(expect)));
    Cx e2 = std::exp(F.log_derivative(x, 1));
    Cx expect2 = 1.0 / (x[0] * (1.0 - 1.0 / x[1]));
    CHECK(std::abs(e2 - expect2) < 1e-12 * std::max(1.0, std::abs(expect2)));
  }
}

TEST_CASE("flattened: derivative of constants and snapping") {
  PotentialFunction c;
  c.variable_count = 1;
  c.pi2_sixths = 2;
  std::vector<Cx> x{Cx(0.3, 0.4)};
  CHECK(std::abs(c.log_derivative(x, 0)) == 0.0);
  CHECK(std::abs(c.flattened(x) - Cx(2 * kPi2 / 6, 0)) < 1e-15);
  // a non-solution gets rejected
  auto F = kashaev_52();
  std::vector<Cx> bad{Cx(0.4, 0.1), Cx(0.9, 0.2)};
  CHECK_THROWS_AS(F.flattened(bad), NotASolution);
}

TEST_CASE("W build on 4_1 matches the hand-built structure") {
  auto d = parse_pd(bundled_fixtures().at("4_1"));
  auto t = auto_open(d);
  auto va = assign_variables(t);
  CHECK(va.m == 1);
  CHECK(va.g == 1);
  auto W = build_W(t, va);
  auto V = build_V(t, va);
  CHECK(W.dilogs.size() == 2);
  CHECK(V.dilogs.size() == 2);
  CHECK(W.loglogs.empty());
}

TEST_CASE("potential JSON round-trip") {
  auto d = parse_pd(bundled_fixtures().at("5_2"));
  auto t = auto_open(d);
  auto va = assign_variables(t);
  auto W = build_W(t, va);
  auto W2 = PotentialFunction::from_json(W.to_json());
  CHECK(W2.to_json() == W.to_json());
  Rng rng(2);
  std::vector<Cx> x(static_cast<size_t>(va.m));
  for (auto& v : x) v = rng.annulus(0.4, 1.5);
  CHECK(std::abs(W.eval(x) - W2.eval(x)) == 0.0);
}

TEST_CASE("canonicalize collapses equivalent factor lists") {
  Monomial m = Monomial::var(0) * Monomial::var(1, -1);
  // (1 - w1/w0) = -(w1/w0)(1 - w0/w1): the two factor lists denote the same
  // function, so their canonical forms must be identical
  ShapeProduct a{{true, m.inverse(), 1}};
  ShapeProduct b{{true, m, 1}, {false, m.inverse(), 1}};
  auto ca = canonicalize(a), cb = canonicalize(b);
  CHECK(ca.one_minus == cb.one_minus);
  CHECK(ca.mono == cb.mono);
  CHECK(ca.sign == -cb.sign);  // b omits the folded (-1)
  // splitting a monomial across factors is invisible
  ShapeProduct c{{false, Monomial::var(0), 1},
                 {false, Monomial::var(0) * Monomial::var(1, -1), -1},
                 {false, Monomial::var(1), 1}};
  ShapeProduct d{{false, Monomial::var(1, 2), 1}};
  CHECK(canonicalize(c) == canonicalize(d));
}
