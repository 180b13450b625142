#include "optlim/potential.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include <nlohmann/json.hpp>

namespace optlim {

Monomial Monomial::operator*(const Monomial& o) const {
  if (zero_ || o.zero_) return zero_factor();
  Monomial r;
  auto a = e_.begin(), b = o.e_.begin();
  while (a != e_.end() || b != o.e_.end()) {
    if (b == o.e_.end() || (a != e_.end() && a->first < b->first)) {
      r.e_.push_back(*a++);
    } else if (a == e_.end() || b->first < a->first) {
      r.e_.push_back(*b++);
    } else {
      int e = a->second + b->second;
      if (e != 0) r.e_.push_back({a->first, e});
      ++a;
      ++b;
    }
  }
  return r;
}

Monomial Monomial::inverse() const {
  if (zero_) throw DomainError("inverse of zero monomial");
  Monomial r;
  r.e_ = e_;
  for (auto& [v, e] : r.e_) e = -e;
  return r;
}

int Monomial::exponent(int v) const {
  for (auto& [w, e] : e_)
    if (w == v) return e;
  return 0;
}

Cx Monomial::eval(std::span<const Cx> x) const {
  if (zero_) return Cx(0.0, 0.0);
  Cx r(1.0, 0.0);
  for (auto& [v, e] : e_) {
    Cx p = x[static_cast<size_t>(v)];
    int k = e < 0 ? -e : e;
    Cx acc(1.0, 0.0);
    for (int i = 0; i < k; ++i) acc *= p;
    r *= (e < 0) ? 1.0 / acc : acc;
  }
  return r;
}

void PotentialFunction::add_dilog(int sigma, Monomial m) {
  if (m.is_zero()) return;  // Li2(0) = 0
  if (m.is_one()) {         // Li2(1) = pi^2/6
    pi2_sixths += sigma;
    return;
  }
  dilogs.push_back({sigma, std::move(m)});
}

void PotentialFunction::add_loglog(int coef, Monomial m1, Monomial m2) {
  if (m1.is_zero() || m2.is_zero())
    throw DomainError("zero-region factor inside a log");
  if (m1.is_one() || m2.is_one()) return;
  loglogs.push_back({coef, std::move(m1), std::move(m2)});
}

Cx PotentialFunction::eval(std::span<const Cx> x) const {
  Cx v = Cx(pi2_sixths * kPi2 / 6.0, 0.0);
  for (const auto& t : dilogs) v += static_cast<double>(t.sigma) * dilog(t.m.eval(x));
  for (const auto& t : loglogs)
    v += static_cast<double>(t.coef) * clog(t.m1.eval(x)) * clog(t.m2.eval(x));
  return v;
}

Cx PotentialFunction::log_derivative(std::span<const Cx> x, int l) const {
  Cx v(0.0, 0.0);
  for (const auto& t : dilogs) {
    int a = t.m.exponent(l);
    if (!a) continue;
    Cx arg = t.m.eval(x);
    if (arg == Cx(1.0, 0.0)) throw BranchPointError("log(1 - M) at M = 1");
    v -= static_cast<double>(t.sigma * a) * clog(1.0 - arg);
  }
  for (const auto& t : loglogs) {
    int a1 = t.m1.exponent(l), a2 = t.m2.exponent(l);
    if (a1) v += static_cast<double>(t.coef * a1) * clog(t.m2.eval(x));
    if (a2) v += static_cast<double>(t.coef * a2) * clog(t.m1.eval(x));
  }
  return v;
}

Cx PotentialFunction::flatten_literal(std::span<const Cx> x) const {
  Cx v = eval(x);
  for (int l = 0; l < variable_count; ++l)
    v -= log_derivative(x, l) * clog(x[static_cast<size_t>(l)]);
  return v;
}

Cx PotentialFunction::flattened(std::span<const Cx> x, double eps) const {
  Cx v = eval(x);
  for (int l = 0; l < variable_count; ++l) {
    Cx d = log_derivative(x, l);
    double n = std::round(d.imag() / (2.0 * kPi));
    Cx snapped(0.0, 2.0 * kPi * n);
    if (std::abs(d - snapped) > eps)
      throw NotASolution("derivative of variable " + std::to_string(l) +
                         " is not a multiple of 2 pi i");
    v -= snapped * clog(x[static_cast<size_t>(l)]);
  }
  return v;
}

ShapeProduct shape_product_form(const PotentialFunction& p, int l) {
  ShapeProduct sp;
  for (const auto& t : p.dilogs) {
    int a = t.m.exponent(l);
    if (a) sp.push_back({true, t.m, -t.sigma * a});
  }
  for (const auto& t : p.loglogs) {
    int a1 = t.m1.exponent(l), a2 = t.m2.exponent(l);
    if (a1) sp.push_back({false, t.m2, t.coef * a1});
    if (a2) sp.push_back({false, t.m1, t.coef * a2});
  }
  return sp;
}

Cx eval_shape_product(const ShapeProduct& sp, std::span<const Cx> x) {
  Cx v(1.0, 0.0);
  for (const auto& f : sp) {
    Cx base = f.m.eval(x);
    if (f.one_minus) base = 1.0 - base;
    int k = f.exp < 0 ? -f.exp : f.exp;
    Cx acc(1.0, 0.0);
    for (int i = 0; i < k; ++i) acc *= base;
    v *= (f.exp < 0) ? 1.0 / acc : acc;
  }
  return v;
}

CanonicalProduct canonicalize(const ShapeProduct& sp) {
  std::map<Monomial, int> om;
  Monomial total;
  int sign = 1;
  auto mul_pow = [&](const Monomial& m, int e) {
    Monomial p = e < 0 ? m.inverse() : m;
    for (int i = 0; i < std::abs(e); ++i) total = total * p;
  };
  for (const auto& f : sp) {
    if (!f.one_minus) {
      mul_pow(f.m, f.exp);
      continue;
    }
    // (1 - M^-1) = -M^-1 (1 - M): canonicalize toward positive leading exp
    const Monomial& m = f.m;
    bool inv = !m.exponents().empty() && m.exponents().front().second < 0;
    if (!inv) {
      om[m] += f.exp;
    } else {
      Monomial mi = m.inverse();
      om[mi] += f.exp;
      mul_pow(mi, -f.exp);
      if (f.exp % 2 != 0) sign = -sign;
    }
  }
  CanonicalProduct c;
  c.sign = sign;
  c.mono = total;
  for (auto& [m, e] : om)
    if (e) c.one_minus.push_back({m, e});
  return c;
}

// ---------------------------------------------------------------- builders

namespace {

// Roles j,k,l,m of corners 0..3 (corner i lies between slots i and i+1):
// positive crossings (m,j,k,l), negative (l,m,j,k).
constexpr char kRolePos[4] = {'m', 'j', 'k', 'l'};
constexpr char kRoleNeg[4] = {'l', 'm', 'j', 'k'};

struct WEnv {
  const TangleGraph* g;
  const VariableAssignment* va;
  int region[4];  // region representative per role index 0..3 = j,k,l,m

  static int role_idx(char r) { return r == 'j' ? 0 : r == 'k' ? 1 : r == 'l' ? 2 : 3; }

  Monomial factor(char role) const {
    int r = region[role_idx(role)];
    switch (va->region_kind(r)) {
      case RegionKind::Zero:
        return Monomial::zero_factor();
      case RegionKind::Unit:
        return Monomial();
      case RegionKind::Var:
        return Monomial::var(va->w_index(r));
    }
    return Monomial();
  }

  Monomial ratio(std::initializer_list<char> num,
                 std::initializer_list<char> den) const {
    Monomial m;
    for (char r : num) m = m * factor(r);
    for (char r : den) {
      Monomial f = factor(r);
      if (f.is_zero()) throw DomainError("zero region in a denominator");
      m = m * f.inverse();
    }
    return m;
  }
};

void emit_crossing_W(PotentialFunction& W, const WEnv& e, int sign, int f) {
  auto dl = [&](int s, std::initializer_list<char> n,
                std::initializer_list<char> d) { W.add_dilog(s, e.ratio(n, d)); };
  auto ll = [&](int c, std::initializer_list<char> n1,
                std::initializer_list<char> d1, std::initializer_list<char> n2,
                std::initializer_list<char> d2) {
    W.add_loglog(c, e.ratio(n1, d1), e.ratio(n2, d2));
  };
  if (sign > 0) {
    switch (f) {
      case 1:  // P1
        dl(-1, {'l'}, {'m'}); dl(-1, {'l'}, {'k'}); dl(+1, {'j', 'l'}, {'k', 'm'});
        dl(+1, {'m'}, {'j'}); dl(+1, {'k'}, {'j'}); W.pi2_sixths -= 1;
        ll(+1, {'m'}, {'j'}, {'k'}, {'j'});
        break;
      case 2:  // P2
        dl(+1, {'m'}, {'l'}); dl(-1, {'l'}, {'k'}); dl(-1, {'k', 'm'}, {'j', 'l'});
        dl(+1, {'m'}, {'j'}); dl(-1, {'j'}, {'k'}); W.pi2_sixths += 1;
        ll(-1, {'k'}, {'l'}, {'k'}, {'j'});
        break;
      case 3:  // P3
        dl(+1, {'m'}, {'l'}); dl(+1, {'k'}, {'l'}); dl(+1, {'j', 'l'}, {'k', 'm'});
        dl(-1, {'j'}, {'m'}); dl(-1, {'j'}, {'k'}); W.pi2_sixths -= 1;
        ll(+1, {'m'}, {'l'}, {'k'}, {'l'});
        break;
      default:  // P4
        dl(-1, {'l'}, {'m'}); dl(+1, {'k'}, {'l'}); dl(-1, {'k', 'm'}, {'j', 'l'});
        dl(-1, {'j'}, {'m'}); dl(+1, {'k'}, {'j'}); W.pi2_sixths += 1;
        ll(-1, {'m'}, {'l'}, {'m'}, {'j'});
        break;
    }
  } else {
    switch (f) {
      case 1:  // N1
        dl(+1, {'l'}, {'m'}); dl(+1, {'l'}, {'k'}); dl(-1, {'j', 'l'}, {'k', 'm'});
        dl(-1, {'m'}, {'j'}); dl(-1, {'k'}, {'j'}); W.pi2_sixths += 1;
        ll(-1, {'j'}, {'m'}, {'j'}, {'k'});
        break;
      case 2:  // N2
        dl(-1, {'m'}, {'l'}); dl(+1, {'l'}, {'k'}); dl(+1, {'k', 'm'}, {'j', 'l'});
        dl(-1, {'m'}, {'j'}); dl(+1, {'j'}, {'k'}); W.pi2_sixths -= 1;
        ll(+1, {'l'}, {'k'}, {'j'}, {'k'});
        break;
      case 3:  // N3
        dl(-1, {'m'}, {'l'}); dl(-1, {'k'}, {'l'}); dl(-1, {'j', 'l'}, {'k', 'm'});
        dl(+1, {'j'}, {'m'}); dl(+1, {'j'}, {'k'}); W.pi2_sixths += 1;
        ll(-1, {'l'}, {'m'}, {'l'}, {'k'});
        break;
      default:  // N4
        dl(+1, {'l'}, {'m'}); dl(-1, {'k'}, {'l'}); dl(+1, {'k', 'm'}, {'j', 'l'});
        dl(+1, {'j'}, {'m'}); dl(-1, {'k'}, {'j'}); W.pi2_sixths -= 1;
        ll(+1, {'l'}, {'m'}, {'j'}, {'m'});
        break;
    }
  }
}

}  // namespace

PotentialFunction build_W(const TangleGraph& g, const VariableAssignment& va) {
  PotentialFunction W;
  W.variable_count = va.m;
  const auto& d = g.d;
  for (int ci : g.alive) {
    int sg = d.sign(ci);
    const char* roles = sg > 0 ? kRolePos : kRoleNeg;
    WEnv env{&g, &va, {}};
    for (int i = 0; i < 4; ++i)
      env.region[WEnv::role_idx(roles[i])] = g.corner_region(ci, i);

    if (g.trivalent(ci)) {
      // endpoint forms; the two corners flanking the deleted branch carry one
      // merged region, substituted into both roles.
      int ds = g.deleted_slot(ci);
      int merged = g.corner_region(ci, ds);  // == corner (ds+3)%4 after merge
      char r1 = roles[ds], r2 = roles[(ds + 3) % 4];
      env.region[WEnv::role_idx(r1)] = merged;
      env.region[WEnv::role_idx(r2)] = merged;
      if (ci == g.i_endpoint) {
        if (sg > 0) {  // P1(j,j,l,m) = Li2(m/j) - Li2(l/j)
          W.add_dilog(+1, env.ratio({'m'}, {'j'}));
          W.add_dilog(-1, env.ratio({'l'}, {'j'}));
        } else {  // N1(j,k,l,j) = -Li2(k/j) + Li2(l/j)
          W.add_dilog(-1, env.ratio({'k'}, {'j'}));
          W.add_dilog(+1, env.ratio({'l'}, {'j'}));
        }
      } else {
        if (sg > 0) {  // P2(j,k,k,m) = Li2(m/k) - Li2(j/k)
          W.add_dilog(+1, env.ratio({'m'}, {'k'}));
          W.add_dilog(-1, env.ratio({'j'}, {'k'}));
        } else {  // N3(j,k,l,l) = -Li2(k/l) + Li2(j/l)
          W.add_dilog(-1, env.ratio({'k'}, {'l'}));
          W.add_dilog(+1, env.ratio({'j'}, {'l'}));
        }
      }
      continue;
    }

    // variant by the collapsed corner so the zero region never meets a log
    auto unb = g.collapsed_corners(ci);
    int f = 1;
    if (!unb.empty()) {
      char role = roles[unb.front()];
      f = role == 'l' ? 1 : role == 'm' ? 2 : role == 'j' ? 3 : 4;
    }
    emit_crossing_W(W, env, sg, f);
  }
  return W;
}

PotentialFunction build_V(const TangleGraph& g, const VariableAssignment& va) {
  PotentialFunction V;
  V.variable_count = va.g;
  const auto& d = g.d;
  auto side_factor = [&](int ci, int slot) -> Monomial {
    int a = d.arc(ci, slot);
    if (g.deleted_arcs.count(a)) return Monomial();
    int rep = g.side_rep(a);
    if (va.side_kind_of_rep(rep) == SideKind::One) return Monomial();
    return Monomial::var(va.z_index_of_rep(rep));
  };
  for (int ci : g.alive) {
    for (int i = 0; i < 4; ++i) {
      if (g.corner_merged_away(ci, i)) continue;
      if (g.corner_region(ci, i) == g.unbounded) continue;
      // sigma = +1 iff the ccw-first flanking branch (slot i) is an over branch
      int sigma = d.slot_is_under(i) ? -1 : +1;
      Monomial t = side_factor(ci, (i + 1) % 4) * side_factor(ci, i).inverse();
      if (sigma > 0) {
        V.add_dilog(+1, t);
        V.pi2_sixths -= 1;
      } else {
        V.add_dilog(-1, t.inverse());
        V.pi2_sixths += 1;
      }
    }
  }
  return V;
}

// -------------------------------------------------------------------- JSON

std::string PotentialFunction::to_json() const {
  nlohmann::json j;
  j["variable_count"] = variable_count;
  j["pi2_sixths"] = pi2_sixths;
  auto mono = [](const Monomial& m) {
    nlohmann::json a = nlohmann::json::array();
    for (auto& [v, e] : m.exponents()) a.push_back({v, e});
    return a;
  };
  j["dilogs"] = nlohmann::json::array();
  for (const auto& t : dilogs) j["dilogs"].push_back({{"sigma", t.sigma}, {"m", mono(t.m)}});
  j["loglogs"] = nlohmann::json::array();
  for (const auto& t : loglogs)
    j["loglogs"].push_back({{"coef", t.coef}, {"m1", mono(t.m1)}, {"m2", mono(t.m2)}});
  return j.dump(2);
}

PotentialFunction PotentialFunction::from_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  PotentialFunction p;
  p.variable_count = j.at("variable_count").get<int>();
  p.pi2_sixths = j.at("pi2_sixths").get<int>();
  auto mono = [](const nlohmann::json& a) {
    Monomial m;
    for (const auto& pr : a)
      m = m * Monomial::var(pr.at(0).get<int>(), pr.at(1).get<int>());
    return m;
  };
  for (const auto& t : j.at("dilogs"))
    p.dilogs.push_back({t.at("sigma").get<int>(), mono(t.at("m"))});
  for (const auto& t : j.at("loglogs"))
    p.loglogs.push_back(
        {t.at("coef").get<int>(), mono(t.at("m1")), mono(t.at("m2"))});
  return p;
}

}  // namespace optlim
