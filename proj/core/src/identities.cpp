#include "optlim/identities.hpp"

#include <cmath>

#include "oct_detail.hpp"

namespace optlim {
namespace {

Cx L(Cx z) { return clog(Cx(1.0, 0.0) - z); }

bool degenerate(Cx z, double margin = 0.02) {
  return !finite(z) || std::abs(z) < margin || std::abs(z - 1.0) < margin ||
         std::abs(z) > 1.0 / margin;
}

Cx draw(Rng& rng) {
  for (;;) {
    Cx z = rng.annulus(0.3, 2.0);
    if (std::abs(z) > 0.05 && std::abs(z - 1.0) > 0.05) return z;
  }
}

std::array<Cx, 4> Us(const std::array<Cx, 4>& t) {
  return {-L(t[0]) + L(1.0 / t[3]), -L(t[0]) + L(1.0 / t[1]),
          -L(t[2]) + L(1.0 / t[1]), -L(t[2]) + L(1.0 / t[3])};
}

bool principal_chamber(const OctahedronSample& s) {
  auto U = Us(s.t);
  for (int i = 0; i < 4; ++i) {
    double n = (U[static_cast<size_t>(i)] - clog(s.u[static_cast<size_t>(i)])).imag() / (2 * kPi);
    if (std::lround(n) != 0) return false;
  }
  return true;
}

OctahedronSample try_sample(Rng& rng) {
  OctahedronSample s;
  s.t[0] = draw(rng);
  s.t[1] = draw(rng);
  s.t[2] = draw(rng);
  s.t[3] = 1.0 / (s.t[0] * s.t[1] * s.t[2]);
  if (degenerate(s.t[3], 0.05)) return {};
  auto u = move_45(s.t);
  for (Cx v : u)
    if (degenerate(v)) return {};
  std::copy(u.begin(), u.end(), s.u.begin());
  return s;
}

}  // namespace

OctahedronSample sample_octahedron_any_chamber(Rng& rng) {
  for (;;) {
    try {
      OctahedronSample s = try_sample(rng);
      if (s.t[0] != Cx(0, 0)) return s;
    } catch (const DegenerateShape&) {
    }
  }
}

OctahedronSample sample_octahedron(Rng& rng) {
  for (;;) {
    OctahedronSample s = sample_octahedron_any_chamber(rng);
    if (principal_chamber(s)) return s;
  }
}

CollapsedSample sample_collapsed(Rng& rng) {
  for (;;) {
    CollapsedSample s;
    s.t[0] = draw(rng);
    s.t[1] = draw(rng);
    s.t[2] = 1.0 / (s.t[0] * s.t[1]);
    if (degenerate(s.t[2], 0.05)) continue;
    try {
      auto u = move_32(s.t);
      if (degenerate(u[0]) || degenerate(u[1])) continue;
      s.u = u;
      return s;
    } catch (const DegenerateShape&) {
    }
  }
}

Cx lemma5_delta(const OctahedronSample& s, int which) {
  const auto& t = s.t;
  const auto& u = s.u;
  auto U = Us(t);
  Cx U1 = U[0], U2 = U[1], U3 = U[2], U4 = U[3];
  Cx lhs = dilog(t[0]) - dilog(1.0 / t[1]) + dilog(t[2]) - dilog(1.0 / t[3]);
  Cx rhs;
  switch (which) {
    case 22:
      rhs = dilog(u[0]) + dilog(u[1]) - dilog(1.0 / u[2]) - dilog(1.0 / u[3]) +
            dilog(u[4]) - kPi2 / 6 + clog(u[0]) * clog(u[1]) -
            U1 * clog(u[1]) - U2 * clog(u[0]) + U1 * L(u[0]) + U2 * L(u[1]) +
            U3 * L(1.0 / u[2]) + U4 * L(1.0 / u[3]) - (U1 + U3) * L(u[4]);
      break;
    case 23:
      rhs = dilog(u[0]) - dilog(1.0 / u[1]) - dilog(1.0 / u[2]) + dilog(u[3]) -
            dilog(1.0 / u[4]) + kPi2 / 6 - clog(u[1]) * clog(u[2]) +
            U3 * clog(u[1]) + U2 * clog(u[2]) + U1 * L(u[0]) +
            U2 * L(1.0 / u[1]) + U3 * L(1.0 / u[2]) + U4 * L(u[3]) -
            (U1 + U3) * L(1.0 / u[4]);
      break;
    case 24:
      rhs = -dilog(1.0 / u[0]) - dilog(1.0 / u[1]) + dilog(u[2]) + dilog(u[3]) +
            dilog(u[4]) - kPi2 / 6 + clog(u[2]) * clog(u[3]) -
            U4 * clog(u[2]) - U3 * clog(u[3]) + U1 * L(1.0 / u[0]) +
            U2 * L(1.0 / u[1]) + U3 * L(u[2]) + U4 * L(u[3]) -
            (U1 + U3) * L(u[4]);
      break;
    case 25:
      rhs = -dilog(1.0 / u[0]) + dilog(u[1]) + dilog(u[2]) - dilog(1.0 / u[3]) -
            dilog(1.0 / u[4]) + kPi2 / 6 - clog(u[0]) * clog(u[3]) +
            U1 * clog(u[3]) + U4 * clog(u[0]) + U1 * L(1.0 / u[0]) +
            U2 * L(u[1]) + U3 * L(u[2]) + U4 * L(1.0 / u[3]) -
            (U1 + U3) * L(1.0 / u[4]);
      break;
    default:
      throw DegenerateSample("unknown identity index");
  }
  return lhs - rhs;
}

double check_lemma5(const OctahedronSample& s, int which) {
  for (Cx v : s.t)
    if (degenerate(v, 1e-9)) throw DegenerateSample("t in {0,1,inf}");
  for (Cx v : s.u)
    if (degenerate(v, 1e-9)) throw DegenerateSample("u in {0,1,inf}");
  return std::abs(lemma5_delta(s, which));
}

double check_lemma5_collapsed(const CollapsedSample& s, int which) {
  if (which < 26 || which > 29) throw DegenerateSample("unknown identity index");
  const Cx t1 = s.t[0], t2 = s.t[1], t4 = s.t[2];
  const Cx u1 = s.u[0], u2 = s.u[1];
  for (Cx v : {t1, t2, t4, u1, u2})
    if (degenerate(v, 1e-9)) throw DegenerateSample("shape in {0,1,inf}");
  Cx U1 = -L(t1) + L(1.0 / t4);
  Cx U2 = -L(t1) + L(1.0 / t2);
  Cx lhs, rhs;
  // the four collapsed identities are corner rotations of one statement;
  // 26/28 carry the (u, u) form, 27/29 the (1/u, 1/u) form.
  switch (which) {
    case 26:
    case 28:
      lhs = dilog(t1) - dilog(1.0 / t2) - dilog(1.0 / t4) + kPi2 / 6;
      rhs = dilog(u1) + dilog(u2) - kPi2 / 6 + clog(u1) * clog(u2) +
            U1 * (-clog(u2) + L(u1)) + U2 * (-clog(u1) + L(u2));
      break;
    default: {
      // rotated data: (a, b, c) with a b c = 1, v2 = a' b'', v3 = c' b''
      Cx a = t1, b = t2, c = t4;
      Cx v2 = shape_prime(a) * shape_dprime(b);
      Cx v3 = shape_prime(c) * shape_dprime(b);
      if (degenerate(v2, 1e-9) || degenerate(v3, 1e-9))
        throw DegenerateSample("rotated u degenerate");
      Cx W2 = -L(a) + L(1.0 / b);
      Cx W3 = -L(c) + L(1.0 / b);
      lhs = dilog(a) - dilog(1.0 / b) + dilog(c) - kPi2 / 6;
      rhs = -dilog(1.0 / v2) - dilog(1.0 / v3) + kPi2 / 6 -
            clog(v2) * clog(v3) + W3 * (clog(v2) + L(1.0 / v3)) +
            W2 * (clog(v3) + L(1.0 / v2));
      break;
    }
  }
  return std::abs(lhs - rhs);
}

// ------------------------------------------------------------- lemma 3.1

namespace {

// P_1..P_4, N_1..N_4 as closed-form evaluations (j,k,l,m order)
Cx PN(int sign, int f, Cx j, Cx k, Cx l, Cx m) {
  auto Li = [](Cx z) { return dilog(z); };
  if (sign > 0) {
    switch (f) {
      case 1:
        return -Li(l / m) - Li(l / k) + Li(j * l / (k * m)) + Li(m / j) +
               Li(k / j) - kPi2 / 6 + clog(m / j) * clog(k / j);
      case 2:
        return Li(m / l) - Li(l / k) - Li(k * m / (j * l)) + Li(m / j) -
               Li(j / k) + kPi2 / 6 - clog(k / l) * clog(k / j);
      case 3:
        return Li(m / l) + Li(k / l) + Li(j * l / (k * m)) - Li(j / m) -
               Li(j / k) - kPi2 / 6 + clog(m / l) * clog(k / l);
      default:
        return -Li(l / m) + Li(k / l) - Li(k * m / (j * l)) - Li(j / m) +
               Li(k / j) + kPi2 / 6 - clog(m / l) * clog(m / j);
    }
  }
  switch (f) {
    case 1:
      return Li(l / m) + Li(l / k) - Li(j * l / (k * m)) - Li(m / j) -
             Li(k / j) + kPi2 / 6 - clog(j / m) * clog(j / k);
    case 2:
      return -Li(m / l) + Li(l / k) + Li(k * m / (j * l)) - Li(m / j) +
             Li(j / k) - kPi2 / 6 + clog(l / k) * clog(j / k);
    case 3:
      return -Li(m / l) - Li(k / l) - Li(j * l / (k * m)) + Li(j / m) +
             Li(j / k) + kPi2 / 6 - clog(l / m) * clog(l / k);
    default:
      return Li(l / m) - Li(k / l) + Li(k * m / (j * l)) + Li(j / m) -
             Li(k / j) - kPi2 / 6 + clog(l / m) * clog(j / m);
  }
}

// analytic w_a dF/dw_a of the crossing functions via a PotentialFunction
PotentialFunction pn_potential(int sign, int f) {
  PotentialFunction p;
  p.variable_count = 4;  // j,k,l,m = vars 0..3
  auto mono = [](std::initializer_list<int> num, std::initializer_list<int> den) {
    Monomial m;
    for (int v : num) m = m * Monomial::var(v);
    for (int v : den) m = m * Monomial::var(v, -1);
    return m;
  };
  const int J = 0, K = 1, Lr = 2, M = 3;
  auto dl = [&](int s, std::initializer_list<int> n, std::initializer_list<int> d) {
    p.add_dilog(s, mono(n, d));
  };
  auto ll = [&](int c, std::initializer_list<int> n1, std::initializer_list<int> d1,
                std::initializer_list<int> n2, std::initializer_list<int> d2) {
    p.add_loglog(c, mono(n1, d1), mono(n2, d2));
  };
  if (sign > 0) {
    switch (f) {
      case 1:
        dl(-1, {Lr}, {M}); dl(-1, {Lr}, {K}); dl(+1, {J, Lr}, {K, M});
        dl(+1, {M}, {J}); dl(+1, {K}, {J}); p.pi2_sixths -= 1;
        ll(+1, {M}, {J}, {K}, {J});
        break;
      case 2:
        dl(+1, {M}, {Lr}); dl(-1, {Lr}, {K}); dl(-1, {K, M}, {J, Lr});
        dl(+1, {M}, {J}); dl(-1, {J}, {K}); p.pi2_sixths += 1;
        ll(-1, {K}, {Lr}, {K}, {J});
        break;
      case 3:
        dl(+1, {M}, {Lr}); dl(+1, {K}, {Lr}); dl(+1, {J, Lr}, {K, M});
        dl(-1, {J}, {M}); dl(-1, {J}, {K}); p.pi2_sixths -= 1;
        ll(+1, {M}, {Lr}, {K}, {Lr});
        break;
      default:
        dl(-1, {Lr}, {M}); dl(+1, {K}, {Lr}); dl(-1, {K, M}, {J, Lr});
        dl(-1, {J}, {M}); dl(+1, {K}, {J}); p.pi2_sixths += 1;
        ll(-1, {M}, {Lr}, {M}, {J});
        break;
    }
  } else {
    switch (f) {
      case 1:
        dl(+1, {Lr}, {M}); dl(+1, {Lr}, {K}); dl(-1, {J, Lr}, {K, M});
        dl(-1, {M}, {J}); dl(-1, {K}, {J}); p.pi2_sixths += 1;
        ll(-1, {J}, {M}, {J}, {K});
        break;
      case 2:
        dl(-1, {M}, {Lr}); dl(+1, {Lr}, {K}); dl(+1, {K, M}, {J, Lr});
        dl(-1, {M}, {J}); dl(+1, {J}, {K}); p.pi2_sixths -= 1;
        ll(+1, {Lr}, {K}, {J}, {K});
        break;
      case 3:
        dl(-1, {M}, {Lr}); dl(-1, {K}, {Lr}); dl(-1, {J, Lr}, {K, M});
        dl(+1, {J}, {M}); dl(+1, {J}, {K}); p.pi2_sixths += 1;
        ll(-1, {Lr}, {M}, {Lr}, {K});
        break;
      default:
        dl(+1, {Lr}, {M}); dl(-1, {K}, {Lr}); dl(+1, {K, M}, {J, Lr});
        dl(+1, {J}, {M}); dl(-1, {K}, {J}); p.pi2_sixths -= 1;
        ll(+1, {Lr}, {M}, {J}, {M});
        break;
    }
  }
  return p;
}

}  // namespace

std::array<Cx, 4> sample_crossing_regions(Rng& rng) {
  for (;;) {
    std::array<Cx, 4> w;
    for (auto& v : w) v = rng.annulus(0.5, 1.5);
    auto [j, k, l, m] = w;
    bool ok = true;
    for (Cx r : {l / m, l / k, j * l / (k * m), m / j, k / j, m / l, j / m,
                 j / k, k / l, k * m / (j * l)})
      ok = ok && std::abs(r) > 0.1 && std::abs(r - 1.0) > 0.1 &&
           std::abs(r) < 10.0;
    if (ok) return w;
  }
}

double check_lemma31_derivatives(std::span<const Cx, 4> w) {
  double worst = 0;
  std::vector<Cx> x(w.begin(), w.end());
  for (int sign : {+1, -1}) {
    for (int a = 0; a < 4; ++a) {
      Cx ref;
      for (int f = 1; f <= 4; ++f) {
        PotentialFunction p = pn_potential(sign, f);
        Cx e = std::exp(p.log_derivative(x, a));
        if (f == 1)
          ref = e;
        else
          worst = std::max(worst, std::abs(e - ref));
      }
    }
  }
  return worst;
}

double check_lemma31_flattened(std::span<const Cx, 4> w) {
  double worst = 0;
  std::vector<Cx> x(w.begin(), w.end());
  for (int sign : {+1, -1}) {
    Cx ref;
    for (int f = 1; f <= 4; ++f) {
      PotentialFunction p = pn_potential(sign, f);
      Cx v = p.flatten_literal(x);
      // closed-form / term-list agreement while we are here
      Cx direct = PN(sign, f, x[0], x[1], x[2], x[3]);
      worst = std::max(worst, std::abs(p.eval(x) - direct));
      if (f == 1) {
        ref = v;
      } else {
        Cx d = v - ref;
        double k = std::round(d.real() / (4 * kPi2));
        worst = std::max(worst, std::abs(d - Cx(4 * kPi2 * k, 0)));
      }
    }
  }
  return worst;
}

// ---------------------------------------------------------- remaining terms

Cx remaining_term(const TangleGraph& g, const VariableAssignment& va, int ci,
                  std::span<const Cx> z, std::span<const Cx> w) {
  const auto& d = g.d;
  Cx zn(0, 0);
  auto logw = [&](int region) -> Cx {
    switch (va.region_kind(region)) {
      case RegionKind::Unit:
        return Cx(0, 0);
      case RegionKind::Zero:
        throw DegenerateSample("zero region beside a contributing side");
      default:
        return clog(w[static_cast<size_t>(va.w_index(region))]);
    }
  };
  for (int s = 0; s < 4; ++s) {
    int a = d.arc(ci, s);
    if (g.deleted_arcs.count(a)) continue;
    int rep = g.side_rep(a);
    if (va.side_kind_of_rep(rep) == SideKind::One) continue;
    int rb = g.corner_region(ci, (s + 3) % 4);
    int ra = g.corner_region(ci, s);
    zn += (logw(rb) - logw(ra)) * clog(z[static_cast<size_t>(va.z_index_of_rep(rep))]);
  }
  return zn;
}

double check_cancellation(const TangleGraph& g, const VariableAssignment& va,
                          std::span<const Cx> z, std::span<const Cx> w) {
  Cx total(0, 0);
  for (int ci : g.alive) total += remaining_term(g, va, ci, z, w);
  double k = std::round(total.real() / (4 * kPi2));
  return std::abs(total - Cx(4 * kPi2 * k, 0));
}

double check_remaining_full_positive(Rng& rng) {
  // draw side values, derive the w-ratios through the 4-5 move, and compare
  // X0 - P10 against the closed-form Z_n mod 4 pi^2
  Cx za = draw(rng), zb = draw(rng), zc = draw(rng), zd = draw(rng);
  std::array<Cx, 4> t{zb / za, zc / zb, zd / zc, za / zd};
  for (Cx v : t)
    if (degenerate(v, 1e-3)) throw DegenerateSample("degenerate ratios");
  std::array<Cx, 5> u;
  try {
    u = move_45(t);
  } catch (const DegenerateShape&) {
    throw DegenerateSample("degenerate 4-5 image");
  }
  Cx wj = draw(rng);
  Cx wm = u[0] * wj, wk = u[1] * wj, wl = wk / u[2];

  PotentialFunction X;
  X.variable_count = 4;  // za, zb, zc, zd
  X.add_dilog(+1, Monomial::var(1) * Monomial::var(0, -1));
  X.add_dilog(-1, Monomial::var(1) * Monomial::var(2, -1));
  X.add_dilog(+1, Monomial::var(3) * Monomial::var(2, -1));
  X.add_dilog(-1, Monomial::var(3) * Monomial::var(0, -1));
  std::vector<Cx> zv{za, zb, zc, zd};
  Cx X0 = X.flatten_literal(zv);

  PotentialFunction P1 = pn_potential(+1, 1);
  std::vector<Cx> wv{wj, wk, wl, wm};
  Cx P10 = P1.flatten_literal(wv);

  Cx Zn = -(clog(wj) - clog(wm)) * clog(za) - (clog(wk) - clog(wj)) * clog(zb) +
          (clog(wk) - clog(wl)) * clog(zc) + (clog(wl) - clog(wm)) * clog(zd);
  Cx dd = X0 - P10 - Zn;
  double k = std::round(dd.real() / (4 * kPi2));
  return std::abs(dd - Cx(4 * kPi2 * k, 0));
}

double check_remaining_endpoint(Rng& rng) {
  // endpoint of the over-bridge, positive crossing, all regions bounded:
  // t3 = zd/zc = 1 - wl/wj, u1 = wm/wj = 1 - zd/za
  Cx za = draw(rng), zc = draw(rng), zd = draw(rng);
  Cx wj = draw(rng);
  Cx wl = wj * (1.0 - zd / zc);
  Cx wm = wj * (1.0 - zd / za);
  for (Cx v : {wl, wm})
    if (degenerate(v, 1e-3)) throw DegenerateSample("degenerate region value");

  PotentialFunction X;  // Li2(zd/zc) - Li2(zd/za) over vars (za, zc, zd)
  X.variable_count = 3;
  X.add_dilog(+1, Monomial::var(2) * Monomial::var(1, -1));
  X.add_dilog(-1, Monomial::var(2) * Monomial::var(0, -1));
  std::vector<Cx> zv{za, zc, zd};
  Cx X0 = X.flatten_literal(zv);

  PotentialFunction Y;  // Li2(wm/wj) - Li2(wl/wj) over vars (wj, wl, wm)
  Y.variable_count = 3;
  Y.add_dilog(+1, Monomial::var(2) * Monomial::var(0, -1));
  Y.add_dilog(-1, Monomial::var(1) * Monomial::var(0, -1));
  std::vector<Cx> wv{wj, wl, wm};
  Cx Y0 = Y.flatten_literal(wv);

  Cx Zn = -(clog(wj) - clog(wm)) * clog(za) + (clog(wj) - clog(wl)) * clog(zc) +
          (clog(wl) - clog(wm)) * clog(zd);
  Cx dd = X0 - Y0 - Zn;
  double k = std::round(dd.real() / (4 * kPi2));
  return std::abs(dd - Cx(4 * kPi2 * k, 0));
}

}  // namespace optlim
