#include "optlim/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <thread>

#include "optlim/rng.hpp"
#include "oct_detail.hpp"

namespace optlim {
namespace {

using detail::slot_letters;

// dense complex linear solve, partial pivoting; systems here are tiny
bool lin_solve(std::vector<std::vector<Cx>>& a, std::vector<Cx>& b) {
  int n = static_cast<int>(b.size());
  for (int col = 0; col < n; ++col) {
    int piv = col;
    for (int r = col + 1; r < n; ++r)
      if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
    if (std::abs(a[piv][col]) < 1e-300) return false;
    std::swap(a[piv], a[col]);
    std::swap(b[piv], b[col]);
    for (int r = col + 1; r < n; ++r) {
      Cx f = a[r][col] / a[col][col];
      for (int c = col; c < n; ++c) a[r][c] -= f * a[col][c];
      b[r] -= f * b[col];
    }
  }
  for (int col = n - 1; col >= 0; --col) {
    b[col] /= a[col][col];
    for (int r = 0; r < col; ++r) b[r] -= a[r][col] * b[col];
  }
  return true;
}

struct Evaluator {
  const ShapeSystem& sys;

  // F_l = prod f^e - 1 in ratio form: well scaled near solutions. Poles and
  // zeros surface as huge values the line search backs away from.
  void eval(const std::vector<Cx>& x, std::vector<Cx>& F,
            std::vector<std::vector<Cx>>* J) const {
    int n = sys.nvars;
    F.assign(static_cast<size_t>(n), Cx(0, 0));
    if (J) J->assign(static_cast<size_t>(n), std::vector<Cx>(static_cast<size_t>(n), Cx(0, 0)));
    for (int l = 0; l < n; ++l) {
      Cx R(1, 0);
      std::vector<Cx> dlog(static_cast<size_t>(n), Cx(0, 0));
      bool bad = false;
      for (const auto& f : sys.equations[static_cast<size_t>(l)]) {
        Cx mval = f.m.eval(x);
        Cx base = f.one_minus ? 1.0 - mval : mval;
        if (std::abs(base) < 1e-150 || std::abs(base) > 1e150 || !finite(base)) {
          bad = true;
          break;
        }
        Cx acc(1, 0);
        for (int i = 0; i < std::abs(f.exp); ++i) acc *= base;
        R *= f.exp > 0 ? acc : 1.0 / acc;
        if (J) {
          for (const auto& [v, a] : f.m.exponents()) {
            Cx dbase = static_cast<double>(a) * mval / x[static_cast<size_t>(v)];
            if (f.one_minus) dbase = -dbase;
            dlog[static_cast<size_t>(v)] += static_cast<double>(f.exp) * dbase / base;
          }
        }
      }
      if (bad || !finite(R)) {
        F[static_cast<size_t>(l)] = Cx(1e30, 0);
        if (J)
          for (int v = 0; v < n; ++v)
            (*J)[static_cast<size_t>(l)][static_cast<size_t>(v)] = Cx(0, 0);
        continue;
      }
      F[static_cast<size_t>(l)] = R - 1.0;
      if (J)
        for (int v = 0; v < n; ++v)
          (*J)[static_cast<size_t>(l)][static_cast<size_t>(v)] =
              R * dlog[static_cast<size_t>(v)];
    }
  }

  double fnorm(const std::vector<Cx>& F) const {
    double m = 0;
    for (Cx v : F) m = std::max(m, std::abs(v));
    return m;
  }
};

bool newton(const Evaluator& ev, std::vector<Cx>& x, int iters, double tol) {
  int n = static_cast<int>(x.size());
  std::vector<Cx> F;
  std::vector<std::vector<Cx>> J;
  for (int it = 0; it < iters; ++it) {
    for (Cx v : x)
      if (!finite(v) || std::abs(v) < 1e-12 || std::abs(v) > 1e12) return false;
    ev.eval(x, F, &J);
    double fn = ev.fnorm(F);
    if (fn < tol) return true;
    std::vector<Cx> rhs(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) rhs[static_cast<size_t>(i)] = -F[static_cast<size_t>(i)];
    auto A = J;
    if (!lin_solve(A, rhs)) return false;
    double lam = 1.0;
    std::vector<Cx> Fn;
    for (int half = 0; half < 30; ++half) {
      std::vector<Cx> xn = x;
      for (int i = 0; i < n; ++i) xn[static_cast<size_t>(i)] += lam * rhs[static_cast<size_t>(i)];
      ev.eval(xn, Fn, nullptr);
      if (ev.fnorm(Fn) < fn) {
        x = xn;
        break;
      }
      lam *= 0.5;
      if (half == 29) return false;
    }
  }
  ev.eval(x, F, nullptr);
  return ev.fnorm(F) < tol;
}

}  // namespace

bool polish(const ShapeSystem& sys, std::vector<Cx>& x, double tol) {
  Evaluator ev{sys};
  if (!newton(ev, x, 60, 1e-13)) return false;
  return system_residual(sys, x) <= tol;
}

bool merge_candidate(SolutionSet& sols, const ShapeSystem& sys,
                     std::vector<Cx> x, double tol) {
  if (!polish(sys, x, tol)) return false;
  for (const auto& s : sols.solutions) {
    double d = 0;
    for (size_t k = 0; k < x.size(); ++k)
      d = std::max(d, std::abs(s.values[k] - x[k]));
    if (d < 1e-6) return false;
  }
  Solution s;
  s.values = std::move(x);
  s.residual = system_residual(sys, s.values);
  sols.solutions.push_back(std::move(s));
  std::sort(sols.solutions.begin(), sols.solutions.end(),
            [](const Solution& a, const Solution& b) {
              for (size_t i = 0; i < a.values.size(); ++i) {
                if (a.values[i].real() != b.values[i].real())
                  return a.values[i].real() < b.values[i].real();
                if (a.values[i].imag() != b.values[i].imag())
                  return a.values[i].imag() < b.values[i].imag();
              }
              return false;
            });
  return true;
}

ShapeSystem system_from_potential(const PotentialFunction& p) {
  ShapeSystem s;
  s.nvars = p.variable_count;
  for (int l = 0; l < p.variable_count; ++l)
    s.equations.push_back(shape_product_form(p, l));
  return s;
}

double system_residual(const ShapeSystem& sys, std::span<const Cx> x) {
  double r = 0;
  for (const auto& eq : sys.equations) {
    Cx v = eval_shape_product(eq, x);
    if (!finite(v)) return std::numeric_limits<double>::infinity();
    r = std::max(r, std::abs(v - 1.0));
  }
  return r;
}

SolutionSet solve(const ShapeSystem& sys, const SolveOptions& opts) {
  if (sys.equations.empty()) throw NoConvergence("empty system");
  SolutionSet out;
  int n = sys.nvars;
  Evaluator ev{sys};

  // structured seeds near the regular-tetrahedron shape, then random annulus
  int total = opts.seeds + 2;
  std::vector<std::vector<Cx>> results(static_cast<size_t>(total));
  std::vector<char> ok(static_cast<size_t>(total), 0);

  auto run_range = [&](int lo, int hi) {
    for (int i = lo; i < hi; ++i) {
      std::vector<Cx> x(static_cast<size_t>(n));
      if (i == 0) {
        for (auto& v : x) v = std::polar(1.0, kPi / 3.0);
      } else if (i == 1) {
        for (auto& v : x) v = std::polar(1.0, -kPi / 3.0);
      } else {
        Rng rng = Rng::stream(opts.rng_seed, static_cast<std::uint64_t>(i));
        for (auto& v : x) v = rng.annulus(0.1, 10.0);
      }
      if (newton(ev, x, opts.max_newton_iters, 1e-13)) {
        if (system_residual(sys, x) <= opts.tol) {
          results[static_cast<size_t>(i)] = std::move(x);
          ok[static_cast<size_t>(i)] = 1;
        }
      }
    }
  };
  int threads = std::max(1, opts.threads);
  if (threads == 1 || total < 8) {
    run_range(0, total);
  } else {
    std::vector<std::thread> pool;
    int chunk = (total + threads - 1) / threads;
    for (int t = 0; t < threads; ++t) {
      int lo = t * chunk, hi = std::min(total, lo + chunk);
      if (lo < hi) pool.emplace_back(run_range, lo, hi);
    }
    for (auto& th : pool) th.join();
  }

  out.seeds_tried = total;
  for (int i = 0; i < total; ++i) {
    if (!ok[static_cast<size_t>(i)]) continue;
    ++out.converged;
    const auto& x = results[static_cast<size_t>(i)];
    bool dup = false;
    for (const auto& s : out.solutions) {
      double d = 0;
      for (int k = 0; k < n; ++k)
        d = std::max(d, std::abs(s.values[static_cast<size_t>(k)] - x[static_cast<size_t>(k)]));
      if (d < 1e-6) {
        dup = true;
        break;
      }
    }
    if (dup) continue;
    Solution s;
    s.values = x;
    s.residual = system_residual(sys, x);
    out.solutions.push_back(std::move(s));
  }
  // canonical order: lexicographic on (Re, Im) coordinates
  std::sort(out.solutions.begin(), out.solutions.end(),
            [](const Solution& a, const Solution& b) {
              for (size_t i = 0; i < a.values.size(); ++i) {
                if (a.values[i].real() != b.values[i].real())
                  return a.values[i].real() < b.values[i].real();
                if (a.values[i].imag() != b.values[i].imag())
                  return a.values[i].imag() < b.values[i].imag();
              }
              return false;
            });
  if (out.solutions.empty())
    throw NoConvergence("no seed converged to a solution (tried " +
                        std::to_string(total) + ")");
  return out;
}

void classify(SolutionSet& sols, const Triangulation& tri) {
  int best = -1;
  double bestvol = -1e300;
  for (size_t i = 0; i < sols.solutions.size(); ++i) {
    auto& s = sols.solutions[i];
    s.shapes = tri.shapes(s.values);
    s.essential = tri.essential(s.values);
    s.geometric = false;
    if (!s.essential) {
      s.volume = 0.0;
      continue;
    }
    s.volume = tri.volume(s.values);
    s.positively_oriented =
        std::all_of(s.shapes.begin(), s.shapes.end(),
                    [](Cx z) { return z.imag() > 0.0; });
    if (s.volume > bestvol) {
      bestvol = s.volume;
      best = static_cast<int>(i);
    }
  }
  sols.geometric_index = best;
  if (best >= 0) sols.solutions[static_cast<size_t>(best)].geometric = true;
}

// ------------------------------------------------------------- conversions

namespace {

struct CrossingShapes {
  // letter-indexed live values; quiet NaN when the tetrahedron is dead
  std::array<Cx, 4> t{Cx(0, 0), Cx(0, 0), Cx(0, 0), Cx(0, 0)};
  std::array<bool, 4> t_live{false, false, false, false};
  std::array<Cx, 5> u{};
  std::array<bool, 5> u_live{false, false, false, false, false};
};

std::map<int, CrossingShapes> collect_shapes(const Triangulation& yok,
                                             const Triangulation& thu,
                                             std::span<const Cx> z,
                                             std::span<const Cx> w,
                                             bool eval_t, bool eval_u) {
  std::map<int, CrossingShapes> out;
  if (eval_t)
    for (const auto& tet : yok.tets) {
      int code = detail::corner_code(tet.pairs[0][0], tet.pairs[0][1]);
      auto& cs = out[tet.crossing];
      cs.t[static_cast<size_t>(code)] = tet.shape.eval(z);
      cs.t_live[static_cast<size_t>(code)] = true;
    }
  if (eval_u)
    for (const auto& tet : thu.tets) {
      int code = detail::u_code(tet.pairs[0][0], tet.pairs[0][1]);
      auto& cs = out[tet.crossing];
      cs.u[static_cast<size_t>(code)] = tet.shape.eval(w);
      cs.u_live[static_cast<size_t>(code)] = true;
    }
  return out;
}

void check_shape(Cx v) {
  if (!finite(v) || std::abs(v) < 1e-10 || std::abs(v - 1.0) < 1e-10 ||
      std::abs(v) > 1e10)
    throw NonEssentialImage("induced shape lands in {0, 1, infinity}");
}

/// Live thurston tets matched to live yokota tets with the same vertex
/// classes (the collapsed-crossing coincidence of the two subdivisions).
struct TetMatch {
  int ucode;
  int tcode;
  int level;  // u = shape_level(t, level)
};

std::vector<TetMatch> trivalent_matches(const Triangulation& yok,
                                        const Triangulation& thu, int ci) {
  std::vector<TetMatch> out;
  for (const auto& tt : thu.tets) {
    if (tt.crossing != ci) continue;
    std::array<int, 4> clsT;
    for (int k = 0; k < 4; ++k)
      clsT[static_cast<size_t>(k)] = thu.vertex_class(ci, tt.verts[static_cast<size_t>(k)]);
    std::sort(clsT.begin(), clsT.end());
    auto base = detail::pkey(tt.pairs[0][0], tt.pairs[0][1]);
    auto nbase = detail::pkey(thu.vertex_class(ci, base.first),
                              thu.vertex_class(ci, base.second));
    for (const auto& yt : yok.tets) {
      if (yt.crossing != ci) continue;
      std::array<int, 4> clsY;
      for (int k = 0; k < 4; ++k)
        clsY[static_cast<size_t>(k)] = yok.vertex_class(ci, yt.verts[static_cast<size_t>(k)]);
      std::sort(clsY.begin(), clsY.end());
      if (clsY != clsT) continue;
      for (const auto& p : yt.pairs) {
        for (auto [x, y] : {std::pair{p[0], p[1]}, std::pair{p[2], p[3]}}) {
          if (detail::pkey(yok.vertex_class(ci, x), yok.vertex_class(ci, y)) !=
              nbase)
            continue;
          out.push_back({detail::u_code(tt.pairs[0][0], tt.pairs[0][1]),
                         detail::corner_code(yt.pairs[0][0], yt.pairs[0][1]),
                         p[4]});
          goto matched;
        }
      }
    matched:;
    }
  }
  return out;
}

// 4-5 move rows: u_i = t_a' t_b''
constexpr int kRowT[4][2] = {{0, 3}, {0, 1}, {2, 1}, {2, 3}};

}  // namespace

std::vector<Cx> convert_z_to_w(std::span<const Cx> z, const TangleGraph& g,
                               const VariableAssignment& va,
                               const Triangulation& yok,
                               const Triangulation& thu, double tol) {
  auto shapes = collect_shapes(yok, thu, z, {}, true, false);
  // u values per crossing
  std::map<std::pair<int, int>, Cx> uvals;  // (crossing, ucode 0..3)
  for (int ci : g.alive) {
    auto& cs = shapes[ci];
    int nlive = 0;
    for (bool b : cs.t_live) nlive += b;
    if (nlive == 4 || (!g.trivalent(ci) && nlive == 3)) {
      for (int uk = 0; uk < 4; ++uk) {
        int a = kRowT[uk][0], b = kRowT[uk][1];
        if (!cs.t_live[static_cast<size_t>(a)] || !cs.t_live[static_cast<size_t>(b)]) continue;
        Cx u = shape_prime(cs.t[static_cast<size_t>(a)]) *
               shape_dprime(cs.t[static_cast<size_t>(b)]);
        check_shape(u);
        uvals[{ci, uk}] = u;
      }
    } else if (g.trivalent(ci)) {
      for (const auto& m : trivalent_matches(yok, thu, ci)) {
        if (m.ucode >= 4) continue;
        Cx u = shape_level(cs.t[static_cast<size_t>(m.tcode)], m.level);
        check_shape(u);
        uvals[{ci, m.ucode}] = u;
      }
    } else {
      throw NonEssentialImage("unexpected collapse pattern");
    }
  }
  // propagate region values from the unit region
  std::map<int, Cx> wal;
  wal[va.unit_region] = Cx(1, 0);
  struct Edge {
    int rb, ra;
    Cx ratio;  // w_ra = w_rb * ratio
  };
  std::vector<Edge> edges;
  for (auto& [key, u] : uvals) {
    auto [ci, uk] = key;
    int letter = detail::branch_letter_of_u(uk);
    auto ls = slot_letters(g.d.sign(ci));
    int slot = 0;
    for (int i = 0; i < 4; ++i)
      if (ls[static_cast<size_t>(i)] == letter) slot = i;
    int rb = g.corner_region(ci, (slot + 3) % 4);
    int ra = g.corner_region(ci, slot);
    // over branch: u = w_rb / w_ra; under: u = w_ra / w_rb
    Cx ratio = detail::is_over_letter(letter) ? 1.0 / u : u;
    edges.push_back({rb, ra, ratio});
  }
  bool changed = true;
  while (changed) {
    changed = false;
    for (const auto& e : edges) {
      auto ib = wal.find(e.rb), ia = wal.find(e.ra);
      if (ib != wal.end() && ia == wal.end()) {
        wal[e.ra] = ib->second * e.ratio;
        changed = true;
      } else if (ia != wal.end() && ib == wal.end()) {
        wal[e.rb] = ia->second / e.ratio;
        changed = true;
      }
    }
  }
  for (const auto& e : edges) {
    if (!wal.count(e.rb) || !wal.count(e.ra))
      throw NonEssentialImage("region unreachable during conversion");
    if (std::abs(wal[e.ra] / wal[e.rb] - e.ratio) > std::max(tol, 1e-8))
      throw NonEssentialImage("inconsistent region ratios");
  }
  std::vector<Cx> w(static_cast<size_t>(va.m));
  for (int i = 0; i < va.m; ++i) {
    auto it = wal.find(va.wvars[static_cast<size_t>(i)]);
    if (it == wal.end()) throw NonEssentialImage("w variable unreachable");
    w[static_cast<size_t>(i)] = it->second;
  }
  return w;
}

std::vector<Cx> convert_w_to_z(std::span<const Cx> w, const TangleGraph& g,
                               const VariableAssignment& va,
                               const Triangulation& yok,
                               const Triangulation& thu, double tol) {
  auto shapes = collect_shapes(yok, thu, {}, w, false, true);
  std::map<std::pair<int, int>, Cx> tvals;  // (crossing, tcode)
  for (int ci : g.alive) {
    auto& cs = shapes[ci];
    auto U = [&](int k) { return cs.u[static_cast<size_t>(k)]; };
    bool live5 = cs.u_live[0] && cs.u_live[1] && cs.u_live[2] && cs.u_live[3] &&
                 cs.u_live[4];
    if (live5) {
      std::array<Cx, 4> t = move_45_inverse({U(0), U(1), U(2), U(3), U(4)});
      for (int k = 0; k < 4; ++k) {
        check_shape(t[static_cast<size_t>(k)]);
        tvals[{ci, k}] = t[static_cast<size_t>(k)];
      }
    } else if (g.trivalent(ci)) {
      for (const auto& m : trivalent_matches(yok, thu, ci)) {
        // u = level(t, lv)  =>  t = prime^((3 - lv) mod 3)(u)
        Cx t = shape_level(U(m.ucode), (3 - m.level) % 3);
        check_shape(t);
        tvals[{ci, m.tcode}] = t;
      }
    } else {
      // one-collapse inverses: limits of the 4-5 move inverse as the
      // collapsed corner's region variable goes to zero
      auto have = [&](int a, int b) {
        return cs.u_live[static_cast<size_t>(a)] && cs.u_live[static_cast<size_t>(b)] &&
               !cs.u_live[static_cast<size_t>(4)];
      };
      auto emit = [&](int code, Cx v) {
        check_shape(v);
        tvals[{ci, code}] = v;
      };
      if (have(0, 1) && !cs.u_live[2] && !cs.u_live[3]) {  // AB collapsed
        emit(0, shape_dprime(U(0)) * shape_dprime(U(1)));
        emit(1, U(0) * shape_prime(U(1)));
        emit(3, shape_prime(U(0)) * U(1));
      } else if (have(1, 2) && !cs.u_live[0] && !cs.u_live[3]) {  // BC collapsed
        emit(0, shape_dprime(U(1)) * U(2));
        emit(1, shape_prime(U(1)) * shape_prime(U(2)));
        emit(2, U(1) * shape_dprime(U(2)));
      } else if (have(2, 3) && !cs.u_live[0] && !cs.u_live[1]) {  // CD collapsed
        emit(1, shape_prime(U(2)) * U(3));
        emit(2, shape_dprime(U(2)) * shape_dprime(U(3)));
        emit(3, U(2) * shape_prime(U(3)));
      } else if (have(3, 0) && !cs.u_live[1] && !cs.u_live[2]) {  // DA collapsed
        emit(2, U(0) * shape_dprime(U(3)));
        emit(3, shape_prime(U(3)) * shape_prime(U(0)));
        emit(0, shape_dprime(U(0)) * U(3));
      } else {
        throw NonEssentialImage("unexpected live shape pattern");
      }
    }
  }
  // propagate side values: non-contributing sides carry 1
  std::map<int, Cx> zval;
  for (int rep : g.gsides)
    if (!g.side_contributing(rep)) zval[rep] = Cx(1, 0);
  struct Edge {
    int den, num;
    Cx ratio;  // z_num = z_den * ratio
  };
  std::vector<Edge> edges;
  const auto& d = g.d;
  for (auto& [key, tv] : tvals) {
    auto [ci, code] = key;
    auto ls = slot_letters(d.sign(ci));
    for (int i = 0; i < 4; ++i) {
      if (detail::corner_code(ls[static_cast<size_t>(i)], ls[static_cast<size_t>((i + 1) % 4)]) != code)
        continue;
      int a_den = d.arc(ci, i), a_num = d.arc(ci, (i + 1) % 4);
      if (g.deleted_arcs.count(a_den) || g.deleted_arcs.count(a_num)) break;
      edges.push_back({g.side_rep(a_den), g.side_rep(a_num), tv});
      break;
    }
  }
  bool changed = true;
  while (changed) {
    changed = false;
    for (const auto& e : edges) {
      auto id = zval.find(e.den), in = zval.find(e.num);
      if (id != zval.end() && in == zval.end()) {
        zval[e.num] = id->second * e.ratio;
        changed = true;
      } else if (in != zval.end() && id == zval.end()) {
        zval[e.den] = in->second / e.ratio;
        changed = true;
      }
    }
  }
  for (const auto& e : edges) {
    if (!zval.count(e.den) || !zval.count(e.num))
      throw NonEssentialImage("side unreachable during conversion");
    if (std::abs(zval[e.num] / zval[e.den] - e.ratio) > std::max(tol, 1e-8))
      throw NonEssentialImage("inconsistent side ratios");
  }
  std::vector<Cx> z(static_cast<size_t>(va.g));
  for (int i = 0; i < va.g; ++i) {
    auto it = zval.find(va.zsides[static_cast<size_t>(i)]);
    if (it == zval.end()) throw NonEssentialImage("z variable unreachable");
    z[static_cast<size_t>(i)] = it->second;
  }
  return z;
}

}  // namespace optlim
