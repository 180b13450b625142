#include "optlim/triangulation.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <set>

#include <nlohmann/json.hpp>

#include "optlim/rng.hpp"

namespace optlim {
namespace {

inline std::pair<int, int> pkey(int x, int y) {
  return {std::min(x, y), std::max(x, y)};
}

// slot -> equatorial letter, counterclockwise from the under-in slot
inline std::array<int, 4> slot_letters(int sign) {
  return sign > 0 ? std::array<int, 4>{VB, VC, VD, VA}
                  : std::array<int, 4>{VD, VA, VB, VC};
}

inline bool is_over_letter(int v) { return v == VA || v == VC; }
inline bool is_horizontal(int x, int y) {
  auto [a, b] = pkey(x, y);
  return (a == VA && (b == VB || b == VD)) || (a == VB && b == VC) ||
         (a == VC && b == VD);
}

struct UnitFace {
  int v, apex, u, corner;
};

std::array<UnitFace, 2> detail_unit_faces(const KnotDiagram& d, int ci, int slot) {
  auto ls = slot_letters(d.sign(ci));
  int v = ls[slot];
  int apex = d.slot_is_under(slot) ? VE : VF;
  return {UnitFace{v, apex, ls[(slot + 1) % 4], slot},
          UnitFace{v, apex, ls[(slot + 3) % 4], (slot + 3) % 4}};
}

struct PairSpec {
  std::array<int, 2> e1, e2;
  int level;
};
struct TetSpec {
  std::array<int, 4> verts;
  char corner0, corner1;  // the level-0 shape's name: horizontal corner pair
                          // for yokota, branch letter (or 0 for the diagonal
                          // tetrahedron) for thurston
  std::array<PairSpec, 3> pairs;
};

const TetSpec kYok[4] = {
    {{VC, VD, VE, VF}, 'C', 'D',
     {{{{VC, VD}, {VE, VF}, 0}, {{VC, VF}, {VD, VE}, 1}, {{VC, VE}, {VD, VF}, 2}}}},
    {{VD, VA, VE, VF}, 'D', 'A',
     {{{{VD, VA}, {VE, VF}, 0}, {{VD, VE}, {VA, VF}, 2}, {{VD, VF}, {VA, VE}, 1}}}},
    {{VA, VB, VE, VF}, 'A', 'B',
     {{{{VA, VB}, {VE, VF}, 0}, {{VA, VF}, {VB, VE}, 1}, {{VA, VE}, {VB, VF}, 2}}}},
    {{VB, VC, VE, VF}, 'B', 'C',
     {{{{VB, VC}, {VE, VF}, 0}, {{VB, VE}, {VC, VF}, 2}, {{VB, VF}, {VC, VE}, 1}}}},
};

const TetSpec kThu[5] = {
    {{VB, VC, VD, VF}, 'C', 0,  // u1 at CF
     {{{{VC, VF}, {VB, VD}, 0}, {{VC, VD}, {VB, VF}, 2}, {{VB, VC}, {VD, VF}, 1}}}},
    {{VA, VC, VD, VE}, 'D', 0,  // u2 at DE
     {{{{VD, VE}, {VA, VC}, 0}, {{VC, VD}, {VA, VE}, 2}, {{VD, VA}, {VC, VE}, 1}}}},
    {{VA, VB, VD, VF}, 'A', 0,  // u3 at AF
     {{{{VA, VF}, {VB, VD}, 0}, {{VD, VA}, {VB, VF}, 1}, {{VA, VB}, {VD, VF}, 2}}}},
    {{VA, VB, VC, VE}, 'B', 0,  // u4 at BE
     {{{{VB, VE}, {VA, VC}, 0}, {{VA, VB}, {VC, VE}, 2}, {{VB, VC}, {VA, VE}, 1}}}},
    {{VA, VB, VC, VD}, 0, 0,  // u5 at the diagonals
     {{{{VB, VD}, {VA, VC}, 0}, {{VC, VD}, {VA, VB}, 1}, {{VB, VC}, {VD, VA}, 2}}}},
};

int letter_pair_index(int x, int y) {
  auto [a, b] = pkey(x, y);
  // 15 unordered pairs over 6 letters
  static int idx[6][6];
  static bool init = [] {
    int k = 0;
    for (int i = 0; i < 6; ++i)
      for (int j = i + 1; j < 6; ++j) idx[i][j] = k++;
    return true;
  }();
  (void)init;
  return idx[a][b];
}

// union-find over (crossing, letter-pair) edge nodes with a dead flag and
// member lists; killing a class merges endpoints at every member octahedron.
struct EdgeDSU {
  std::vector<int> parent;
  std::vector<char> dead;
  std::vector<std::vector<int>> members;  // node ids
  std::vector<int> pending;

  int find(int x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  }
  void unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (members[a].size() < members[b].size()) std::swap(a, b);
    parent[b] = a;
    if (dead[b]) dead[a] = 1;
    members[a].insert(members[a].end(), members[b].begin(), members[b].end());
    members[b].clear();
    if (dead[a]) pending.push_back(a);  // reprocessing is idempotent
  }
  void kill(int x) {
    x = find(x);
    if (!dead[x]) {
      dead[x] = 1;
      pending.push_back(x);
    }
  }
};

struct Builder {
  const TangleGraph& g;
  const VariableAssignment& va;
  Variant variant;
  const TetSpec* specs;
  int nspecs;

  std::vector<std::array<int, 6>> vparent;  // per-crossing vertex DSU
  EdgeDSU edges;

  explicit Builder(const TangleGraph& gg, const VariableAssignment& v,
                   Variant var)
      : g(gg), va(v), variant(var) {
    specs = variant == Variant::Yokota ? kYok : kThu;
    nspecs = variant == Variant::Yokota ? 4 : 5;
  }

  int node(int ci, int x, int y) const {
    return ci * 15 + letter_pair_index(x, y);
  }
  int vfind(int ci, int x) {
    auto& p = vparent[ci];
    while (p[x] != x) {
      p[x] = p[p[x]];
      x = p[x];
    }
    return x;
  }

  std::array<UnitFace, 2> unit_faces(int ci, int slot) const {
    return detail_unit_faces(g.d, ci, slot);
  }

  void build_classes() {
    int n = g.d.n();
    vparent.assign(n, {0, 1, 2, 3, 4, 5});
    edges.parent.resize(n * 15);
    edges.dead.assign(n * 15, 0);
    edges.members.assign(n * 15, {});
    for (int i = 0; i < n * 15; ++i) {
      edges.parent[i] = i;
      edges.members[i] = {i};
    }
    for (int ci = 0; ci < n; ++ci) {
      edges.unite(node(ci, VA, VE), node(ci, VC, VE));
      edges.unite(node(ci, VB, VF), node(ci, VD, VF));
    }
    for (int a = 1; a <= g.d.arc_count; ++a) {
      auto tail = g.d.arc_tail(a), head = g.d.arc_head(a);
      if (a == g.cut_arc) {
        seed(tail);
        seed(head);
      } else {
        glue(tail, head);
      }
    }
    fixpoint();
  }

  void seed(std::pair<int, int> end) {
    auto [ci, s] = end;
    for (const auto& f : unit_faces(ci, s)) {
      edges.kill(node(ci, f.v, f.apex));
      edges.kill(node(ci, f.v, f.u));
      edges.kill(node(ci, f.u, f.apex));
    }
  }

  void glue(std::pair<int, int> tail, std::pair<int, int> head) {
    auto [ct, st] = tail;
    auto [ch, sh] = head;
    auto tf = unit_faces(ct, st);
    auto hf = unit_faces(ch, sh);
    auto cat = [](int l) { return l == VE || l == VF ? 2 : (is_over_letter(l) ? 0 : 1); };
    for (const auto& f1 : tf) {
      int face1 = g.corner_face[ct * 4 + f1.corner];
      const UnitFace* f2 = nullptr;
      for (const auto& h : hf)
        if (g.corner_face[ch * 4 + h.corner] == face1) f2 = &h;
      assert(f2 && "side gluing without a matching region");
      int m[6];
      m[f1.apex] = f2->apex;
      if (cat(f1.v) == cat(f2->v)) {
        m[f1.v] = f2->v;
        m[f1.u] = f2->u;
      } else {
        m[f1.v] = f2->u;
        m[f1.u] = f2->v;
      }
      int tri[3] = {f1.v, f1.apex, f1.u};
      for (int i = 0; i < 3; ++i)
        for (int j = i + 1; j < 3; ++j)
          edges.unite(node(ct, tri[i], tri[j]), node(ch, m[tri[i]], m[tri[j]]));
    }
  }

  void fixpoint() {
    while (!edges.pending.empty()) {
      int r = edges.pending.back();
      edges.pending.pop_back();
      r = edges.find(r);
      if (!edges.dead[r]) continue;
      auto mem = edges.members[r];  // copy: merges mutate the list
      for (int nd : mem) {
        int ci = nd / 15, pi = nd % 15;
        // decode pair index
        int x = 0, y = 0, k = 0;
        for (int i = 0; i < 6 && !y; ++i)
          for (int j = i + 1; j < 6; ++j)
            if (k++ == pi) {
              x = i;
              y = j;
              i = 6;
              break;
            }
        vmerge(ci, x, y);
      }
    }
  }

  void vmerge(int ci, int x, int y) {
    int rx = vfind(ci, x), ry = vfind(ci, y);
    if (rx == ry) return;
    vparent[ci][ry] = rx;
    // renormalize every pair at ci
    std::map<std::pair<int, int>, int> norm;
    for (int a = 0; a < 6; ++a)
      for (int b = a + 1; b < 6; ++b) {
        int na = vfind(ci, a), nb = vfind(ci, b);
        if (na == nb) {
          edges.kill(node(ci, a, b));
          continue;
        }
        auto key = pkey(na, nb);
        auto it = norm.find(key);
        if (it == norm.end())
          norm.emplace(key, node(ci, a, b));
        else
          edges.unite(it->second, node(ci, a, b));
      }
  }

  bool tet_live(int ci, const TetSpec& ts) {
    std::set<int> cls;
    for (int v : ts.verts) cls.insert(vfind(ci, v));
    return cls.size() == 4;
  }

  Monomial base_shape(int ci, const TetSpec& ts) {
    const auto& d = g.d;
    auto ls = slot_letters(d.sign(ci));
    if (variant == Variant::Yokota) {
      int lx = ts.corner0 - 'A', ly = ts.corner1 - 'A';
      for (int i = 0; i < 4; ++i) {
        if (pkey(ls[i], ls[(i + 1) % 4]) != pkey(lx, ly)) continue;
        Monomial m;
        for (auto [slot, e] : {std::pair{(i + 1) % 4, 1}, std::pair{i, -1}}) {
          int a = d.arc(ci, slot);
          if (g.deleted_arcs.count(a)) continue;
          int rep = g.side_rep(a);
          if (va.side_kind_of_rep(rep) == SideKind::Var)
            m = m * Monomial::var(va.z_index_of_rep(rep), e);
        }
        return m;
      }
      throw CollapseError("corner not found");
    }
    auto region_factor = [&](int r) -> Monomial {
      switch (va.region_kind(r)) {
        case RegionKind::Zero:
          return Monomial::zero_factor();
        case RegionKind::Unit:
          return Monomial();
        default:
          return Monomial::var(va.w_index(r));
      }
    };
    auto branch_ratio = [&](int letter) -> Monomial {
      int slot = -1;
      for (int i = 0; i < 4; ++i)
        if (ls[i] == letter) slot = i;
      int rb = g.corner_region(ci, (slot + 3) % 4);
      int ra = g.corner_region(ci, slot);
      int num = is_over_letter(letter) ? rb : ra;
      int den = is_over_letter(letter) ? ra : rb;
      Monomial dm = region_factor(den);
      if (dm.is_zero()) throw CollapseError("zero region under a shape");
      return region_factor(num) * dm.inverse();
    };
    if (ts.corner0 == 0) {  // diagonal tetrahedron: u5 = 1/(u1 u3)
      Monomial u1 = branch_ratio(VC), u3 = branch_ratio(VA);
      if (u1.is_zero() || u3.is_zero())
        throw CollapseError("diagonal shape with zero region");
      return (u1 * u3).inverse();
    }
    return branch_ratio(ts.corner0 - 'A');
  }

  int yokota_sigma(const TetSpec& ts) {
    // sigma(CD) = sigma(AB) = +1, sigma(DA) = sigma(BC) = -1
    return (ts.corner0 == 'C' || ts.corner0 == 'A') ? +1 : -1;
  }
};

}  // namespace

int Tetrahedron::level_at(int x, int y) const {
  auto key = pkey(x, y);
  for (const auto& p : pairs) {
    if (pkey(p[0], p[1]) == key || pkey(p[2], p[3]) == key) return p[4];
  }
  throw std::out_of_range("edge not in tetrahedron");
}

struct Triangulation::Internals {
  TangleGraph g;
  VariableAssignment va;
  // live tets indexed as in Triangulation::tets: (crossing, spec index)
  std::vector<std::pair<int, int>> live;
  // per-crossing vertex classes
  std::vector<std::array<int, 6>> vclass;
  // cancelled thurston pairs: crossing -> list of spec-index pairs
  std::vector<std::pair<int, std::array<int, 2>>> cancelled;
  Variant variant;
  int nspecs;
  const TetSpec* specs;

  int vfind(int ci, int v) const { return vclass[ci][v]; }
};

namespace {

Triangulation build(const TangleGraph& g, const VariableAssignment& va,
                    Variant variant) {
  Builder b(g, va, variant);
  b.build_classes();

  Triangulation tri;
  tri.variant = variant;
  auto internals = std::make_shared<Triangulation::Internals>();
  internals->g = g;
  internals->va = va;
  internals->variant = variant;
  internals->nspecs = b.nspecs;
  internals->specs = b.specs;
  internals->vclass.assign(g.d.n(), {});
  for (int ci = 0; ci < g.d.n(); ++ci)
    for (int v = 0; v < 6; ++v) internals->vclass[ci][v] = b.vfind(ci, v);

  // live tets, with thurston same-class-pair cancellation
  for (int ci : g.alive) {
    std::vector<std::pair<std::array<int, 4>, int>> live_here;
    for (int si = 0; si < b.nspecs; ++si) {
      if (!b.tet_live(ci, b.specs[si])) continue;
      std::array<int, 4> cls;
      for (int k = 0; k < 4; ++k) cls[k] = b.vfind(ci, b.specs[si].verts[k]);
      std::sort(cls.begin(), cls.end());
      live_here.push_back({cls, si});
    }
    if (variant == Variant::Thurston) {
      std::vector<char> drop(live_here.size(), 0);
      for (size_t i = 0; i < live_here.size(); ++i)
        for (size_t j = i + 1; j < live_here.size(); ++j)
          if (live_here[i].first == live_here[j].first) {
            drop[i] = drop[j] = 1;
            internals->cancelled.push_back(
                {ci, {live_here[i].second, live_here[j].second}});
          }
      std::vector<std::pair<std::array<int, 4>, int>> kept;
      for (size_t i = 0; i < live_here.size(); ++i)
        if (!drop[i]) kept.push_back(live_here[i]);
      live_here = kept;
    }
    for (auto& [cls, si] : live_here) {
      const TetSpec& ts = b.specs[si];
      Tetrahedron tet;
      tet.crossing = ci;
      tet.verts = ts.verts;
      tet.shape = b.base_shape(ci, ts);
      tet.orientation = variant == Variant::Yokota ? b.yokota_sigma(ts) : +1;
      for (int k = 0; k < 3; ++k)
        tet.pairs[k] = {ts.pairs[k].e1[0], ts.pairs[k].e1[1], ts.pairs[k].e2[0],
                        ts.pairs[k].e2[1], ts.pairs[k].level};
      internals->live.push_back({ci, si});
      tri.tets.push_back(std::move(tet));
    }
  }

  // edge classes over live tets
  std::map<int, int> root_to_class;
  for (size_t ti = 0; ti < tri.tets.size(); ++ti) {
    const auto& tet = tri.tets[ti];
    for (const auto& p : tet.pairs) {
      for (auto [x, y] : {std::pair{p[0], p[1]}, std::pair{p[2], p[3]}}) {
        int r = b.edges.find(b.node(tet.crossing, x, y));
        if (b.edges.dead[r]) throw CollapseError("live tetrahedron on a collapsed edge");
        auto it = root_to_class.find(r);
        int ki;
        if (it == root_to_class.end()) {
          ki = static_cast<int>(tri.edge_classes.size());
          root_to_class.emplace(r, ki);
          tri.edge_classes.push_back({});
          for (int nd : b.edges.members[r]) {
            int ci = nd / 15, pi = nd % 15, xx = 0, yy = 0, k = 0;
            for (int i = 0; i < 6 && !yy; ++i)
              for (int j = i + 1; j < 6; ++j)
                if (k++ == pi) {
                  xx = i;
                  yy = j;
                  i = 6;
                  break;
                }
            tri.edge_classes[ki].labels.push_back({ci, xx, yy});
          }
        } else {
          ki = it->second;
        }
        tri.edge_classes[ki].members.push_back(
            {static_cast<int>(ti), x, y, p[4]});
      }
    }
  }

  // tags: A if any live-tet member edge is horizontal; else B if any member
  // touches an apex; else C.
  for (auto& kls : tri.edge_classes) {
    char tag = 'C';
    for (const auto& m : kls.members) {
      if (is_horizontal(m.x, m.y)) {
        tag = 'A';
        break;
      }
      if (m.x >= VE || m.y >= VE) tag = 'B';
    }
    kls.tag = tag;
  }

  // region -> class map via live horizontal corner edges
  for (size_t ti = 0; ti < tri.tets.size(); ++ti) {
    const auto& tet = tri.tets[ti];
    int ci = tet.crossing;
    auto ls = slot_letters(g.d.sign(ci));
    for (const auto& p : tet.pairs) {
      for (auto [x, y] : {std::pair{p[0], p[1]}, std::pair{p[2], p[3]}}) {
        if (!is_horizontal(x, y)) continue;
        for (int i = 0; i < 4; ++i) {
          if (pkey(ls[i], ls[(i + 1) % 4]) != pkey(x, y)) continue;
          int region = g.corner_region(ci, i);
          if (region == g.unbounded) continue;
          int r = b.edges.find(b.node(ci, x, y));
          tri.region_class[region] = root_to_class.at(r);
        }
      }
    }
  }

  tri.internals = internals;
  return tri;
}

}  // namespace

Triangulation build_yokota(const TangleGraph& g, const VariableAssignment& va) {
  return build(g, va, Variant::Yokota);
}
Triangulation build_thurston(const TangleGraph& g, const VariableAssignment& va) {
  return build(g, va, Variant::Thurston);
}

std::vector<Cx> Triangulation::shapes(std::span<const Cx> x) const {
  std::vector<Cx> out;
  out.reserve(tets.size());
  for (const auto& t : tets) out.push_back(t.shape.eval(x));
  return out;
}

double Triangulation::volume(std::span<const Cx> x) const {
  double v = 0.0;
  for (const auto& t : tets) v += bloch_wigner(t.shape.eval(x));
  return v;
}

bool Triangulation::essential(std::span<const Cx> x, double margin) const {
  for (const auto& t : tets) {
    Cx s = t.shape.eval(x);
    if (!finite(s)) return false;
    if (std::abs(s) < margin || std::abs(s - 1.0) < margin ||
        std::abs(s) > 1.0 / margin)
      return false;
  }
  return true;
}

Cx Triangulation::class_product(int edge_class, std::span<const Cx> x) const {
  const auto& kls = edge_classes[static_cast<size_t>(edge_class)];
  Cx v(1.0, 0.0);
  for (const auto& m : kls.members) {
    Cx base = tets[static_cast<size_t>(m.tet)].shape.eval(x);
    if (base == Cx(0.0, 0.0) || base == Cx(1.0, 0.0))
      throw NonEssentialPoint("shape at a branch point");
    v *= shape_level(base, m.level);
  }
  return v;
}

ShapeProduct Triangulation::class_product_form(int edge_class) const {
  // u = M; u' = (1-M)^{-1}; u'' = 1 - M^{-1}
  ShapeProduct sp;
  const auto& kls = edge_classes[static_cast<size_t>(edge_class)];
  for (const auto& m : kls.members) {
    const Monomial& mono = tets[static_cast<size_t>(m.tet)].shape;
    switch (m.level) {
      case 0:
        sp.push_back({false, mono, 1});
        break;
      case 1:
        sp.push_back({true, mono, -1});
        break;
      default:
        sp.push_back({true, mono.inverse(), 1});
        break;
    }
  }
  return sp;
}

int Triangulation::vertex_class(int crossing, int letter) const {
  if (!internals)
    throw std::logic_error("triangulation lacks gluing data (re-ingested?)");
  return internals->vfind(crossing, letter);
}

int Triangulation::class_of_region(int region) const {
  auto it = region_class.find(region);
  return it == region_class.end() ? -1 : it->second;
}

std::vector<EdgeResidual> verify_edge_relations(const Triangulation& t,
                                                std::span<const Cx> x) {
  if (!t.essential(x)) throw NonEssentialPoint("shapes degenerate at this point");
  std::vector<EdgeResidual> out;
  for (size_t k = 0; k < t.edge_classes.size(); ++k) {
    EdgeResidual r;
    r.edge_class = static_cast<int>(k);
    r.tag = t.edge_classes[k].tag;
    r.structural = r.tag != 'A';
    r.residual = std::abs(t.class_product(static_cast<int>(k), x) - 1.0);
    out.push_back(r);
  }
  return out;
}

// ------------------------------------------------------------- cusp walk

namespace {

using Face = std::array<int, 3>;  // sorted letters

Face face_sorted(int a, int b, int c) {
  Face f{a, b, c};
  std::sort(f.begin(), f.end());
  return f;
}

struct CuspWalker {
  const Triangulation& tri;
  const Triangulation::Internals& in;
  std::span<const Cx> x;

  // static adjacency (all tets, incl. dead): (ci, spec, face) -> partner + map
  struct Adj {
    int ci, spec;
    Face face;
    std::array<int, 6> vmap;  // letter -> letter at partner
  };
  std::map<std::tuple<int, int, Face>, Adj> adj;
  std::map<std::pair<int, int>, int> live_index;  // (ci, spec) -> tet index

  CuspWalker(const Triangulation& t, std::span<const Cx> xx)
      : tri(t), in(*t.internals), x(xx) {
    for (size_t i = 0; i < in.live.size(); ++i) live_index[in.live[i]] = static_cast<int>(i);
    build_adjacency();
  }

  static std::array<int, 6> idmap() { return {0, 1, 2, 3, 4, 5}; }

  void addpair(int c1, int s1, Face f1, int c2, int s2, Face f2,
               std::array<int, 6> m) {
    adj[{c1, s1, f1}] = {c2, s2, f2, m};
    std::array<int, 6> inv{};
    for (int v = 0; v < 6; ++v) inv[m[v]] = v;
    adj[{c2, s2, f2}] = {c1, s1, f1, inv};
  }

  int spec_of_face(int /*ci*/, const Face& f) const {
    int hit = -1;
    for (int si = 0; si < in.nspecs; ++si) {
      const auto& vs = in.specs[si].verts;
      int cnt = 0;
      for (int v : f)
        if (std::find(vs.begin(), vs.end(), v) != vs.end()) ++cnt;
      if (cnt == 3) {
        if (hit >= 0) return -2;  // shared (internal) face
        hit = si;
      }
    }
    return hit;
  }

  void build_adjacency() {
    const auto& g = in.g;
    // internal faces: shared letter triples within one octahedron
    for (int ci = 0; ci < g.d.n(); ++ci) {
      std::map<Face, std::vector<int>> byface;
      for (int si = 0; si < in.nspecs; ++si) {
        const auto& vs = in.specs[si].verts;
        for (int k = 0; k < 4; ++k) {
          Face f = face_sorted(vs[(k + 1) % 4], vs[(k + 2) % 4], vs[(k + 3) % 4]);
          byface[f].push_back(si);
        }
      }
      for (auto& [f, sis] : byface)
        if (sis.size() == 2) addpair(ci, sis[0], f, ci, sis[1], f, idmap());
    }
    // external gluings
    auto cat = [](int l) {
      return l == VE || l == VF ? 2 : (is_over_letter(l) ? 0 : 1);
    };
    for (int a = 1; a <= g.d.arc_count; ++a) {
      if (a == g.cut_arc) continue;
      auto [ct, st] = g.d.arc_tail(a);
      auto [ch, sh] = g.d.arc_head(a);
      auto tf = detail_unit_faces(g.d, ct, st);
      auto hf = detail_unit_faces(g.d, ch, sh);
      for (const auto& f1 : tf) {
        int face1 = g.corner_face[ct * 4 + f1.corner];
        const auto* f2 = &hf[0];
        if (g.corner_face[ch * 4 + hf[0].corner] != face1) f2 = &hf[1];
        // total bijection: face letters by the category rule, the leftover
        // apex to the leftover apex, leftover equatorials by category
        std::array<int, 6> m{};
        for (auto& v : m) v = -1;
        m[f1.apex] = f2->apex;
        int apex1o = f1.apex == VE ? VF : VE;
        int apex2o = f2->apex == VE ? VF : VE;
        m[apex1o] = apex2o;
        if (cat(f1.v) == cat(f2->v)) {
          m[f1.v] = f2->v;
          m[f1.u] = f2->u;
        } else {
          m[f1.v] = f2->u;
          m[f1.u] = f2->v;
        }
        for (int v1 : {VA, VB, VC, VD}) {
          if (m[v1] >= 0) continue;
          for (int v2 : {VA, VB, VC, VD}) {
            bool used = false;
            for (int q = 0; q < 6; ++q) used = used || m[q] == v2;
            if (!used && cat(v1) == (cat(f1.v) == cat(f2->v) ? cat(v2) : 1 - cat(v2))) {
              m[v1] = v2;
              break;
            }
          }
          if (m[v1] < 0)
            for (int v2 : {VA, VB, VC, VD}) {
              bool used = false;
              for (int q = 0; q < 6; ++q) used = used || m[q] == v2;
              if (!used) {
                m[v1] = v2;
                break;
              }
            }
        }
        Face tri1 = face_sorted(f1.v, f1.apex, f1.u);
        Face tri2 = face_sorted(f2->v, f2->apex, f2->u);
        int s1 = spec_of_face(ct, tri1), s2 = spec_of_face(ch, tri2);
        assert(s1 >= 0 && s2 >= 0);
        addpair(ct, s1, tri1, ch, s2, tri2, m);
      }
    }
  }

  Face normalize(int ci, const Face& f) const {
    return face_sorted(in.vfind(ci, f[0]), in.vfind(ci, f[1]), in.vfind(ci, f[2]));
  }

  /// Resolve a face crossing to a live tet, passing through dead tets and
  /// cancelled pairs. Returns (tet index, face letters there, letter map).
  bool neighbor(int ci, int spec, Face face, int& tet_out, Face& face_out,
                std::array<int, 6>& map_out, int depth = 0) const {
    if (depth > 64) return false;
    auto it = adj.find({ci, spec, face});
    if (it == adj.end()) return false;
    const Adj& a = it->second;
    auto li = live_index.find({a.ci, a.spec});
    if (li != live_index.end()) {
      tet_out = li->second;
      face_out = a.face;
      map_out = a.vmap;
      return true;
    }
    // not live: pass through
    const auto& vs = in.specs[a.spec].verts;
    std::set<int> cls;
    for (int v : vs) cls.insert(in.vfind(a.ci, v));
    Face exit{};
    if (cls.size() == 4) {
      // cancelled thurston pair: exit via the sibling's equal-class face
      int sib = -1;
      for (int si = 0; si < in.nspecs; ++si) {
        if (si == a.spec) continue;
        std::set<int> c2;
        for (int v : in.specs[si].verts) c2.insert(in.vfind(a.ci, v));
        if (c2 == cls) sib = si;
      }
      if (sib < 0) return false;
      Face ntrip = normalize(a.ci, a.face);
      const auto& svs = in.specs[sib].verts;
      std::array<int, 6> m2{};
      for (auto& v : m2) v = -1;
      bool found = false;
      for (int k = 0; k < 4 && !found; ++k) {
        Face f3 = face_sorted(svs[(k + 1) % 4], svs[(k + 2) % 4], svs[(k + 3) % 4]);
        if (normalize(a.ci, f3) != ntrip) continue;
        for (int v : a.face)
          for (int w : f3)
            if (in.vfind(a.ci, v) == in.vfind(a.ci, w)) m2[v] = w;
        exit = f3;
        found = true;
      }
      if (!found) return false;
      int t2;
      Face fo;
      std::array<int, 6> mm{};
      if (!neighbor(a.ci, sib, exit, t2, fo, mm, depth + 1)) return false;
      tet_out = t2;
      face_out = fo;
      for (int v = 0; v < 6; ++v) {
        int w = a.vmap[v];
        map_out[v] = (m2[w] >= 0) ? mm[m2[w]] : mm[w];
      }
      return true;
    }
    // dead tet: the sibling face with the same normalized triple
    Face ntrip = normalize(a.ci, a.face);
    if (ntrip[0] == ntrip[1] || ntrip[1] == ntrip[2]) return false;  // degenerate
    std::array<int, 6> m2{};
    for (auto& v : m2) v = -1;
    bool found = false;
    for (int k = 0; k < 4 && !found; ++k) {
      Face f3 = face_sorted(vs[(k + 1) % 4], vs[(k + 2) % 4], vs[(k + 3) % 4]);
      if (f3 == a.face) continue;
      if (normalize(a.ci, f3) != ntrip) continue;
      for (int v : a.face)
        for (int w : f3)
          if (in.vfind(a.ci, v) == in.vfind(a.ci, w)) m2[v] = w;
      exit = f3;
      found = true;
    }
    if (!found) return false;
    int t2;
    Face fo;
    std::array<int, 6> mm{};
    if (!neighbor(a.ci, a.spec, exit, t2, fo, mm, depth + 1)) return false;
    tet_out = t2;
    face_out = fo;
    for (int v = 0; v < 6; ++v) {
      int w = a.vmap[v];
      map_out[v] = (m2[w] >= 0) ? mm[m2[w]] : mm[w];
    }
    return true;
  }

  Cx corner_shape(int tet, int v, int w) const {
    const auto& T = tri.tets[static_cast<size_t>(tet)];
    return shape_level(T.shape.eval(x), T.level_at(v, w));
  }

  /// Alternating left/right normal walk from a start state; develops the
  /// similarity structure and returns |a - 1| of the cycle holonomy, or a
  /// negative value when the walk fails to close cleanly.
  double develop(int tet0, int v0, Face face0, int max_steps = 4096) const {
    struct State {
      int tet, v;
      Face face;
      int parity;
      bool operator<(const State& o) const {
        return std::tie(tet, v, face, parity) <
               std::tie(o.tet, o.v, o.face, o.parity);
      }
    };
    std::map<State, int> seen;
    std::vector<State> path;
    State s{tet0, v0, face0, 0};
    int steps = 0;
    while (!seen.count(s) && steps < max_steps) {
      seen[s] = steps++;
      path.push_back(s);
      const auto& T = tri.tets[static_cast<size_t>(s.tet)];
      int others[2], oi = 0;
      for (int v : s.face)
        if (v != s.v) others[oi++] = v;
      int cut = s.parity == 0 ? others[0] : others[1];
      int c_ = -1;
      for (int v : T.verts)
        if (v != s.face[0] && v != s.face[1] && v != s.face[2]) c_ = v;
      Face exit = face_sorted(s.v, cut, c_);
      auto [ci, spec] = in.live[static_cast<size_t>(s.tet)];
      int t2;
      Face f2;
      std::array<int, 6> m{};
      if (!neighbor(ci, spec, exit, t2, f2, m)) return -1.0;
      int vm = m[s.v];
      if (vm != f2[0] && vm != f2[1] && vm != f2[2]) return -1.0;
      s = State{t2, vm, f2, 1 - s.parity};
    }
    if (steps >= max_steps) return -1.0;
    auto cyc_start = seen.find(s)->second;
    std::vector<State> cyc(path.begin() + cyc_start, path.end());

    // develop: positions keyed by the side-endpoint letters
    std::map<int, Cx> pos;
    {
      int others[2], oi = 0;
      for (int v : cyc[0].face)
        if (v != cyc[0].v) others[oi++] = v;
      pos[others[0]] = Cx(0.0, 0.0);
      pos[others[1]] = Cx(1.0, 0.0);
    }
    int a0 = -1, b0 = -1;
    {
      int others[2], oi = 0;
      for (int v : cyc[0].face)
        if (v != cyc[0].v) others[oi++] = v;
      a0 = others[0];
      b0 = others[1];
    }
    Cx pa0 = pos[a0], pb0 = pos[b0];
    for (const auto& st : cyc) {
      const auto& T = tri.tets[static_cast<size_t>(st.tet)];
      int others[2], oi = 0;
      for (int v : st.face)
        if (v != st.v) others[oi++] = v;
      int A = others[0], B = others[1];
      if (!pos.count(A) || !pos.count(B)) return -1.0;
      int c_ = -1;
      for (int v : T.verts)
        if (v != st.face[0] && v != st.face[1] && v != st.face[2]) c_ = v;
      Cx za = corner_shape(st.tet, st.v, A);
      Cx zb = corner_shape(st.tet, st.v, B);
      Cx pr = 1.0 / (1.0 - za), dp = 1.0 - 1.0 / za;
      Cx r;
      if (std::abs(zb - pr) < std::abs(zb - dp))
        r = pos[A] + (pos[B] - pos[A]) * za;
      else
        r = pos[A] + (pos[B] - pos[A]) / za;
      int cut = st.parity == 0 ? A : B;
      Face exit = face_sorted(st.v, cut, c_);
      auto [ci, spec] = in.live[static_cast<size_t>(st.tet)];
      int t2;
      Face f2;
      std::array<int, 6> m{};
      if (!neighbor(ci, spec, exit, t2, f2, m)) return -1.0;
      std::map<int, Cx> np;
      np[m[cut]] = pos[cut];
      np[m[c_]] = r;
      pos = std::move(np);
    }
    if (!pos.count(a0) || !pos.count(b0)) return -1.0;
    Cx a_coef = (pos[b0] - pos[a0]) / (pb0 - pa0);
    return std::abs(a_coef - 1.0);
  }
};

}  // namespace

double verify_cusp(const Triangulation& t, std::span<const Cx> x) {
  if (!t.internals)
    throw std::logic_error("triangulation lacks gluing data (re-ingested?)");
  if (!t.essential(x)) throw NonEssentialPoint("shapes degenerate at this point");
  CuspWalker walker(t, x);
  const auto& in = *t.internals;
  // deterministic start: first live tet / knot-class vertex / face; probe at a
  // fixed generic point to skip walks whose holonomy is structurally trivial.
  std::vector<Cx> probe(static_cast<size_t>(in.va.m));
  {
    Rng rng(0x5eedULL);
    for (auto& p : probe) p = rng.annulus(0.35, 1.9);
  }
  CuspWalker probe_walker(t, probe);
  for (size_t ti = 0; ti < t.tets.size(); ++ti) {
    const auto& T = t.tets[ti];
    int ci = T.crossing;
    for (int v : T.verts) {
      // knot vertex: class contains an apex letter
      bool knot = false;
      for (int w = 0; w < 6; ++w)
        if (in.vfind(ci, w) == in.vfind(ci, v) && (w == VE || w == VF)) knot = true;
      if (!knot) continue;
      for (int k = 0; k < 4; ++k) {
        Face f = face_sorted(T.verts[(k + 1) % 4], T.verts[(k + 2) % 4],
                             T.verts[(k + 3) % 4]);
        if (f[0] != v && f[1] != v && f[2] != v) continue;
        double rp = probe_walker.develop(static_cast<int>(ti), v, f);
        if (rp < 0.05) continue;  // trivial or failed walk
        double r = walker.develop(static_cast<int>(ti), v, f);
        if (r >= 0.0) return r;
      }
    }
  }
  throw NonEssentialPoint("no usable cusp curve found");
}

// ------------------------------------------------------------------ moves

std::array<Cx, 5> move_45(const std::array<Cx, 4>& t) {
  for (Cx v : t)
    if (v == Cx(0, 0) || v == Cx(1, 0)) throw DegenerateShape("t in {0,1}");
  auto [t1, t2, t3, t4] = t;
  std::array<Cx, 5> u{shape_prime(t1) * shape_dprime(t4),
                      shape_prime(t1) * shape_dprime(t2),
                      shape_prime(t3) * shape_dprime(t2),
                      shape_prime(t3) * shape_dprime(t4),
                      1.0 / (shape_prime(t1) * shape_dprime(t2) *
                             shape_prime(t3) * shape_dprime(t4))};
  for (Cx v : u)
    if (!finite(v) || v == Cx(0, 0) || v == Cx(1, 0))
      throw DegenerateShape("degenerate 4-5 image");
  return u;
}

std::array<Cx, 4> move_45_inverse(const std::array<Cx, 5>& u) {
  for (Cx v : u)
    if (v == Cx(0, 0) || v == Cx(1, 0)) throw DegenerateShape("u in {0,1}");
  auto [u1, u2, u3, u4, u5] = u;
  return {shape_dprime(u1) * shape_dprime(u2) * shape_prime(u5),
          shape_prime(u2) * shape_prime(u3) * shape_dprime(u5),
          shape_dprime(u3) * shape_dprime(u4) * shape_prime(u5),
          shape_prime(u4) * shape_prime(u1) * shape_dprime(u5)};
}

std::array<Cx, 2> move_32(const std::array<Cx, 3>& t) {
  for (Cx v : t)
    if (v == Cx(0, 0) || v == Cx(1, 0)) throw DegenerateShape("t in {0,1}");
  auto [t1, t2, t4] = t;
  std::array<Cx, 2> u{shape_prime(t1) * shape_dprime(t4),
                      shape_prime(t1) * shape_dprime(t2)};
  for (Cx v : u)
    if (!finite(v) || v == Cx(0, 0) || v == Cx(1, 0))
      throw DegenerateShape("degenerate 3-2 image");
  return u;
}

std::array<Cx, 3> move_32_inverse(const std::array<Cx, 2>& u) {
  for (Cx v : u)
    if (v == Cx(0, 0) || v == Cx(1, 0)) throw DegenerateShape("u in {0,1}");
  auto [u1, u2] = u;
  return {shape_dprime(u1) * shape_dprime(u2), u1 * shape_prime(u2),
          shape_prime(u1) * u2};
}

// ------------------------------------------------------------------- JSON

std::string Triangulation::to_json() const {
  nlohmann::json j;
  j["variant"] = variant == Variant::Yokota ? "yokota" : "thurston";
  j["tets"] = nlohmann::json::array();
  for (const auto& t : tets) {
    nlohmann::json jt;
    jt["crossing"] = t.crossing;
    std::string vs;
    for (int v : t.verts) vs += "ABCDEF"[v];
    jt["vertices"] = vs;
    jt["orientation"] = t.orientation;
    nlohmann::json sh = nlohmann::json::array();
    for (auto [v, e] : t.shape.exponents()) sh.push_back({v, e});
    jt["shape"] = sh;
    nlohmann::json prs = nlohmann::json::array();
    for (const auto& p : t.pairs)
      prs.push_back({p[0], p[1], p[2], p[3], p[4]});
    jt["pairs"] = prs;
    j["tets"].push_back(jt);
  }
  j["edge_classes"] = nlohmann::json::array();
  for (const auto& k : edge_classes) {
    nlohmann::json jk;
    jk["tag"] = std::string(1, k.tag);
    nlohmann::json mem = nlohmann::json::array();
    for (const auto& m : k.members) mem.push_back({m.tet, m.x, m.y, m.level});
    jk["members"] = mem;
    j["edge_classes"].push_back(jk);
  }
  return j.dump(2);
}

Triangulation Triangulation::from_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  Triangulation t;
  t.variant = j.at("variant") == "yokota" ? Variant::Yokota : Variant::Thurston;
  for (const auto& jt : j.at("tets")) {
    Tetrahedron tet;
    tet.crossing = jt.at("crossing").get<int>();
    std::string vs = jt.at("vertices").get<std::string>();
    for (int i = 0; i < 4; ++i) tet.verts[i] = vs[static_cast<size_t>(i)] - 'A';
    tet.orientation = jt.at("orientation").get<int>();
    Monomial m;
    for (const auto& pr : jt.at("shape"))
      m = m * Monomial::var(pr.at(0).get<int>(), pr.at(1).get<int>());
    tet.shape = m;
    int k = 0;
    for (const auto& p : jt.at("pairs")) {
      for (int i = 0; i < 5; ++i) tet.pairs[k][static_cast<size_t>(i)] = p.at(i).get<int>();
      ++k;
    }
    t.tets.push_back(tet);
  }
  for (const auto& jk : j.at("edge_classes")) {
    EdgeClass k;
    k.tag = jk.at("tag").get<std::string>()[0];
    for (const auto& m : jk.at("members"))
      k.members.push_back({m.at(0).get<int>(), m.at(1).get<int>(),
                           m.at(2).get<int>(), m.at(3).get<int>()});
    t.edge_classes.push_back(k);
  }
  return t;
}

}  // namespace optlim
