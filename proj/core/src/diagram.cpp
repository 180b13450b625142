#include "optlim/diagram.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <sstream>

namespace optlim {
namespace {

int find_root(std::vector<int>& p, int x) {
  while (p[x] != x) {
    p[x] = p[p[x]];
    x = p[x];
  }
  return x;
}

}  // namespace

std::pair<int, int> KnotDiagram::arc_head(int a) const {
  for (auto [ci, s] : ends_[a])
    if (slot_is_in(ci, s)) return {ci, s};
  throw ValidationError("arc has no head");
}

std::pair<int, int> KnotDiagram::arc_tail(int a) const {
  for (auto [ci, s] : ends_[a])
    if (!slot_is_in(ci, s)) return {ci, s};
  throw ValidationError("arc has no tail");
}

std::string KnotDiagram::canonical_pd_text() const {
  std::ostringstream os;
  if (!name.empty()) os << "knot " << name << "\n";
  for (int ci = 0; ci < n(); ++ci) {
    if (ci) os << ' ';
    os << "X(" << arc(ci, 0) << ',' << arc(ci, 1) << ',' << arc(ci, 2) << ','
       << arc(ci, 3) << ')';
  }
  os << '\n';
  return os.str();
}

KnotDiagram parse_pd(const std::string& text) {
  KnotDiagram d;
  std::istringstream in(text);
  std::string line;
  std::vector<std::array<int, 4>> tuples;
  while (std::getline(in, line)) {
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string tok;
    while (ls >> tok) {
      if (tok == "knot") {
        if (!(ls >> d.name)) throw ParseError("knot header without a name");
        continue;
      }
      if (tok.size() < 2 || (tok[0] != 'X' && tok[0] != 'x'))
        throw ParseError("unexpected token '" + tok + "'");
      std::array<int, 4> t{};
      int nread = 0;
      std::string body = tok.substr(1);
      for (char& c : body)
        if (c == '(' || c == ')' || c == ',' || c == '[' || c == ']') c = ' ';
      std::istringstream bs(body);
      int v;
      while (bs >> v) {
        if (nread >= 4) throw ParseError("crossing with more than 4 arcs: " + tok);
        t[nread++] = v;
      }
      if (nread != 4) throw ParseError("crossing with fewer than 4 arcs: " + tok);
      tuples.push_back(t);
    }
  }
  if (tuples.empty()) throw ParseError("no crossings found");
  int n = static_cast<int>(tuples.size());
  if (n < 3)
    throw ValidationError("fewer than 3 crossings: not a hyperbolic knot diagram");
  int n2 = 2 * n;
  std::vector<int> mult(n2 + 1, 0);
  for (auto& t : tuples)
    for (int a : t) {
      if (a < 1 || a > n2)
        throw ValidationError("arc id out of range 1..2n");
      ++mult[a];
    }
  for (int a = 1; a <= n2; ++a)
    if (mult[a] != 2) throw ValidationError("every arc id must appear exactly twice");

  d.arc_count = n2;
  d.ends_.assign(n2 + 1, {});
  std::vector<int> seen(n2 + 1, 0);
  for (int ci = 0; ci < n; ++ci) {
    Crossing c;
    c.arcs = tuples[ci];
    int a = c.arcs[0], b = c.arcs[1], cc = c.arcs[2], dd = c.arcs[3];
    if (cc % n2 != (a + 1) % n2)
      throw ValidationError("under-strand arcs not consecutive (multi-component?)");
    if (b % n2 == (dd + 1) % n2)
      c.sign = +1;
    else if (dd % n2 == (b + 1) % n2)
      c.sign = -1;
    else
      throw ValidationError("over-strand arcs not consecutive (multi-component?)");
    d.crossings.push_back(c);
    for (int s = 0; s < 4; ++s) {
      int arc = c.arcs[s];
      d.ends_[arc][seen[arc]++] = {ci, s};
    }
  }

  // orientation consistency: every arc flows out of one crossing and into one
  for (int a = 1; a <= n2; ++a) {
    int heads = 0;
    for (auto [ci, s2] : d.ends_[a])
      if (d.slot_is_in(ci, s2)) ++heads;
    if (heads != 1)
      throw ValidationError("arc " + std::to_string(a) +
                            " does not trace a single oriented curve");
  }

  // planarity: rotation-system faces must number n + 2
  int faces = 0;
  std::vector<char> visited(4 * n, 0);
  for (int d0 = 0; d0 < 4 * n; ++d0) {
    if (visited[d0]) continue;
    ++faces;
    int dart = d0;
    while (!visited[dart]) {
      visited[dart] = 1;
      int ci = dart / 4, s = dart % 4;
      int a = d.arc(ci, s);
      auto [e0, e1] = std::pair{d.arc_ends(a)[0], d.arc_ends(a)[1]};
      auto far = (e0 == std::pair{ci, s}) ? e1 : e0;
      dart = far.first * 4 + (far.second + 1) % 4;
    }
  }
  if (faces != n + 2)
    throw ValidationError("diagram is not planar (face count " +
                          std::to_string(faces) + ", expected " +
                          std::to_string(n + 2) + ")");
  return d;
}

TangleGraph open_tangle(const KnotDiagram& d, int split_side) {
  if (split_side < 1 || split_side > d.arc_count)
    throw ValidationError("split side out of range");
  TangleGraph t;
  t.d = d;
  t.cut_arc = split_side;
  int n = d.n(), n2 = d.arc_count;

  // passage k = crossing entered via arc cut+k (following the orientation)
  struct Passage {
    int ci, slot;
    bool under;
  };
  std::vector<Passage> pass(n2);
  for (int k = 0; k < n2; ++k) {
    int a = (split_side - 1 + k) % n2 + 1;
    auto [ci, s] = d.arc_head(a);
    pass[k] = {ci, s, d.slot_is_under(s)};
  }
  int jend = -1, iend = -1;
  for (int k = 0; k < n2; ++k)
    if (!pass[k].under) {
      jend = k;
      break;
    }
  for (int k = n2 - 1; k >= 0; --k)
    if (pass[k].under) {
      iend = k;
      break;
    }
  if (jend < 0 || iend < 0 || iend <= jend)
    throw AssumptionViolation("I and J would cover the whole diagram");
  t.j_endpoint = pass[jend].ci;
  t.i_endpoint = pass[iend].ci;
  if (t.i_endpoint == t.j_endpoint)
    throw EndpointClash("non-boundary endpoints of I and J coincide");
  t.j_del_slot = d.over_in_slot(t.j_endpoint);
  t.i_del_slot = 2;  // under-out

  for (int k = 0; k <= jend; ++k)
    t.deleted_arcs.insert((split_side - 1 + k) % n2 + 1);
  for (int k = iend; k < n2; ++k)
    t.deleted_arcs.insert((split_side + k) % n2 + 1);

  t.removed.assign(n, 0);
  for (int k = 0; k < jend; ++k) t.removed[pass[k].ci] = 1;
  for (int k = iend + 1; k < n2; ++k) t.removed[pass[k].ci] = 1;
  if (t.removed[t.i_endpoint] || t.removed[t.j_endpoint])
    throw AssumptionViolation("endpoint crossing removed by the other bridge");
  for (int ci = 0; ci < n; ++ci)
    if (!t.removed[ci]) t.alive.push_back(ci);

  // faces of the closed diagram
  t.dart_face.assign(4 * n, -1);
  int faces = 0;
  for (int d0 = 0; d0 < 4 * n; ++d0) {
    if (t.dart_face[d0] >= 0) continue;
    int dart = d0;
    while (t.dart_face[dart] < 0) {
      t.dart_face[dart] = faces;
      int ci = dart / 4, s = dart % 4;
      int a = d.arc(ci, s);
      auto [e0, e1] = std::pair{d.arc_ends(a)[0], d.arc_ends(a)[1]};
      auto far = (e0 == std::pair{ci, s}) ? e1 : e0;
      dart = far.first * 4 + (far.second + 1) % 4;
    }
    ++faces;
  }
  t.face_count = faces;
  // the face swept from dart (ci, s) covers the corner between s-1 and s
  t.corner_face.assign(4 * n, -1);
  for (int ci = 0; ci < n; ++ci)
    for (int s = 0; s < 4; ++s)
      t.corner_face[ci * 4 + (s + 3) % 4] = t.dart_face[ci * 4 + s];

  // merge faces across deleted arcs
  std::vector<int> parent(faces);
  for (int i = 0; i < faces; ++i) parent[i] = i;
  for (int a : t.deleted_arcs) {
    auto [e0, e1] = std::pair{d.arc_ends(a)[0], d.arc_ends(a)[1]};
    int f0 = find_root(parent, t.dart_face[e0.first * 4 + e0.second]);
    int f1 = find_root(parent, t.dart_face[e1.first * 4 + e1.second]);
    parent[f0] = f1;
  }
  t.face_root.resize(faces);
  for (int i = 0; i < faces; ++i) t.face_root[i] = find_root(parent, i);
  {
    auto [e0, e1] = std::pair{d.arc_ends(split_side)[0], d.arc_ends(split_side)[1]};
    t.unbounded = t.face_root[t.dart_face[e0.first * 4 + e0.second]];
  }
  for (int i = 0; i < faces; ++i)
    if (t.face_root[i] == i) t.regions.push_back(i);

  // G sides: glue surviving arcs through removed crossings
  t.side_root.assign(n2 + 1, -1);
  std::vector<int> sp(n2 + 1);
  for (int a = 1; a <= n2; ++a) sp[a] = a;
  for (int a = 1; a <= n2; ++a)
    if (!t.deleted_arcs.count(a)) t.side_root[a] = a;
  auto sfind = [&](int a) { return find_root(sp, a); };
  for (int ci = 0; ci < n; ++ci) {
    if (!t.removed[ci]) continue;
    int a_in, a_out;
    bool under_deleted = t.deleted_arcs.count(d.arc(ci, 0)) > 0;
    if (under_deleted) {
      a_in = d.arc(ci, d.over_in_slot(ci));
      a_out = d.arc(ci, d.over_out_slot(ci));
    } else {
      a_in = d.arc(ci, 0);
      a_out = d.arc(ci, 2);
    }
    if (t.deleted_arcs.count(a_in) || t.deleted_arcs.count(a_out)) continue;
    sp[sfind(a_in)] = sfind(a_out);
  }
  for (int a = 1; a <= n2; ++a)
    if (t.side_root[a] >= 0) t.side_root[a] = sfind(a);
  for (int a = 1; a <= n2; ++a)
    if (t.side_root[a] == a) t.gsides.push_back(a);
  return t;
}

bool TangleGraph::side_contributing(int rep) const {
  // contributing iff the side borders no unbounded region
  for (int a = 1; a <= d.arc_count; ++a) {
    if (side_root[a] != rep) continue;
    for (auto [ci, s] : d.arc_ends(a))
      if (face_root[dart_face[ci * 4 + s]] == unbounded) return false;
  }
  return true;
}

std::vector<int> TangleGraph::collapsed_corners(int ci) const {
  std::vector<int> out;
  for (int i = 0; i < 4; ++i)
    if (corner_region(ci, i) == unbounded) out.push_back(i);
  return out;
}

std::vector<std::string> check_assumptions(const TangleGraph& g) {
  std::vector<std::string> v;
  const auto& d = g.d;
  for (int ci : g.alive) {
    // kinks: the same arc at two slots of one crossing
    for (int s = 0; s < 4; ++s)
      for (int q = s + 1; q < 4; ++q)
        if (d.arc(ci, s) == d.arc(ci, q))
          v.push_back("crossing " + std::to_string(ci) +
                      ": nugatory kink (reducible)");
    auto unb = g.collapsed_corners(ci);
    if (!g.trivalent(ci) && unb.size() >= 2) {
      bool opposite = (unb[1] - unb[0]) == 2;
      v.push_back("crossing " + std::to_string(ci) +
                  ": two collapsed horizontal edges (" +
                  (opposite ? "composite" : "reducible") + ")");
    }
    if (g.trivalent(ci) && unb.size() >= 2)
      v.push_back("trivalent crossing " + std::to_string(ci) +
                  ": two collapsed horizontal edges");
  }
  return v;
}

TangleGraph auto_open(const KnotDiagram& d) {
  std::string last;
  for (int a = 1; a <= d.arc_count; ++a) {
    try {
      TangleGraph t = open_tangle(d, a);
      auto rep = check_assumptions(t);
      if (rep.empty()) return t;
      last = rep.front();
    } catch (const EndpointClash& e) {
      last = e.what();
    } catch (const AssumptionViolation& e) {
      last = e.what();
    }
  }
  throw AssumptionViolation("no admissible split side: " + last);
}

RegionKind VariableAssignment::region_kind(int region) const {
  if (region == unbounded_) return RegionKind::Zero;
  if (region == unit_region) return RegionKind::Unit;
  return RegionKind::Var;
}

int VariableAssignment::w_index(int region) const {
  auto it = std::lower_bound(widx_.begin(), widx_.end(),
                             std::pair{region, -1});
  if (it == widx_.end() || it->first != region)
    throw std::out_of_range("not a w region");
  return it->second;
}

SideKind VariableAssignment::side_kind_of_rep(int rep) const {
  auto it = std::lower_bound(zidx_.begin(), zidx_.end(), std::pair{rep, -1});
  return (it != zidx_.end() && it->first == rep) ? SideKind::Var : SideKind::One;
}

int VariableAssignment::z_index_of_rep(int rep) const {
  auto it = std::lower_bound(zidx_.begin(), zidx_.end(), std::pair{rep, -1});
  if (it == zidx_.end() || it->first != rep)
    throw std::out_of_range("not a z side");
  return it->second;
}

VariableAssignment assign_variables(const TangleGraph& g,
                                    std::optional<int> unit_region) {
  VariableAssignment va;
  va.unbounded_ = g.unbounded;
  std::vector<int> bounded;
  for (int r : g.regions)
    if (r != g.unbounded) bounded.push_back(r);
  if (unit_region) {
    if (*unit_region == g.unbounded)
      throw InvalidRegion("unit region must be bounded");
    if (std::find(bounded.begin(), bounded.end(), *unit_region) == bounded.end())
      throw InvalidRegion("unknown region id");
    va.unit_region = *unit_region;
  } else {
    int best = -1, bestcnt = -1;
    for (int r : bounded) {
      int cnt = 0;
      for (int ci : g.alive)
        for (int i = 0; i < 4; ++i)
          if (g.corner_region(ci, i) == r) ++cnt;
      if (cnt > bestcnt) {
        bestcnt = cnt;
        best = r;
      }
    }
    va.unit_region = best;
  }
  for (int r : bounded)
    if (r != va.unit_region) {
      va.widx_.emplace_back(r, static_cast<int>(va.wvars.size()));
      va.wvars.push_back(r);
    }
  for (int rep : g.gsides)
    if (g.side_contributing(rep)) {
      va.zidx_.emplace_back(rep, static_cast<int>(va.zsides.size()));
      va.zsides.push_back(rep);
    }
  std::sort(va.widx_.begin(), va.widx_.end());
  std::sort(va.zidx_.begin(), va.zidx_.end());
  va.m = static_cast<int>(va.wvars.size());
  va.g = static_cast<int>(va.zsides.size());
  return va;
}

}  // namespace optlim
