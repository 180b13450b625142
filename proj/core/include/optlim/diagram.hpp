#pragma once

#include <array>
#include <optional>
#include <stdexcept>
#include <set>
#include <string>
#include <vector>

namespace optlim {

struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct EndpointClash : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct AssumptionViolation : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// One crossing of a PD code: arcs listed counterclockwise starting from the
/// incoming under-strand. sign = +1 when the over-strand enters at slot 3,
/// -1 when it enters at slot 1.
struct Crossing {
  std::array<int, 4> arcs{};
  int sign = 0;
};

struct KnotDiagram {
  std::string name;
  std::vector<Crossing> crossings;
  int arc_count = 0;

  int n() const { return static_cast<int>(crossings.size()); }
  int arc(int ci, int slot) const { return crossings[ci].arcs[slot]; }
  int sign(int ci) const { return crossings[ci].sign; }
  int over_in_slot(int ci) const { return sign(ci) > 0 ? 3 : 1; }
  int over_out_slot(int ci) const { return sign(ci) > 0 ? 1 : 3; }
  bool slot_is_under(int slot) const { return slot == 0 || slot == 2; }
  bool slot_is_in(int ci, int slot) const {
    return slot == 0 || slot == over_in_slot(ci);
  }

  /// (crossing, slot) the arc flows into / out of.
  std::pair<int, int> arc_head(int a) const;
  std::pair<int, int> arc_tail(int a) const;

  std::string canonical_pd_text() const;

  /// Both (crossing, slot) incidences of an arc.
  const std::array<std::pair<int, int>, 2>& arc_ends(int a) const {
    return ends_[static_cast<size_t>(a)];
  }

 private:
  friend KnotDiagram parse_pd(const std::string&);
  // both (crossing, slot) incidences of each arc, 1-based arc ids
  std::vector<std::array<std::pair<int, int>, 2>> ends_;
};

/// Parses whitespace-separated X(a,b,c,d) tokens with '#' comments and an
/// optional "knot NAME" header. Throws ParseError / ValidationError.
KnotDiagram parse_pd(const std::string& text);

/// The diagram opened into a (1,1)-tangle at a chosen side, with I and J
/// removed: the reduced graph G plus all the opening bookkeeping the
/// triangulation needs.
struct TangleGraph {
  KnotDiagram d;
  int cut_arc = 0;

  int i_endpoint = -1, j_endpoint = -1;  // trivalent crossings
  int i_del_slot = 2, j_del_slot = -1;   // deleted branch slot at each
  std::vector<char> removed;             // per crossing
  std::vector<int> alive;                // surviving crossings, ascending
  std::set<int> deleted_arcs;

  // closed-diagram faces
  int face_count = 0;
  std::vector<int> corner_face;  // ci*4+corner -> face
  std::vector<int> dart_face;    // ci*4+slot -> face left of the leaving dart
  // G regions: merged faces
  std::vector<int> face_root;  // face -> region representative
  int unbounded = -1;          // region representative
  std::vector<int> regions;    // distinct representatives, ascending
  // G sides: arcs glued through removed crossings; -1 for deleted arcs
  std::vector<int> side_root;  // arc (1-based) -> representative arc
  std::vector<int> gsides;     // representatives, ascending

  int corner_region(int ci, int corner) const {
    return face_root[corner_face[ci * 4 + corner]];
  }
  int side_rep(int arc) const { return side_root[arc]; }
  bool side_contributing(int rep) const;
  /// Corners of crossing ci whose region is the unbounded one.
  std::vector<int> collapsed_corners(int ci) const;
  bool trivalent(int ci) const { return ci == i_endpoint || ci == j_endpoint; }
  int deleted_slot(int ci) const {
    return ci == i_endpoint ? i_del_slot : j_del_slot;
  }
  /// True if the given corner of a trivalent crossing flanks its deleted branch.
  bool corner_merged_away(int ci, int corner) const {
    if (!trivalent(ci)) return false;
    int ds = deleted_slot(ci);
    return corner == ds || (ds + 3) % 4 == corner;
  }
};

/// Opens the diagram at the given side (arc id). Throws EndpointClash when
/// the two non-boundary endpoints of I and J coincide, AssumptionViolation
/// when the opening degenerates.
TangleGraph open_tangle(const KnotDiagram& d, int split_side);

/// Tries split sides in index order; returns the first passing open_tangle
/// and an empty check_assumptions report. Throws AssumptionViolation if none.
TangleGraph auto_open(const KnotDiagram& d);

/// Violation report; empty means the diagram is accepted.
std::vector<std::string> check_assumptions(const TangleGraph& g);

enum class RegionKind { Zero, Unit, Var };
enum class SideKind { One, Var };

/// Side and region variable maps: z_1..z_g on contributing sides, w_1..w_m on
/// bounded regions other than the chosen unit region.
struct VariableAssignment {
  int unit_region = -1;
  std::vector<int> wvars;   // region representative per w index
  std::vector<int> zsides;  // side representative per z index
  int m = 0, g = 0;

  RegionKind region_kind(int region) const;
  int w_index(int region) const;  // valid when region_kind == Var
  SideKind side_kind_of_rep(int rep) const;
  int z_index_of_rep(int rep) const;

 private:
  friend VariableAssignment assign_variables(const TangleGraph&,
                                             std::optional<int>);
  int unbounded_ = -1;
  std::vector<std::pair<int, int>> widx_;  // sorted (region, index)
  std::vector<std::pair<int, int>> zidx_;  // sorted (side rep, index)
};

struct InvalidRegion : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// unit_region: region representative; defaults to the bounded region with
/// the most incident crossings (ties by smallest id).
VariableAssignment assign_variables(const TangleGraph& g,
                                    std::optional<int> unit_region = {});

}  // namespace optlim
