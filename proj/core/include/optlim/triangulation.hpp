#pragma once

#include <array>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "optlim/diagram.hpp"
#include "optlim/numerics.hpp"
#include "optlim/potential.hpp"

namespace optlim {

struct CollapseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NonEssentialPoint : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct DegenerateShape : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class Variant { Yokota, Thurston };

/// Octahedron vertex letters. A = over-in, C = over-out, B/D the under
/// branches, E the apex glued along under-branch units, F along over.
enum Letter : int { VA = 0, VB, VC, VD, VE, VF };

struct Tetrahedron {
  int crossing = -1;
  std::array<int, 4> verts{};   // letters
  Monomial shape;               // base shape at the level-0 pair
  int orientation = +1;         // sigma of the corner tet (yokota) or +1
  /// opposite-edge pairs with prime level 0/1/2 relative to `shape`
  std::array<std::array<int, 5>, 3> pairs{};  // {x1,y1,x2,y2,level}
  int level_at(int x, int y) const;
};

struct EdgeClassMember {
  int tet = -1;        // index into Triangulation::tets
  int x = 0, y = 0;    // letters of the edge within the tet
  int level = 0;       // prime level of the tet shape on this edge
};

struct EdgeClass {
  char tag = 'B';  // 'A', 'B' or 'C'
  std::vector<EdgeClassMember> members;
  /// Label-level members (crossing, letter pair), including dead octahedra.
  std::vector<std::array<int, 3>> labels;
};

struct EdgeResidual {
  int edge_class = -1;
  char tag = 'B';
  bool structural = false;  // class-B/C: product is 1 by construction
  double residual = 0.0;
};

class Triangulation {
 public:
  Variant variant = Variant::Thurston;
  std::vector<Tetrahedron> tets;
  std::vector<EdgeClass> edge_classes;

  /// Base shapes (the per-tet level-0 values) at a variable vector.
  std::vector<Cx> shapes(std::span<const Cx> x) const;
  /// Orientation-signed Bloch-Wigner volume.
  double volume(std::span<const Cx> x) const;
  bool essential(std::span<const Cx> x, double margin = 1e-8) const;

  Cx class_product(int edge_class, std::span<const Cx> x) const;
  /// Shape product of one class as a symbolic factor list.
  ShapeProduct class_product_form(int edge_class) const;

  /// Edge class carrying the horizontal edges of a region (-1 if none).
  int class_of_region(int region) const;

  /// Post-collapse vertex class of a letter at a crossing.
  int vertex_class(int crossing, int letter) const;

  std::string to_json() const;
  static Triangulation from_json(const std::string& text);

  // construction internals kept public for the cusp walk
  struct Internals;
  std::shared_ptr<const Internals> internals;
  std::map<int, int> region_class;  // region representative -> edge class
};

Triangulation build_yokota(const TangleGraph& g, const VariableAssignment& va);
Triangulation build_thurston(const TangleGraph& g, const VariableAssignment& va);

/// |product - 1| per edge class.
std::vector<EdgeResidual> verify_edge_relations(const Triangulation& t,
                                                std::span<const Cx> x);

/// Derivative of the developed holonomy along a canonical closed normal curve
/// on the cusp torus: |a - 1|. Zero (to rounding) at any point satisfying the
/// hyperbolicity equations; generically large elsewhere.
double verify_cusp(const Triangulation& t, std::span<const Cx> x);

/// 4-5 move shape transport: (t1..t4) -> (u1..u5), t1 t2 t3 t4 = 1 expected.
std::array<Cx, 5> move_45(const std::array<Cx, 4>& t);
std::array<Cx, 4> move_45_inverse(const std::array<Cx, 5>& u);
/// 3-2 move: (t1,t2,t4) with t1 t2 t4 = 1 -> (u1,u2).
std::array<Cx, 2> move_32(const std::array<Cx, 3>& t);
std::array<Cx, 3> move_32_inverse(const std::array<Cx, 2>& u);

}  // namespace optlim
