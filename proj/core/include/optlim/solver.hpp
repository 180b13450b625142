#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "optlim/potential.hpp"
#include "optlim/triangulation.hpp"

namespace optlim {

struct NoConvergence : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NonEssentialImage : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// One hyperbolicity system: equations exp(x_l dP/dx_l) = 1 in rational
/// shape-product form, one per variable.
struct ShapeSystem {
  int nvars = 0;
  std::vector<ShapeProduct> equations;
};

ShapeSystem system_from_potential(const PotentialFunction& p);

struct Solution {
  std::vector<Cx> values;
  double residual = 0.0;  // max |product - 1|
  bool essential = false;
  std::vector<Cx> shapes;  // triangulation shapes, set by classify
  double volume = 0.0;
  bool geometric = false;
  bool positively_oriented = false;
};

struct SolutionSet {
  std::vector<Solution> solutions;
  int seeds_tried = 0;
  int converged = 0;
  int geometric_index = -1;  // set by classify
};

struct SolveOptions {
  int seeds = 200;
  std::uint64_t rng_seed = 1;
  double tol = kEpsSolve;
  int max_newton_iters = 120;
  int threads = 1;
};

/// Multistart damped Newton; deduplicated and sorted canonically.
/// Deterministic for fixed options, independent of the thread count.
SolutionSet solve(const ShapeSystem& sys, const SolveOptions& opts);

/// Newton-polish a candidate in place; true when it converged to tol.
bool polish(const ShapeSystem& sys, std::vector<Cx>& x, double tol = kEpsSolve);

/// Insert a candidate into a solution set if it converges and is new.
bool merge_candidate(SolutionSet& sols, const ShapeSystem& sys,
                     std::vector<Cx> x, double tol = kEpsSolve);

/// Sets essential/volume/geometric flags from the triangulation shapes; the
/// geometric solution maximizes the signed volume among essential solutions.
void classify(SolutionSet& sols, const Triangulation& tri);

/// Essential z-solution of H1 -> the corresponding w-solution of H2 via the
/// 4-5 / 3-2 shape transport, regions propagated from the unit region.
std::vector<Cx> convert_z_to_w(std::span<const Cx> z, const TangleGraph& g,
                               const VariableAssignment& va,
                               const Triangulation& yok,
                               const Triangulation& thu,
                               double tol = kEpsSolve);

std::vector<Cx> convert_w_to_z(std::span<const Cx> w, const TangleGraph& g,
                               const VariableAssignment& va,
                               const Triangulation& yok,
                               const Triangulation& thu,
                               double tol = kEpsSolve);

double system_residual(const ShapeSystem& sys, std::span<const Cx> x);

}  // namespace optlim
