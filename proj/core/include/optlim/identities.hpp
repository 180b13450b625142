#pragma once

#include <array>
#include <cstdint>
#include <span>

#include "optlim/diagram.hpp"
#include "optlim/numerics.hpp"
#include "optlim/rng.hpp"

namespace optlim {

struct DegenerateSample : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// One octahedron worth of shapes: t1..t4 on the horizontal edges with
/// t1 t2 t3 t4 = 1, u1..u5 derived by the 4-5 move.
struct OctahedronSample {
  std::array<Cx, 4> t{};
  std::array<Cx, 5> u{};
};

/// Draws a constrained sample from the disk-annulus, rejecting degenerate
/// shapes and samples off the principal log-branch chamber (where the
/// dilogarithm identities hold without a 4 pi^2 shift; see the U_i relations).
OctahedronSample sample_octahedron(Rng& rng);

/// Unrestricted variant: only degeneracy is rejected. The identities then
/// hold modulo 4 pi^2 with exact imaginary parts.
OctahedronSample sample_octahedron_any_chamber(Rng& rng);

/// Collapsed triple (t1, t2, t4) with t1 t2 t4 = 1 and its 3-2 image.
struct CollapsedSample {
  std::array<Cx, 3> t{};
  std::array<Cx, 2> u{};
};
CollapsedSample sample_collapsed(Rng& rng);

/// |LHS - RHS| of the full-octahedron identities, which in {22, 23, 24, 25}.
double check_lemma5(const OctahedronSample& s, int which);

/// |LHS - RHS| of the collapsed identities, which in {26, 27, 28, 29}.
/// All four are corner rotations of the same statement; the sample supplies
/// the generic triple.
double check_lemma5_collapsed(const CollapsedSample& s, int which);

/// Signed LHS - RHS for the mod-4pi^2 property tests.
Cx lemma5_delta(const OctahedronSample& s, int which);

/// Region 4-tuple off all branch points of the crossing functions with a
/// fixed margin, so the exp-derivative products stay O(1).
std::array<Cx, 4> sample_crossing_regions(Rng& rng);

/// Crossing-function family checks at one random 4-tuple of region values:
/// max pairwise |exp(w_a dP_f/dw_a) - exp(w_a dP_1/dw_a)| over f, a and the
/// P and N families.
double check_lemma31_derivatives(std::span<const Cx, 4> w);
/// max pairwise |P_f0 - P_10| after snapping to the nearest 4 pi^2 multiple.
double check_lemma31_flattened(std::span<const Cx, 4> w);

/// The per-crossing remaining term Z_n = sum over branches of
/// (log w_before - log w_after) log z_side, evaluated at paired values.
Cx remaining_term(const TangleGraph& g, const VariableAssignment& va, int ci,
                  std::span<const Cx> z, std::span<const Cx> w);

/// |sum_n Z_n| after subtracting the nearest multiple of 4 pi^2.
double check_cancellation(const TangleGraph& g, const VariableAssignment& va,
                          std::span<const Cx> z, std::span<const Cx> w);

/// X0 - P10 - Z_n reduced mod 4 pi^2 at constrained random data for a full
/// positive crossing; the oracle behind the remaining-term closed forms.
double check_remaining_full_positive(Rng& rng);
/// Same for the over-bridge endpoint form (merged-corner constrained data).
double check_remaining_endpoint(Rng& rng);

}  // namespace optlim
