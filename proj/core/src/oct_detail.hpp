#pragma once

// Shared octahedron-letter combinatorics for the core translation units.

#include <array>
#include <utility>

#include "optlim/diagram.hpp"
#include "optlim/triangulation.hpp"

namespace optlim::detail {

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

// corner-shape index: t1 on CD, t2 on DA, t3 on AB, t4 on BC
inline int corner_code(int x, int y) {
  auto k = pkey(x, y);
  if (k == pkey(VC, VD)) return 0;
  if (k == pkey(VD, VA)) return 1;
  if (k == pkey(VA, VB)) return 2;
  return 3;
}

// vertical-shape index from the level-0 base edge: u1 on CF, u2 on DE,
// u3 on AF, u4 on BE, u5 on the diagonals
inline int u_code(int x, int y) {
  auto k = pkey(x, y);
  if (k == pkey(VC, VF)) return 0;
  if (k == pkey(VD, VE)) return 1;
  if (k == pkey(VA, VF)) return 2;
  if (k == pkey(VB, VE)) return 3;
  return 4;
}

inline int branch_letter_of_u(int ucode) {
  constexpr int b[4] = {VC, VD, VA, VB};
  return b[ucode];
}

}  // namespace optlim::detail
