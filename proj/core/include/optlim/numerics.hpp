#pragma once

#include <array>
#include <complex>
#include <stdexcept>

namespace optlim {

using Cx = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846264338327950288;
inline constexpr double kPi2 = kPi * kPi;

// Residual tolerance for analytic identities.
inline constexpr double kEpsFn = 1e-12;
// Residual tolerance for solver output and derived structural checks.
inline constexpr double kEpsSolve = 1e-10;

struct DomainError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Principal logarithm, arg in (-pi, pi]. Real negative inputs land on the
/// upper side of the cut regardless of the sign of the zero imaginary part.
Cx clog(Cx z);

/// Principal dilogarithm with cut along (1, inf), continuous from below.
Cx dilog(Cx z);

/// Bloch-Wigner function D(z) = Im Li2(z) + log|z| arg(1-z); the volume of
/// the ideal hyperbolic tetrahedron with shape z.
double bloch_wigner(Cx z);

/// (u, u' = 1/(1-u), u'' = 1-1/u).
std::array<Cx, 3> shape_triple(Cx u);

inline Cx shape_prime(Cx u) { return 1.0 / (1.0 - u); }
inline Cx shape_dprime(Cx u) { return 1.0 - 1.0 / u; }

/// Applies ' to u k times (k mod 3); ' cycles u -> u' -> u'' -> u.
Cx shape_level(Cx u, int k);

inline bool finite(Cx z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

}  // namespace optlim
