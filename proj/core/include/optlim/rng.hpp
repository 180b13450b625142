#pragma once

#include <cmath>
#include <cstdint>

#include "optlim/numerics.hpp"

namespace optlim {

/// splitmix64: tiny, deterministic across platforms. Standard-library engines
/// are implementation-defined through the distributions, which would break
/// byte-stable reports.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  double uniform() {  // [0, 1)
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
  }

  double uniform(double a, double b) { return a + (b - a) * uniform(); }

  /// |z| in [rmin, rmax], uniform phase.
  Cx annulus(double rmin, double rmax) {
    double r = uniform(rmin, rmax);
    double th = uniform(0.0, 2.0 * kPi);
    return Cx(r * std::cos(th), r * std::sin(th));
  }

  /// Independent stream for item i under the same master seed.
  static Rng stream(std::uint64_t seed, std::uint64_t i) {
    Rng mix(seed ^ (0x9e3779b97f4a7c15ull * (i + 1)));
    mix.next();
    return mix;
  }

 private:
  std::uint64_t state_;
};

}  // namespace optlim
