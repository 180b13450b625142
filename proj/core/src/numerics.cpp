#include "optlim/numerics.hpp"

#include <cmath>

namespace optlim {
namespace {

// Normalize a signed zero imaginary part to +0 so that real negative values
// take arg = +pi.
inline Cx on_axis(Cx z) {
  if (z.imag() == 0.0) return Cx(z.real(), 0.0);
  return z;
}

// Bernoulli numbers B_0..B_34 (odd entries > 1 vanish).
constexpr double kBern[] = {
    1.0, -0.5, 1.0 / 6, 0.0, -1.0 / 30, 0.0, 1.0 / 42, 0.0, -1.0 / 30, 0.0,
    5.0 / 66, 0.0, -691.0 / 2730, 0.0, 7.0 / 6, 0.0, -3617.0 / 510, 0.0,
    43867.0 / 798, 0.0, -174611.0 / 330, 0.0, 854513.0 / 138, 0.0,
    -236364091.0 / 2730, 0.0, 8553103.0 / 6, 0.0, -23749461029.0 / 870, 0.0,
    8615841276005.0 / 14322, 0.0, -7709321041217.0 / 510, 0.0,
    2577687858367.0 / 6};

Cx dilog_series(Cx z) {  // |z| <= 0.5
  Cx sum = 0.0, zz = z;
  for (int n = 1; n < 60; ++n) {
    sum += zz / static_cast<double>(n * n);
    zz *= z;
    double bound = std::abs(zz) / ((n + 1.0) * (n + 1.0));
    if (bound < 1e-18 * std::max(std::abs(sum), 1e-30)) break;
  }
  return sum;
}

// Li2(z) = sum_n B_n u^{n+1}/(n+1)!, u = -log(1-z); converges for |u| < 2pi.
Cx dilog_bernoulli(Cx z) {
  Cx u = -clog(on_axis(1.0 - z));
  Cx sum = 0.0, upow = u;
  double fact = 1.0;
  for (int n = 0; n < static_cast<int>(sizeof(kBern) / sizeof(kBern[0])); ++n) {
    fact *= n + 1;
    sum += kBern[n] * upow / fact;
    upow *= u;
    if (n > 6 &&
        std::abs(upow) / (fact * (n + 2)) < 1e-19 * std::max(std::abs(sum), 1e-30))
      break;
  }
  return sum;
}

}  // namespace

Cx clog(Cx z) {
  if (z == Cx(0.0, 0.0)) throw DomainError("clog: argument is zero");
  return std::log(on_axis(z));
}

Cx dilog(Cx z) {
  if (!finite(z)) throw DomainError("dilog: non-finite argument");
  if (z == Cx(1.0, 0.0)) return Cx(kPi2 / 6, 0.0);
  if (std::abs(z) > 1.0) {
    Cx lz = clog(-z);
    return -kPi2 / 6 - 0.5 * lz * lz - dilog(1.0 / z);
  }
  if (std::abs(z) <= 0.5) return dilog_series(z);
  if (std::abs(1.0 - z) <= 0.5) {
    Cx w = on_axis(1.0 - z);
    return kPi2 / 6 - clog(z) * clog(w) - dilog(w);
  }
  return dilog_bernoulli(z);
}

double bloch_wigner(Cx z) {
  if (z == Cx(0.0, 0.0) || z == Cx(1.0, 0.0))
    throw DomainError("bloch_wigner: argument in {0, 1}");
  Cx w = on_axis(1.0 - z);
  return dilog(z).imag() + std::log(std::abs(z)) * std::arg(w);
}

std::array<Cx, 3> shape_triple(Cx u) {
  if (u == Cx(0.0, 0.0) || u == Cx(1.0, 0.0))
    throw DomainError("shape_triple: argument in {0, 1}");
  return {u, shape_prime(u), shape_dprime(u)};
}

Cx shape_level(Cx u, int k) {
  k %= 3;
  if (k < 0) k += 3;
  for (int i = 0; i < k; ++i) u = shape_prime(u);
  return u;
}

}  // namespace optlim
