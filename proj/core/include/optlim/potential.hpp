#pragma once

#include <span>
#include <string>
#include <vector>

#include "optlim/diagram.hpp"
#include "optlim/numerics.hpp"

namespace optlim {

struct BranchPointError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NotASolution : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Laurent monomial in the system variables. `zero` marks a monomial carrying
/// the zero-region factor; it evaluates to 0 and may only appear where a
/// dilogarithm argument tolerates it.
class Monomial {
 public:
  Monomial() = default;
  static Monomial zero_factor() {
    Monomial m;
    m.zero_ = true;
    return m;
  }
  static Monomial var(int v, int e = 1) {
    Monomial m;
    if (e != 0) m.e_.push_back({v, e});
    return m;
  }

  Monomial operator*(const Monomial& o) const;
  Monomial inverse() const;
  bool is_zero() const { return zero_; }
  bool is_one() const { return !zero_ && e_.empty(); }
  int exponent(int v) const;
  Cx eval(std::span<const Cx> x) const;
  const std::vector<std::pair<int, int>>& exponents() const { return e_; }
  auto operator<=>(const Monomial&) const = default;

 private:
  std::vector<std::pair<int, int>> e_;  // sorted (var, exp), exp != 0
  bool zero_ = false;
};

/// Finite sum of sigma*Li2(monomial) terms, coef*log*log terms and a rational
/// multiple of pi^2 (stored in sixths).
struct PotentialFunction {
  struct DilogTerm {
    int sigma;  // +1 or -1
    Monomial m;
  };
  struct LogLogTerm {
    int coef;  // +1 or -1
    Monomial m1, m2;
  };

  int variable_count = 0;
  std::vector<DilogTerm> dilogs;
  std::vector<LogLogTerm> loglogs;
  int pi2_sixths = 0;

  void add_dilog(int sigma, Monomial m);
  void add_loglog(int coef, Monomial m1, Monomial m2);

  Cx eval(std::span<const Cx> x) const;
  /// Analytic x_l d/dx_l.
  Cx log_derivative(std::span<const Cx> x, int l) const;
  /// Literal flattening p - sum_l (x_l dp/dx_l) log x_l.
  Cx flatten_literal(std::span<const Cx> x) const;
  /// Flattening with every derivative snapped to its nearest 2*pi*i integer;
  /// throws NotASolution when a derivative is farther than eps from the
  /// lattice.
  Cx flattened(std::span<const Cx> x, double eps = kEpsSolve) const;

  std::string to_json() const;
  static PotentialFunction from_json(const std::string& text);
};

/// One factor of exp(x_l dP/dx_l): monomial or (1 - monomial), integer power.
struct ShapeFactor {
  bool one_minus = false;
  Monomial m;
  int exp = 0;
};
using ShapeProduct = std::vector<ShapeFactor>;

/// Exact symbolic exp(x_l dp/dx_l) as a product of M^e and (1-M)^e factors.
ShapeProduct shape_product_form(const PotentialFunction& p, int l);

Cx eval_shape_product(const ShapeProduct& sp, std::span<const Cx> x);

/// Canonical normal form of a shape product: pure monomial factors collected
/// into one total monomial, every 1-M factor rewritten so the monomial's
/// leading exponent is positive, signs folded out; exact integer comparison
/// of two products is then structural identity.
struct CanonicalProduct {
  int sign = 1;
  Monomial mono;                                     // product of all M^e
  std::vector<std::pair<Monomial, int>> one_minus;   // sorted
  bool operator==(const CanonicalProduct&) const = default;
};
CanonicalProduct canonicalize(const ShapeProduct& sp);

/// Yokota potential V(z_1..z_g): one sigma*(Li2(t^sigma) - pi^2/6) per
/// surviving tetrahedron, t the counterclockwise corner ratio.
PotentialFunction build_V(const TangleGraph& g, const VariableAssignment& va);

/// Colored-Jones potential W(w_1..w_m): P/N crossing functions, variant chosen
/// by the collapsed corner, endpoint forms at the two trivalent vertices.
PotentialFunction build_W(const TangleGraph& g, const VariableAssignment& va);

}  // namespace optlim
