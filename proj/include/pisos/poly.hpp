#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <ostream>
#include <utility>
#include <vector>

namespace pisos {

// Identifies a scalar decision variable. The high 32 bits hold the serial of
// the owning Program, the low 32 bits the index inside it.
struct DecisionVarId {
  std::uint64_t value = 0;

  constexpr std::uint32_t program() const {
    return static_cast<std::uint32_t>(value >> 32);
  }
  constexpr std::uint32_t index() const {
    return static_cast<std::uint32_t>(value & 0xffffffffu);
  }
  static constexpr DecisionVarId make(std::uint32_t program,
                                      std::uint32_t index) {
    return DecisionVarId{(static_cast<std::uint64_t>(program) << 32) | index};
  }

  auto operator<=>(const DecisionVarId&) const = default;
};

using Assignment = std::map<DecisionVarId, double>;

// An affine form c + sum_k a_k v_k in decision variables v_k. A coefficient
// without linear part is "numeric".
class Coefficient {
 public:
  using LinearTerm = std::pair<DecisionVarId, double>;

  Coefficient() = default;
  Coefficient(double constant) : constant_(constant) {}  // NOLINT

  static Coefficient variable(DecisionVarId id, double scale = 1.0);

  double constant() const { return constant_; }
  // Sorted by id, no zero entries.
  const std::vector<LinearTerm>& linear() const { return linear_; }

  bool is_numeric() const { return linear_.empty(); }
  bool is_zero() const { return constant_ == 0.0 && linear_.empty(); }
  // Largest absolute value among the constant and linear weights.
  double magnitude() const;
  double weight_of(DecisionVarId id) const;

  // Throws UnboundDecisionVar if a referenced variable is missing.
  double evaluate(const Assignment& assignment) const;

  // Drops linear weights with |w| <= threshold and zeroes a tiny constant.
  void prune(double threshold);

  Coefficient& operator+=(const Coefficient& other);
  Coefficient& operator-=(const Coefficient& other);
  Coefficient& operator*=(double factor);

  friend Coefficient operator+(Coefficient a, const Coefficient& b) {
    return a += b;
  }
  friend Coefficient operator-(Coefficient a, const Coefficient& b) {
    return a -= b;
  }
  friend Coefficient operator-(Coefficient a) { return a *= -1.0; }
  // Throws AffineDegreeViolation when both factors carry variables.
  friend Coefficient operator*(const Coefficient& a, const Coefficient& b);

  friend std::ostream& operator<<(std::ostream& os, const Coefficient& c);

 private:
  double constant_ = 0.0;
  std::vector<LinearTerm> linear_;
};

using AffineForm = Coefficient;

enum class Var { S, Theta };

// Integration limit: a fixed number, or one of the two canonical variables.
class Bound {
 public:
  enum class Kind { Constant, S, Theta };

  static Bound at(double value) { return Bound(Kind::Constant, value); }
  static Bound s() { return Bound(Kind::S, 0.0); }
  static Bound theta() { return Bound(Kind::Theta, 0.0); }

  Kind kind() const { return kind_; }
  double value() const { return value_; }

 private:
  Bound(Kind kind, double value) : kind_(kind), value_(value) {}
  Kind kind_;
  double value_;
};

// Bivariate polynomial in the primary variable s and the dummy variable
// theta. Exponent pair (i, j) means s^i theta^j.
class Poly2 {
 public:
  using Exponent = std::pair<int, int>;
  using TermMap = std::map<Exponent, Coefficient>;

  // Relative magnitude below which terms are dropped by normalize().
  static constexpr double kPruneTolerance = 1e-14;

  Poly2() = default;
  Poly2(double constant);        // NOLINT
  Poly2(Coefficient constant);   // NOLINT

  static Poly2 monomial(int s_degree, int theta_degree,
                        Coefficient coeff = 1.0);
  static Poly2 s() { return monomial(1, 0); }
  static Poly2 theta() { return monomial(0, 1); }

  const TermMap& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  bool is_numeric() const;
  std::size_t size() const { return terms_.size(); }
  Coefficient coefficient(int s_degree, int theta_degree) const;

  // Accumulates into the term map without normalizing.
  void add_term(int s_degree, int theta_degree, const Coefficient& coeff);
  Poly2& normalize();

  Poly2& operator+=(const Poly2& other);
  Poly2& operator-=(const Poly2& other);
  Poly2& operator*=(double factor);

  friend Poly2 operator+(Poly2 a, const Poly2& b) { return a += b; }
  friend Poly2 operator-(Poly2 a, const Poly2& b) { return a -= b; }
  friend Poly2 operator-(Poly2 a) { return a *= -1.0; }
  friend Poly2 operator*(Poly2 a, double f) { return a *= f; }
  friend Poly2 operator*(double f, Poly2 a) { return a *= f; }
  // Throws AffineDegreeViolation when both operands carry variables.
  friend Poly2 operator*(const Poly2& a, const Poly2& b);

  friend std::ostream& operator<<(std::ostream& os, const Poly2& p);

 private:
  TermMap terms_;
};

Poly2 scale(const Poly2& p, const Coefficient& c);

// Relabels variables: s -> s_image, theta -> theta_image. Mapping both onto
// the same variable merges the exponents.
Poly2 substitute(const Poly2& p, Var s_image, Var theta_image);
inline Poly2 swap_vars(const Poly2& p) {
  return substitute(p, Var::Theta, Var::S);
}

// Definite integral over `var` from `lower` to `upper`. The bounds may be
// constants or the other variable; referencing `var` itself throws
// InvalidBounds.
Poly2 integrate(const Poly2& p, Var var, Bound lower, Bound upper);

// Integral over a third dummy t of f(s, t) g(t, theta), with bounds that are
// constants, s, or theta. The result is a polynomial in (s, theta); this is
// how three-variable kernel compositions are reduced to two variables.
Poly2 chain_integral(const Poly2& f, const Poly2& g, Bound lower,
                     Bound upper);

double evaluate(const Poly2& p, double s, double theta,
                const Assignment& assignment);
// Numeric polynomials only; throws UnboundDecisionVar otherwise.
double evaluate(const Poly2& p, double s, double theta = 0.0);

Poly2 evaluate_decisions(const Poly2& p, const Assignment& assignment);

struct Degrees {
  int s = 0;
  int theta = 0;
  bool operator==(const Degrees&) const = default;
};
Degrees max_degrees(const Poly2& p);

// Termwise agreement within tol * (1 + largest magnitude).
bool approx_equal(const Poly2& p, const Poly2& q, double tol = 1e-12);

}  // namespace pisos
