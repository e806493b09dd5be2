#include "pisos/poly.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "pisos/errors.hpp"

namespace pisos {

namespace {

std::string describe(DecisionVarId id) {
  std::ostringstream os;
  os << "v" << id.program() << "_" << id.index();
  return os.str();
}

double ipow(double x, int n) {
  double r = 1.0;
  while (n > 0) {
    if (n & 1) r *= x;
    x *= x;
    n >>= 1;
  }
  return r;
}

}  // namespace

// ---------------------------------------------------------------------------
// Coefficient

Coefficient Coefficient::variable(DecisionVarId id, double scale) {
  Coefficient c;
  if (scale != 0.0) c.linear_.emplace_back(id, scale);
  return c;
}

double Coefficient::magnitude() const {
  double m = std::abs(constant_);
  for (const auto& [id, w] : linear_) m = std::max(m, std::abs(w));
  return m;
}

double Coefficient::weight_of(DecisionVarId id) const {
  auto it = std::lower_bound(
      linear_.begin(), linear_.end(), id,
      [](const LinearTerm& t, DecisionVarId key) { return t.first < key; });
  if (it != linear_.end() && it->first == id) return it->second;
  return 0.0;
}

double Coefficient::evaluate(const Assignment& assignment) const {
  double v = constant_;
  for (const auto& [id, w] : linear_) {
    auto it = assignment.find(id);
    if (it == assignment.end()) {
      throw UnboundDecisionVar("no value assigned to decision variable " +
                               describe(id));
    }
    v += w * it->second;
  }
  return v;
}

void Coefficient::prune(double threshold) {
  if (std::abs(constant_) <= threshold) constant_ = 0.0;
  std::erase_if(linear_, [threshold](const LinearTerm& t) {
    return std::abs(t.second) <= threshold;
  });
}

Coefficient& Coefficient::operator+=(const Coefficient& other) {
  constant_ += other.constant_;
  if (other.linear_.empty()) return *this;
  if (linear_.empty()) {
    linear_ = other.linear_;
    return *this;
  }
  std::vector<LinearTerm> merged;
  merged.reserve(linear_.size() + other.linear_.size());
  auto a = linear_.begin();
  auto b = other.linear_.begin();
  while (a != linear_.end() || b != other.linear_.end()) {
    if (b == other.linear_.end() ||
        (a != linear_.end() && a->first < b->first)) {
      merged.push_back(*a++);
    } else if (a == linear_.end() || b->first < a->first) {
      merged.push_back(*b++);
    } else {
      double w = a->second + b->second;
      if (w != 0.0) merged.emplace_back(a->first, w);
      ++a;
      ++b;
    }
  }
  linear_ = std::move(merged);
  return *this;
}

Coefficient& Coefficient::operator-=(const Coefficient& other) {
  return *this += -other;
}

Coefficient& Coefficient::operator*=(double factor) {
  if (factor == 0.0) {
    constant_ = 0.0;
    linear_.clear();
    return *this;
  }
  constant_ *= factor;
  for (auto& t : linear_) t.second *= factor;
  return *this;
}

Coefficient operator*(const Coefficient& a, const Coefficient& b) {
  if (!a.is_numeric() && !b.is_numeric()) {
    throw AffineDegreeViolation(
        "product of two expressions that both carry decision variables");
  }
  if (a.is_numeric()) {
    Coefficient r = b;
    return r *= a.constant_;
  }
  Coefficient r = a;
  return r *= b.constant_;
}

std::ostream& operator<<(std::ostream& os, const Coefficient& c) {
  os << c.constant_;
  for (const auto& [id, w] : c.linear_) {
    os << (w < 0 ? " - " : " + ") << std::abs(w) << "*" << describe(id);
  }
  return os;
}

// ---------------------------------------------------------------------------
// Poly2

Poly2::Poly2(double constant) {
  if (constant != 0.0) terms_.emplace(Exponent{0, 0}, Coefficient(constant));
}

Poly2::Poly2(Coefficient constant) {
  if (!constant.is_zero()) terms_.emplace(Exponent{0, 0}, std::move(constant));
}

Poly2 Poly2::monomial(int s_degree, int theta_degree, Coefficient coeff) {
  Poly2 p;
  p.add_term(s_degree, theta_degree, coeff);
  return p.normalize();
}

bool Poly2::is_numeric() const {
  return std::all_of(terms_.begin(), terms_.end(),
                     [](const auto& t) { return t.second.is_numeric(); });
}

Coefficient Poly2::coefficient(int s_degree, int theta_degree) const {
  auto it = terms_.find({s_degree, theta_degree});
  return it == terms_.end() ? Coefficient() : it->second;
}

void Poly2::add_term(int s_degree, int theta_degree,
                     const Coefficient& coeff) {
  if (coeff.is_zero()) return;
  auto [it, inserted] = terms_.try_emplace({s_degree, theta_degree}, coeff);
  if (!inserted) it->second += coeff;
}

Poly2& Poly2::normalize() {
  double largest = 0.0;
  for (const auto& [e, c] : terms_) largest = std::max(largest, c.magnitude());
  const double threshold = kPruneTolerance * largest;
  for (auto it = terms_.begin(); it != terms_.end();) {
    it->second.prune(threshold);
    if (it->second.is_zero()) {
      it = terms_.erase(it);
    } else {
      ++it;
    }
  }
  return *this;
}

Poly2& Poly2::operator+=(const Poly2& other) {
  for (const auto& [e, c] : other.terms_) add_term(e.first, e.second, c);
  return normalize();
}

Poly2& Poly2::operator-=(const Poly2& other) {
  for (const auto& [e, c] : other.terms_) add_term(e.first, e.second, -c);
  return normalize();
}

Poly2& Poly2::operator*=(double factor) {
  if (factor == 0.0) {
    terms_.clear();
    return *this;
  }
  for (auto& [e, c] : terms_) c *= factor;
  return *this;
}

Poly2 operator*(const Poly2& a, const Poly2& b) {
  Poly2 r;
  for (const auto& [ea, ca] : a.terms()) {
    for (const auto& [eb, cb] : b.terms()) {
      r.add_term(ea.first + eb.first, ea.second + eb.second, ca * cb);
    }
  }
  return r.normalize();
}

std::ostream& operator<<(std::ostream& os, const Poly2& p) {
  if (p.is_zero()) return os << "0";
  bool first = true;
  for (const auto& [e, c] : p.terms()) {
    if (!first) os << " + ";
    first = false;
    os << "(" << c << ")";
    if (e.first > 0) os << "*s^" << e.first;
    if (e.second > 0) os << "*th^" << e.second;
  }
  return os;
}

Poly2 scale(const Poly2& p, const Coefficient& c) {
  Poly2 r;
  for (const auto& [e, coeff] : p.terms()) {
    r.add_term(e.first, e.second, coeff * c);
  }
  return r.normalize();
}

Poly2 substitute(const Poly2& p, Var s_image, Var theta_image) {
  Poly2 r;
  for (const auto& [e, c] : p.terms()) {
    int s_exp = 0;
    int t_exp = 0;
    (s_image == Var::S ? s_exp : t_exp) += e.first;
    (theta_image == Var::S ? s_exp : t_exp) += e.second;
    r.add_term(s_exp, t_exp, c);
  }
  return r.normalize();
}

namespace {

// Places bound^power into (s, theta) exponents and a numeric factor.
struct BoundPower {
  double factor = 1.0;
  int s_exp = 0;
  int theta_exp = 0;
};

BoundPower raise(Bound bound, int power) {
  switch (bound.kind()) {
    case Bound::Kind::Constant:
      return {ipow(bound.value(), power), 0, 0};
    case Bound::Kind::S:
      return {1.0, power, 0};
    case Bound::Kind::Theta:
      return {1.0, 0, power};
  }
  return {};
}

bool references(Bound bound, Var var) {
  return (var == Var::S && bound.kind() == Bound::Kind::S) ||
         (var == Var::Theta && bound.kind() == Bound::Kind::Theta);
}

}  // namespace

Poly2 integrate(const Poly2& p, Var var, Bound lower, Bound upper) {
  if (references(lower, var) || references(upper, var)) {
    throw InvalidBounds("integration bounds reference the integration variable");
  }
  Poly2 r;
  for (const auto& [e, c] : p.terms()) {
    const int k = var == Var::S ? e.first : e.second;
    const int other_s = var == Var::S ? 0 : e.first;
    const int other_t = var == Var::S ? e.second : 0;
    const double inv = 1.0 / (k + 1);
    for (auto [bound, sign] : {std::pair{upper, 1.0}, std::pair{lower, -1.0}}) {
      BoundPower bp = raise(bound, k + 1);
      Coefficient term = c;
      term *= sign * inv * bp.factor;
      r.add_term(other_s + bp.s_exp, other_t + bp.theta_exp, term);
    }
  }
  return r.normalize();
}

Poly2 chain_integral(const Poly2& f, const Poly2& g, Bound lower,
                     Bound upper) {
  Poly2 r;
  for (const auto& [ef, cf] : f.terms()) {
    for (const auto& [eg, cg] : g.terms()) {
      const int n = ef.second + eg.first;
      const Coefficient product = cf * cg;
      const double inv = 1.0 / (n + 1);
      for (auto [bound, sign] :
           {std::pair{upper, 1.0}, std::pair{lower, -1.0}}) {
        BoundPower bp = raise(bound, n + 1);
        if (bp.factor == 0.0) continue;
        Coefficient term = product;
        term *= sign * inv * bp.factor;
        r.add_term(ef.first + bp.s_exp, eg.second + bp.theta_exp, term);
      }
    }
  }
  return r.normalize();
}

double evaluate(const Poly2& p, double s, double theta,
                const Assignment& assignment) {
  double v = 0.0;
  for (const auto& [e, c] : p.terms()) {
    v += c.evaluate(assignment) * ipow(s, e.first) * ipow(theta, e.second);
  }
  return v;
}

double evaluate(const Poly2& p, double s, double theta) {
  static const Assignment kEmpty;
  return evaluate(p, s, theta, kEmpty);
}

Poly2 evaluate_decisions(const Poly2& p, const Assignment& assignment) {
  Poly2 r;
  for (const auto& [e, c] : p.terms()) {
    r.add_term(e.first, e.second, Coefficient(c.evaluate(assignment)));
  }
  return r.normalize();
}

Degrees max_degrees(const Poly2& p) {
  Degrees d;
  for (const auto& [e, c] : p.terms()) {
    d.s = std::max(d.s, e.first);
    d.theta = std::max(d.theta, e.second);
  }
  return d;
}

bool approx_equal(const Poly2& p, const Poly2& q, double tol) {
  double largest = 0.0;
  for (const auto& [e, c] : p.terms()) largest = std::max(largest, c.magnitude());
  for (const auto& [e, c] : q.terms()) largest = std::max(largest, c.magnitude());
  Poly2 diff = p;
  for (const auto& [e, c] : q.terms()) diff.add_term(e.first, e.second, -c);
  const double limit = tol * (1.0 + largest);
  for (const auto& [e, c] : diff.terms()) {
    if (c.magnitude() > limit) return false;
  }
  return true;
}

}  // namespace pisos
