#pragma once

#include <array>
#include <cstddef>
#include <ostream>
#include <vector>

#include "pisos/poly.hpp"

namespace pisos {

// Range R^p x L2^q, domain R^m x L2^n; laid out as [p, m; q, n].
struct OpDims {
  int p = 0;
  int m = 0;
  int q = 0;
  int n = 0;

  bool operator==(const OpDims&) const = default;
  OpDims transposed() const { return {m, p, n, q}; }
  bool square() const { return p == m && q == n; }
};

std::ostream& operator<<(std::ostream& os, const OpDims& d);

struct Interval {
  double a = 0.0;
  double b = 1.0;

  // Throws BadInterval unless a < b.
  Interval(double lower, double upper);
  Interval() = default;

  bool operator==(const Interval&) const = default;
  double length() const { return b - a; }
};

// Dense row-major matrix of polynomials. Zero-sized shapes are legal.
class PolyMatrix {
 public:
  PolyMatrix() = default;
  PolyMatrix(int rows, int cols);

  static PolyMatrix identity(int size);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  bool empty() const { return rows_ == 0 || cols_ == 0; }

  Poly2& operator()(int r, int c) { return data_[index(r, c)]; }
  const Poly2& operator()(int r, int c) const { return data_[index(r, c)]; }

  const std::vector<Poly2>& entries() const { return data_; }

  bool is_zero() const;
  bool is_numeric() const;
  Degrees max_degrees() const;

  PolyMatrix transposed() const;
  // Applies f to every entry.
  template <typename F>
  PolyMatrix map(F&& f) const {
    PolyMatrix r(rows_, cols_);
    for (std::size_t k = 0; k < data_.size(); ++k) r.data_[k] = f(data_[k]);
    return r;
  }

  PolyMatrix& operator+=(const PolyMatrix& other);
  friend PolyMatrix operator+(PolyMatrix a, const PolyMatrix& b) {
    return a += b;
  }
  friend PolyMatrix operator-(const PolyMatrix& a, const PolyMatrix& b);
  // Entrywise polynomial products summed over the inner index.
  friend PolyMatrix operator*(const PolyMatrix& a, const PolyMatrix& b);

  static PolyMatrix hcat(const PolyMatrix& left, const PolyMatrix& right);
  static PolyMatrix vcat(const PolyMatrix& top, const PolyMatrix& bottom);

 private:
  std::size_t index(int r, int c) const {
    return static_cast<std::size_t>(r) * cols_ + c;
  }
  int rows_ = 0;
  int cols_ = 0;
  std::vector<Poly2> data_;
};

// Matrix analogue of chain_integral: entry (i, j) is
//   sum_k  int_lower^upper f_ik(s, t) g_kj(t, theta) dt.
PolyMatrix chain_integral(const PolyMatrix& f, const PolyMatrix& g,
                          Bound lower, Bound upper);

PolyMatrix swap_vars(const PolyMatrix& m);

// A 4-PI operator R^m x L2^n[a,b] -> R^p x L2^q[a,b]:
//
//   [ P x + int_a^b Q1(s) y(s) ds                                      ]
//   [ Q2(s) x + R0(s) y(s) + int_a^s R1(s,t) y(t) dt
//                          + int_s^b R2(s,t) y(t) dt                   ]
//
// P is constant (p x m), Q1 is p x n, Q2 is q x m, R0/R1/R2 are q x n.
// Q1, Q2, R0 depend on s only.
struct OpVar {
  OpDims dims;
  Interval interval;
  PolyMatrix P;
  PolyMatrix Q1;
  PolyMatrix Q2;
  PolyMatrix R0;
  PolyMatrix R1;
  PolyMatrix R2;

  bool is_numeric() const;
  bool is_zero() const;

  // Throws DimMismatch if a block shape disagrees with dims or a block that
  // must be theta-free depends on theta.
  void validate() const;

  // Highest degrees per block group: {P/Q1/Q2/R0} and {R1/R2}.
  Degrees multiplier_degrees() const;
  Degrees kernel_degrees() const;
};

// Zero operator of the given dims. Throws BadInterval for a degenerate
// interval.
OpVar op_new(OpDims dims, Interval interval);
OpVar op_identity(int m, int n, Interval interval);

OpVar op_add(const OpVar& a, const OpVar& b);
OpVar op_sub(const OpVar& a, const OpVar& b);
OpVar op_scale(const Coefficient& c, const OpVar& a);
OpVar op_compose(const OpVar& a, const OpVar& b);
OpVar op_adjoint(const OpVar& a);
OpVar op_hcat(const OpVar& a, const OpVar& b);
OpVar op_vcat(const OpVar& a, const OpVar& b);
OpVar op_blocks_3x3(const std::array<std::array<OpVar, 3>, 3>& blocks);

OpVar evaluate_decisions(const OpVar& a, const Assignment& assignment);

// Blockwise approx_equal at the given tolerance.
bool approx_equal(const OpVar& a, const OpVar& b, double tol = 1e-10);

inline OpVar operator+(const OpVar& a, const OpVar& b) { return op_add(a, b); }
inline OpVar operator-(const OpVar& a, const OpVar& b) { return op_sub(a, b); }
inline OpVar operator*(const OpVar& a, const OpVar& b) {
  return op_compose(a, b);
}
inline OpVar operator*(const Coefficient& c, const OpVar& a) {
  return op_scale(c, a);
}

}  // namespace pisos
