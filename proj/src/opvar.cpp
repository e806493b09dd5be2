#include "pisos/opvar.hpp"

#include <algorithm>
#include <sstream>
#include <string>

#include "pisos/errors.hpp"

namespace pisos {

std::ostream& operator<<(std::ostream& os, const OpDims& d) {
  return os << "[" << d.p << "," << d.m << ";" << d.q << "," << d.n << "]";
}

Interval::Interval(double lower, double upper) : a(lower), b(upper) {
  if (!(lower < upper)) {
    std::ostringstream os;
    os << "interval [" << lower << ", " << upper << "] is empty or reversed";
    throw BadInterval(os.str());
  }
}

// ---------------------------------------------------------------------------
// PolyMatrix

PolyMatrix::PolyMatrix(int rows, int cols)
    : rows_(rows), cols_(cols),
      data_(static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols)) {
  if (rows < 0 || cols < 0) throw DimMismatch("negative matrix dimension");
}

PolyMatrix PolyMatrix::identity(int size) {
  PolyMatrix r(size, size);
  for (int i = 0; i < size; ++i) r(i, i) = Poly2(1.0);
  return r;
}

bool PolyMatrix::is_zero() const {
  return std::all_of(data_.begin(), data_.end(),
                     [](const Poly2& p) { return p.is_zero(); });
}

bool PolyMatrix::is_numeric() const {
  return std::all_of(data_.begin(), data_.end(),
                     [](const Poly2& p) { return p.is_numeric(); });
}

Degrees PolyMatrix::max_degrees() const {
  Degrees d;
  for (const auto& p : data_) {
    Degrees e = pisos::max_degrees(p);
    d.s = std::max(d.s, e.s);
    d.theta = std::max(d.theta, e.theta);
  }
  return d;
}

PolyMatrix PolyMatrix::transposed() const {
  PolyMatrix r(cols_, rows_);
  for (int i = 0; i < rows_; ++i) {
    for (int j = 0; j < cols_; ++j) r(j, i) = (*this)(i, j);
  }
  return r;
}

PolyMatrix& PolyMatrix::operator+=(const PolyMatrix& other) {
  if (rows_ != other.rows_ || cols_ != other.cols_) {
    throw DimMismatch("matrix sum of " + std::to_string(rows_) + "x" +
                      std::to_string(cols_) + " and " +
                      std::to_string(other.rows_) + "x" +
                      std::to_string(other.cols_));
  }
  for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += other.data_[k];
  return *this;
}

PolyMatrix operator-(const PolyMatrix& a, const PolyMatrix& b) {
  return a + b.map([](const Poly2& p) { return -p; });
}

PolyMatrix operator*(const PolyMatrix& a, const PolyMatrix& b) {
  if (a.cols_ != b.rows_) {
    throw DimMismatch("matrix product inner dimensions " +
                      std::to_string(a.cols_) + " and " +
                      std::to_string(b.rows_));
  }
  PolyMatrix r(a.rows_, b.cols_);
  for (int i = 0; i < a.rows_; ++i) {
    for (int j = 0; j < b.cols_; ++j) {
      Poly2 acc;
      for (int k = 0; k < a.cols_; ++k) {
        if (a(i, k).is_zero() || b(k, j).is_zero()) continue;
        acc += a(i, k) * b(k, j);
      }
      r(i, j) = std::move(acc);
    }
  }
  return r;
}

PolyMatrix PolyMatrix::hcat(const PolyMatrix& left, const PolyMatrix& right) {
  if (left.rows_ != right.rows_) {
    throw DimMismatch("horizontal concatenation of blocks with " +
                      std::to_string(left.rows_) + " and " +
                      std::to_string(right.rows_) + " rows");
  }
  PolyMatrix r(left.rows_, left.cols_ + right.cols_);
  for (int i = 0; i < left.rows_; ++i) {
    for (int j = 0; j < left.cols_; ++j) r(i, j) = left(i, j);
    for (int j = 0; j < right.cols_; ++j) r(i, left.cols_ + j) = right(i, j);
  }
  return r;
}

PolyMatrix PolyMatrix::vcat(const PolyMatrix& top, const PolyMatrix& bottom) {
  if (top.cols_ != bottom.cols_) {
    throw DimMismatch("vertical concatenation of blocks with " +
                      std::to_string(top.cols_) + " and " +
                      std::to_string(bottom.cols_) + " columns");
  }
  PolyMatrix r(top.rows_ + bottom.rows_, top.cols_);
  for (int j = 0; j < top.cols_; ++j) {
    for (int i = 0; i < top.rows_; ++i) r(i, j) = top(i, j);
    for (int i = 0; i < bottom.rows_; ++i) r(top.rows_ + i, j) = bottom(i, j);
  }
  return r;
}

PolyMatrix chain_integral(const PolyMatrix& f, const PolyMatrix& g,
                          Bound lower, Bound upper) {
  if (f.cols() != g.rows()) throw DimMismatch("chain integral inner dimension");
  PolyMatrix r(f.rows(), g.cols());
  for (int i = 0; i < f.rows(); ++i) {
    for (int j = 0; j < g.cols(); ++j) {
      Poly2 acc;
      for (int k = 0; k < f.cols(); ++k) {
        if (f(i, k).is_zero() || g(k, j).is_zero()) continue;
        acc += chain_integral(f(i, k), g(k, j), lower, upper);
      }
      r(i, j) = std::move(acc);
    }
  }
  return r;
}

PolyMatrix swap_vars(const PolyMatrix& m) {
  return m.map([](const Poly2& p) { return swap_vars(p); });
}

// ---------------------------------------------------------------------------
// OpVar

namespace {

void check_shape(const PolyMatrix& block, int rows, int cols,
                 const char* name) {
  if (block.rows() != rows || block.cols() != cols) {
    std::ostringstream os;
    os << "block " << name << " is " << block.rows() << "x" << block.cols()
       << ", expected " << rows << "x" << cols;
    throw DimMismatch(os.str());
  }
}

void check_theta_free(const PolyMatrix& block, const char* name) {
  if (block.max_degrees().theta != 0) {
    throw DimMismatch(std::string("block ") + name +
                      " must not depend on theta");
  }
}

void check_same_interval(const OpVar& a, const OpVar& b) {
  if (!(a.interval == b.interval)) {
    std::ostringstream os;
    os << "operators live on [" << a.interval.a << "," << a.interval.b
       << "] and [" << b.interval.a << "," << b.interval.b << "]";
    throw IntervalMismatch(os.str());
  }
}

[[noreturn]] void dims_error(const char* what, const OpDims& a,
                             const OpDims& b) {
  std::ostringstream os;
  os << what << ": dims " << a << " and " << b;
  throw DimMismatch(os.str());
}

template <typename F>
OpVar map_blocks(const OpVar& a, F&& f) {
  OpVar r = a;
  r.P = f(a.P);
  r.Q1 = f(a.Q1);
  r.Q2 = f(a.Q2);
  r.R0 = f(a.R0);
  r.R1 = f(a.R1);
  r.R2 = f(a.R2);
  return r;
}

}  // namespace

bool OpVar::is_numeric() const {
  return P.is_numeric() && Q1.is_numeric() && Q2.is_numeric() &&
         R0.is_numeric() && R1.is_numeric() && R2.is_numeric();
}

bool OpVar::is_zero() const {
  return P.is_zero() && Q1.is_zero() && Q2.is_zero() && R0.is_zero() &&
         R1.is_zero() && R2.is_zero();
}

void OpVar::validate() const {
  if (dims.p < 0 || dims.m < 0 || dims.q < 0 || dims.n < 0) {
    throw DimMismatch("negative operator dimension");
  }
  check_shape(P, dims.p, dims.m, "P");
  check_shape(Q1, dims.p, dims.n, "Q1");
  check_shape(Q2, dims.q, dims.m, "Q2");
  check_shape(R0, dims.q, dims.n, "R0");
  check_shape(R1, dims.q, dims.n, "R1");
  check_shape(R2, dims.q, dims.n, "R2");
  if (P.max_degrees().s != 0 || P.max_degrees().theta != 0) {
    throw DimMismatch("block P must be constant");
  }
  check_theta_free(Q1, "Q1");
  check_theta_free(Q2, "Q2");
  check_theta_free(R0, "R0");
}

Degrees OpVar::multiplier_degrees() const {
  Degrees d;
  for (const PolyMatrix* m : {&Q1, &Q2, &R0}) {
    d.s = std::max(d.s, m->max_degrees().s);
  }
  return d;
}

Degrees OpVar::kernel_degrees() const {
  Degrees d1 = R1.max_degrees();
  Degrees d2 = R2.max_degrees();
  return {std::max(d1.s, d2.s), std::max(d1.theta, d2.theta)};
}

OpVar op_new(OpDims dims, Interval interval) {
  if (!(interval.a < interval.b)) {
    throw BadInterval("operator interval must satisfy a < b");
  }
  if (dims.p < 0 || dims.m < 0 || dims.q < 0 || dims.n < 0) {
    throw DimMismatch("negative operator dimension");
  }
  OpVar r;
  r.dims = dims;
  r.interval = interval;
  r.P = PolyMatrix(dims.p, dims.m);
  r.Q1 = PolyMatrix(dims.p, dims.n);
  r.Q2 = PolyMatrix(dims.q, dims.m);
  r.R0 = PolyMatrix(dims.q, dims.n);
  r.R1 = PolyMatrix(dims.q, dims.n);
  r.R2 = PolyMatrix(dims.q, dims.n);
  return r;
}

OpVar op_identity(int m, int n, Interval interval) {
  OpVar r = op_new({m, m, n, n}, interval);
  r.P = PolyMatrix::identity(m);
  r.R0 = PolyMatrix::identity(n);
  return r;
}

OpVar op_add(const OpVar& a, const OpVar& b) {
  if (!(a.dims == b.dims)) dims_error("addition", a.dims, b.dims);
  check_same_interval(a, b);
  OpVar r = a;
  r.P += b.P;
  r.Q1 += b.Q1;
  r.Q2 += b.Q2;
  r.R0 += b.R0;
  r.R1 += b.R1;
  r.R2 += b.R2;
  return r;
}

OpVar op_sub(const OpVar& a, const OpVar& b) {
  return op_add(a, op_scale(-1.0, b));
}

OpVar op_scale(const Coefficient& c, const OpVar& a) {
  if (!c.is_numeric() && !a.is_numeric()) {
    throw AffineDegreeViolation(
        "scaling an operator with decision variables by a decision "
        "expression");
  }
  return map_blocks(a, [&c](const PolyMatrix& m) {
    return m.map([&c](const Poly2& p) { return scale(p, c); });
  });
}

OpVar op_compose(const OpVar& a, const OpVar& b) {
  if (a.dims.m != b.dims.p || a.dims.n != b.dims.q) {
    dims_error("composition", a.dims, b.dims);
  }
  check_same_interval(a, b);
  if (!a.is_numeric() && !b.is_numeric()) {
    throw AffineDegreeViolation(
        "composition of two operators that both carry decision variables");
  }
  const Bound lo = Bound::at(a.interval.a);
  const Bound hi = Bound::at(a.interval.b);
  const Bound s = Bound::s();
  const Bound th = Bound::theta();

  // Left operand blocks.
  const PolyMatrix& A = a.P;
  const PolyMatrix& B1 = a.Q1;
  const PolyMatrix& B2 = a.Q2;
  const PolyMatrix& C0 = a.R0;
  const PolyMatrix& C1 = a.R1;
  const PolyMatrix& C2 = a.R2;
  // Right operand blocks.
  const PolyMatrix& P = b.P;
  const PolyMatrix& Q1 = b.Q1;
  const PolyMatrix& Q2 = b.Q2;
  const PolyMatrix& R0 = b.R0;
  const PolyMatrix& R1 = b.R1;
  const PolyMatrix& R2 = b.R2;

  // Copies of s-only blocks moved onto the dummy slot, so that
  // chain_integral sees f(s, t) = B1(t) and products see Q1(theta).
  const PolyMatrix B1t = swap_vars(B1);
  const PolyMatrix Q1t = swap_vars(Q1);
  const PolyMatrix R0t = swap_vars(R0);

  OpVar r = op_new({a.dims.p, b.dims.m, a.dims.q, b.dims.n}, a.interval);

  r.P = A * P + chain_integral(B1t, Q2, lo, hi);

  // Integrals over eta with s on the theta slot, swapped back afterwards.
  r.Q1 = A * Q1 + B1 * R0 +
         swap_vars(chain_integral(B1t, R1, th, hi) +
                   chain_integral(B1t, R2, lo, th));

  r.Q2 = B2 * P + C0 * Q2 + chain_integral(C1, Q2, lo, s) +
         chain_integral(C2, Q2, s, hi);

  r.R0 = C0 * R0;

  const PolyMatrix outer = B2 * Q1t;
  r.R1 = outer + C0 * R1 + C1 * R0t + chain_integral(C1, R2, lo, th) +
         chain_integral(C1, R1, th, s) + chain_integral(C2, R1, s, hi);
  r.R2 = outer + C0 * R2 + C2 * R0t + chain_integral(C1, R2, lo, s) +
         chain_integral(C2, R2, s, th) + chain_integral(C2, R1, th, hi);
  return r;
}

OpVar op_adjoint(const OpVar& a) {
  OpVar r = op_new(a.dims.transposed(), a.interval);
  r.P = a.P.transposed();
  r.Q1 = a.Q2.transposed();
  r.Q2 = a.Q1.transposed();
  r.R0 = a.R0.transposed();
  r.R1 = swap_vars(a.R2).transposed();
  r.R2 = swap_vars(a.R1).transposed();
  return r;
}

OpVar op_hcat(const OpVar& a, const OpVar& b) {
  if (a.dims.p != b.dims.p || a.dims.q != b.dims.q) {
    dims_error("horizontal concatenation needs equal range", a.dims, b.dims);
  }
  check_same_interval(a, b);
  OpVar r = op_new({a.dims.p, a.dims.m + b.dims.m, a.dims.q,
                    a.dims.n + b.dims.n},
                   a.interval);
  r.P = PolyMatrix::hcat(a.P, b.P);
  r.Q1 = PolyMatrix::hcat(a.Q1, b.Q1);
  r.Q2 = PolyMatrix::hcat(a.Q2, b.Q2);
  r.R0 = PolyMatrix::hcat(a.R0, b.R0);
  r.R1 = PolyMatrix::hcat(a.R1, b.R1);
  r.R2 = PolyMatrix::hcat(a.R2, b.R2);
  return r;
}

OpVar op_vcat(const OpVar& a, const OpVar& b) {
  if (a.dims.m != b.dims.m || a.dims.n != b.dims.n) {
    dims_error("vertical concatenation needs equal domain", a.dims, b.dims);
  }
  check_same_interval(a, b);
  OpVar r = op_new({a.dims.p + b.dims.p, a.dims.m, a.dims.q + b.dims.q,
                    a.dims.n},
                   a.interval);
  r.P = PolyMatrix::vcat(a.P, b.P);
  r.Q1 = PolyMatrix::vcat(a.Q1, b.Q1);
  r.Q2 = PolyMatrix::vcat(a.Q2, b.Q2);
  r.R0 = PolyMatrix::vcat(a.R0, b.R0);
  r.R1 = PolyMatrix::vcat(a.R1, b.R1);
  r.R2 = PolyMatrix::vcat(a.R2, b.R2);
  return r;
}

OpVar op_blocks_3x3(const std::array<std::array<OpVar, 3>, 3>& blocks) {
  std::array<OpVar, 3> rows;
  for (int i = 0; i < 3; ++i) {
    rows[i] = op_hcat(op_hcat(blocks[i][0], blocks[i][1]), blocks[i][2]);
  }
  return op_vcat(op_vcat(rows[0], rows[1]), rows[2]);
}

OpVar evaluate_decisions(const OpVar& a, const Assignment& assignment) {
  return map_blocks(a, [&assignment](const PolyMatrix& m) {
    return m.map([&assignment](const Poly2& p) {
      return evaluate_decisions(p, assignment);
    });
  });
}

bool approx_equal(const OpVar& a, const OpVar& b, double tol) {
  if (!(a.dims == b.dims) || !(a.interval == b.interval)) return false;
  auto same = [tol](const PolyMatrix& x, const PolyMatrix& y) {
    for (std::size_t k = 0; k < x.entries().size(); ++k) {
      if (!approx_equal(x.entries()[k], y.entries()[k], tol)) return false;
    }
    return true;
  };
  return same(a.P, b.P) && same(a.Q1, b.Q1) && same(a.Q2, b.Q2) &&
         same(a.R0, b.R0) && same(a.R1, b.R1) && same(a.R2, b.R2);
}

}  // namespace pisos
