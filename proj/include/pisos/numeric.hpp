#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "pisos/opvar.hpp"

namespace pisos {

struct QuadratureRule {
  Eigen::VectorXd nodes;
  Eigen::VectorXd weights;
};

// Gauss-Legendre rule on the interval; exact through degree 2*count-1.
QuadratureRule quad_nodes(double a, double b, int count);
inline QuadratureRule quad_nodes(const Interval& interval, int count) {
  return quad_nodes(interval.a, interval.b, count);
}

// An element (x, y) of R^m x L2^n[a,b], with y stored by its values at the
// Gauss-Legendre nodes of the interval. Between nodes y is the polynomial
// interpolant, so polynomial functions of degree < node count are exact.
struct FunctionSample {
  Interval interval;
  Eigen::VectorXd x;
  Eigen::VectorXd nodes;
  Eigen::VectorXd weights;
  Eigen::MatrixXd y;  // n x nodes

  int finite_dim() const { return static_cast<int>(x.size()); }
  int function_dim() const { return static_cast<int>(y.rows()); }
  int node_count() const { return static_cast<int>(nodes.size()); }

  FunctionSample& operator+=(const FunctionSample& other);
  FunctionSample& operator*=(double factor);
};

FunctionSample make_sample(const Interval& interval, int m, int n,
                           int node_count);

// Samples y_i(s) = functions[i](s) at the nodes.
FunctionSample make_sample(const Interval& interval, const Eigen::VectorXd& x,
                           const std::vector<std::function<double(double)>>& y,
                           int node_count);

// x uniform in [-1,1]; each y component a polynomial of the given degree
// with coefficients uniform in [-1,1] in the variable mapped to [-1,1].
FunctionSample random_sample(std::mt19937_64& rng, const Interval& interval,
                             int m, int n, int degree, int node_count);

// Value of component `row` of y at an arbitrary point, by barycentric
// interpolation through the nodes.
double interpolate(const FunctionSample& z, int row, double s);

// Applies a numeric operator. Throws DimMismatch on shape disagreement and
// AffineDegreeViolation if the operator still carries decision variables.
FunctionSample op_apply(const OpVar& a, const FunctionSample& z);

// x1'x2 + int_a^b y1(s)'y2(s) ds by the sample's quadrature.
double inner_product(const FunctionSample& z1, const FunctionSample& z2);
inline double norm(const FunctionSample& z) {
  return std::sqrt(inner_product(z, z));
}

// max(8, total polynomial degree + 2).
int default_node_count(const OpVar& a);

struct NormEstimate {
  double value = 0.0;       // best lower bound found
  double best_trial = 0.0;  // best ratio among the random trials alone
  int power_iterations = 0;
};

// Lower bound on the induced norm of a numeric operator: the best ratio
// ||Az|| / ||z|| over random polynomial inputs, refined by power iteration on
// the discretized Gram operator. Trial k draws from a generator seeded by
// (seed, k), so the result does not depend on evaluation order.
NormEstimate estimate_norm(const OpVar& a, int trials, int node_count,
                           std::uint64_t seed = 1);

}  // namespace pisos
