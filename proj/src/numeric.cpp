#include "pisos/numeric.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "pisos/errors.hpp"

namespace pisos {

QuadratureRule quad_nodes(double a, double b, int count) {
  if (count < 1) throw DimMismatch("quadrature needs at least one node");
  QuadratureRule rule{Eigen::VectorXd(count), Eigen::VectorXd(count)};
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);
  for (int i = 0; i < (count + 1) / 2; ++i) {
    // Newton iteration on P_count from the Chebyshev-like initial guess.
    double x = std::cos(std::numbers::pi * (i + 0.75) / (count + 0.5));
    double dp = 1.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = x;
      for (int k = 2; k <= count; ++k) {
        double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = pk;
      }
      dp = count * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // Recompute the derivative at the converged root.
    double p0 = 1.0;
    double p1 = x;
    for (int k = 2; k <= count; ++k) {
      double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = pk;
    }
    dp = count * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    // Ascending order: node i is the negative root.
    rule.nodes(i) = mid - half * x;
    rule.nodes(count - 1 - i) = mid + half * x;
    rule.weights(i) = half * w;
    rule.weights(count - 1 - i) = half * w;
  }
  if (count % 2 == 1) rule.nodes(count / 2) = mid;
  return rule;
}

// ---------------------------------------------------------------------------
// FunctionSample

FunctionSample& FunctionSample::operator+=(const FunctionSample& other) {
  if (other.x.size() != x.size() || other.y.rows() != y.rows() ||
      other.y.cols() != y.cols()) {
    throw DimMismatch("sample sum with different shapes");
  }
  x += other.x;
  y += other.y;
  return *this;
}

FunctionSample& FunctionSample::operator*=(double factor) {
  x *= factor;
  y *= factor;
  return *this;
}

FunctionSample make_sample(const Interval& interval, int m, int n,
                           int node_count) {
  QuadratureRule rule = quad_nodes(interval, node_count);
  FunctionSample z;
  z.interval = interval;
  z.x = Eigen::VectorXd::Zero(m);
  z.nodes = std::move(rule.nodes);
  z.weights = std::move(rule.weights);
  z.y = Eigen::MatrixXd::Zero(n, node_count);
  return z;
}

FunctionSample make_sample(const Interval& interval, const Eigen::VectorXd& x,
                           const std::vector<std::function<double(double)>>& y,
                           int node_count) {
  FunctionSample z = make_sample(interval, static_cast<int>(x.size()),
                                 static_cast<int>(y.size()), node_count);
  z.x = x;
  for (std::size_t i = 0; i < y.size(); ++i) {
    for (int k = 0; k < node_count; ++k) z.y(i, k) = y[i](z.nodes(k));
  }
  return z;
}

FunctionSample random_sample(std::mt19937_64& rng, const Interval& interval,
                             int m, int n, int degree, int node_count) {
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  FunctionSample z = make_sample(interval, m, n, node_count);
  for (int i = 0; i < m; ++i) z.x(i) = unit(rng);
  const double mid = 0.5 * (interval.a + interval.b);
  const double half = 0.5 * interval.length();
  for (int i = 0; i < n; ++i) {
    std::vector<double> c(degree + 1);
    for (double& ci : c) ci = unit(rng);
    for (int k = 0; k < node_count; ++k) {
      const double t = (z.nodes(k) - mid) / half;
      double v = 0.0;
      for (int d = degree; d >= 0; --d) v = v * t + c[d];
      z.y(i, k) = v;
    }
  }
  return z;
}

namespace {

// Barycentric weights for the sample nodes, scaled to avoid under/overflow.
Eigen::VectorXd barycentric_weights(const Eigen::VectorXd& nodes,
                                    double length) {
  const Eigen::Index count = nodes.size();
  const double scale = 4.0 / length;
  Eigen::VectorXd w(count);
  for (Eigen::Index j = 0; j < count; ++j) {
    double prod = 1.0;
    for (Eigen::Index k = 0; k < count; ++k) {
      if (k != j) prod *= scale * (nodes(j) - nodes(k));
    }
    w(j) = 1.0 / prod;
  }
  return w;
}

// Row vector of interpolation coefficients: value(s) = coeffs . y_row.
Eigen::RowVectorXd interpolation_row(const Eigen::VectorXd& nodes,
                                     const Eigen::VectorXd& bary, double s) {
  const Eigen::Index count = nodes.size();
  Eigen::RowVectorXd row = Eigen::RowVectorXd::Zero(count);
  for (Eigen::Index j = 0; j < count; ++j) {
    if (s == nodes(j)) {
      row(j) = 1.0;
      return row;
    }
  }
  double denom = 0.0;
  for (Eigen::Index j = 0; j < count; ++j) {
    row(j) = bary(j) / (s - nodes(j));
    denom += row(j);
  }
  return row / denom;
}

}  // namespace

double interpolate(const FunctionSample& z, int row, double s) {
  Eigen::VectorXd bary = barycentric_weights(z.nodes, z.interval.length());
  return interpolation_row(z.nodes, bary, s).dot(z.y.row(row));
}

FunctionSample op_apply(const OpVar& a, const FunctionSample& z) {
  if (!a.is_numeric()) {
    throw AffineDegreeViolation("op_apply needs a numeric operator");
  }
  if (a.dims.m != z.finite_dim() || a.dims.n != z.function_dim()) {
    std::ostringstream os;
    os << "operator dims " << a.dims << " cannot act on a sample in R^"
       << z.finite_dim() << " x L2^" << z.function_dim();
    throw DimMismatch(os.str());
  }
  if (!(a.interval == z.interval)) {
    throw IntervalMismatch("operator and sample live on different intervals");
  }
  const int count = z.node_count();
  const int p = a.dims.p;
  const int q = a.dims.q;
  const int m = a.dims.m;
  const int n = a.dims.n;

  FunctionSample out = make_sample(a.interval, p, q, count);
  out.nodes = z.nodes;
  out.weights = z.weights;

  auto matrix_at = [](const PolyMatrix& block, double s, double t) {
    Eigen::MatrixXd v(block.rows(), block.cols());
    for (int i = 0; i < block.rows(); ++i) {
      for (int j = 0; j < block.cols(); ++j) v(i, j) = evaluate(block(i, j), s, t);
    }
    return v;
  };

  const Eigen::MatrixXd P = matrix_at(a.P, 0.0, 0.0);
  out.x = P * z.x;
  if (n > 0 && p > 0) {
    for (int k = 0; k < count; ++k) {
      out.x += z.weights(k) * matrix_at(a.Q1, z.nodes(k), 0.0) * z.y.col(k);
    }
  }
  if (q == 0) return out;

  const Eigen::VectorXd bary = barycentric_weights(z.nodes, z.interval.length());
  const int kernel_degree = std::max(a.kernel_degrees().theta, 0);
  const int sub_count = (kernel_degree + count) / 2 + 2;
  const QuadratureRule unit_rule = quad_nodes(0.0, 1.0, sub_count);

  for (int i = 0; i < count; ++i) {
    const double s = z.nodes(i);
    Eigen::VectorXd v = Eigen::VectorXd::Zero(q);
    if (m > 0) v += matrix_at(a.Q2, s, 0.0) * z.x;
    if (n > 0) {
      v += matrix_at(a.R0, s, 0.0) * z.y.col(i);
      // Left piece [a, s] with R1, right piece [s, b] with R2.
      for (int piece = 0; piece < 2; ++piece) {
        const PolyMatrix& kernel = piece == 0 ? a.R1 : a.R2;
        if (kernel.is_zero()) continue;
        const double lo = piece == 0 ? a.interval.a : s;
        const double hi = piece == 0 ? s : a.interval.b;
        const double len = hi - lo;
        for (int k = 0; k < sub_count; ++k) {
          const double t = lo + len * unit_rule.nodes(k);
          const double w = len * unit_rule.weights(k);
          const Eigen::VectorXd yt =
              z.y * interpolation_row(z.nodes, bary, t).transpose();
          v += w * matrix_at(kernel, s, t) * yt;
        }
      }
    }
    out.y.col(i) = v;
  }
  return out;
}

double inner_product(const FunctionSample& z1, const FunctionSample& z2) {
  if (z1.x.size() != z2.x.size() || z1.y.rows() != z2.y.rows() ||
      z1.y.cols() != z2.y.cols()) {
    throw DimMismatch("inner product of samples with different shapes");
  }
  if (z1.y.cols() > 0 && (z1.nodes - z2.nodes).cwiseAbs().maxCoeff() > 0.0) {
    throw DimMismatch("inner product of samples on different nodes");
  }
  double v = z1.x.dot(z2.x);
  for (Eigen::Index k = 0; k < z1.y.cols(); ++k) {
    v += z1.weights(k) * z1.y.col(k).dot(z2.y.col(k));
  }
  return v;
}

int default_node_count(const OpVar& a) {
  const Degrees mult = a.multiplier_degrees();
  const Degrees kern = a.kernel_degrees();
  const int total = std::max(mult.s, kern.s + kern.theta);
  return std::max(8, total + 2);
}

namespace {

// Flattens (x, y) into [x; y(:, 0); y(:, 1); ...] scaled by sqrt(weights), so
// the Euclidean norm of the result equals the sample norm.
Eigen::VectorXd weighted_vector(const FunctionSample& z) {
  const Eigen::Index m = z.x.size();
  const Eigen::Index n = z.y.rows();
  Eigen::VectorXd v(m + n * z.y.cols());
  v.head(m) = z.x;
  for (Eigen::Index k = 0; k < z.y.cols(); ++k) {
    v.segment(m + k * n, n) = std::sqrt(z.weights(k)) * z.y.col(k);
  }
  return v;
}

FunctionSample from_weighted_vector(const Eigen::VectorXd& v,
                                    const FunctionSample& shape) {
  FunctionSample z = shape;
  const Eigen::Index m = z.x.size();
  const Eigen::Index n = z.y.rows();
  z.x = v.head(m);
  for (Eigen::Index k = 0; k < z.y.cols(); ++k) {
    z.y.col(k) = v.segment(m + k * n, n) / std::sqrt(z.weights(k));
  }
  return z;
}

}  // namespace

NormEstimate estimate_norm(const OpVar& a, int trials, int node_count,
                           std::uint64_t seed) {
  NormEstimate est;
  const FunctionSample shape =
      make_sample(a.interval, a.dims.m, a.dims.n, node_count);
  const Eigen::Index dim_in = a.dims.m + a.dims.n * node_count;
  if (dim_in == 0) return est;

  // Discretized operator in weighted coordinates: G = D_out K D_in^{-1}.
  Eigen::MatrixXd G(a.dims.p + a.dims.q * node_count, dim_in);
  for (Eigen::Index j = 0; j < dim_in; ++j) {
    Eigen::VectorXd e = Eigen::VectorXd::Unit(dim_in, j);
    G.col(j) = weighted_vector(op_apply(a, from_weighted_vector(e, shape)));
  }
  if (G.rows() == 0) return est;

  Eigen::VectorXd best;
  for (int t = 0; t < trials; ++t) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed),
                      static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(t)};
    std::mt19937_64 rng(seq);
    std::uniform_int_distribution<int> degree_dist(0, node_count - 1);
    const int degree = degree_dist(rng);
    FunctionSample z = random_sample(rng, a.interval, a.dims.m, a.dims.n,
                                     degree, node_count);
    const Eigen::VectorXd v = weighted_vector(z);
    const double vn = v.norm();
    if (vn == 0.0) continue;
    const double ratio = (G * v).norm() / vn;
    if (ratio > est.best_trial || best.size() == 0) {
      est.best_trial = std::max(est.best_trial, ratio);
      best = v / vn;
    }
  }
  est.value = est.best_trial;
  if (best.size() == 0) best = Eigen::VectorXd::Ones(dim_in).normalized();

  // Power iteration on G'G from the best trial.
  const Eigen::MatrixXd gram = G.transpose() * G;
  Eigen::VectorXd v = best;
  double previous = 0.0;
  for (int it = 0; it < 2000; ++it) {
    Eigen::VectorXd w = gram * v;
    const double wn = w.norm();
    ++est.power_iterations;
    if (wn == 0.0) break;
    v = w / wn;
    const double sigma = (G * v).norm();
    est.value = std::max(est.value, sigma);
    if (std::abs(sigma - previous) <= 1e-15 * std::max(1.0, sigma)) break;
    previous = sigma;
  }
  return est;
}

}  // namespace pisos
