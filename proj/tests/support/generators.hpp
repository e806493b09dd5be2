#pragma once

// Random operators and samples shared by the unit and acceptance suites.

#include <algorithm>
#include <random>

#include "pisos/numeric.hpp"
#include "pisos/opvar.hpp"
#include "pisos/poly.hpp"

namespace pisos::testing {

inline double uniform(std::mt19937_64& rng, double lo = -1.0, double hi = 1.0) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline int uniform_int(std::mt19937_64& rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

// Dense random polynomial with s-degree <= ds and theta-degree <= dt.
inline Poly2 random_poly(std::mt19937_64& rng, int ds, int dt) {
  Poly2 p;
  for (int i = 0; i <= ds; ++i) {
    for (int j = 0; j <= dt; ++j) p.add_term(i, j, uniform(rng));
  }
  return p.normalize();
}

inline PolyMatrix random_block(std::mt19937_64& rng, int rows, int cols,
                               int ds, int dt) {
  PolyMatrix m(rows, cols);
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) m(i, j) = random_poly(rng, ds, dt);
  }
  return m;
}

inline OpVar random_opvar(std::mt19937_64& rng, OpDims dims,
                          Interval interval, int degree) {
  OpVar a = op_new(dims, interval);
  a.P = random_block(rng, dims.p, dims.m, 0, 0);
  a.Q1 = random_block(rng, dims.p, dims.n, degree, 0);
  a.Q2 = random_block(rng, dims.q, dims.m, degree, 0);
  a.R0 = random_block(rng, dims.q, dims.n, degree, 0);
  a.R1 = random_block(rng, dims.q, dims.n, degree, degree);
  a.R2 = random_block(rng, dims.q, dims.n, degree, degree);
  return a;
}

inline OpDims random_dims(std::mt19937_64& rng, int max_dim) {
  return {uniform_int(rng, 0, max_dim), uniform_int(rng, 0, max_dim),
          uniform_int(rng, 0, max_dim), uniform_int(rng, 0, max_dim)};
}

inline Interval random_interval(std::mt19937_64& rng) {
  return uniform_int(rng, 0, 1) == 0 ? Interval(0.0, 1.0) : Interval(-1.0, 0.0);
}

// Relative discrepancy used by the sample comparisons.
inline double sample_distance(const FunctionSample& a,
                              const FunctionSample& b) {
  double scale = 1.0;
  if (a.x.size() > 0) scale = std::max(scale, a.x.cwiseAbs().maxCoeff());
  if (a.y.size() > 0) scale = std::max(scale, a.y.cwiseAbs().maxCoeff());
  double diff = 0.0;
  if (a.x.size() > 0) diff = std::max(diff, (a.x - b.x).cwiseAbs().maxCoeff());
  if (a.y.size() > 0) diff = std::max(diff, (a.y - b.y).cwiseAbs().maxCoeff());
  return diff / scale;
}

}  // namespace pisos::testing
