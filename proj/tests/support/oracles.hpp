#pragma once

// Finite-dimensional reference computations for the executives.

#include <cmath>
#include <complex>
#include <random>

#include <Eigen/Dense>

#include "pisos/opvar.hpp"

namespace pisos::testing {

inline OpVar matrix_operator(const Eigen::MatrixXd& m) {
  OpVar a = op_new({static_cast<int>(m.rows()), static_cast<int>(m.cols()), 0, 0},
                   Interval());
  for (int r = 0; r < m.rows(); ++r) {
    for (int c = 0; c < m.cols(); ++c) {
      if (m(r, c) != 0.0) a.P(r, c) = Poly2(m(r, c));
    }
  }
  return a;
}

inline double spectral_abscissa(const Eigen::MatrixXd& a) {
  return Eigen::EigenSolver<Eigen::MatrixXd>(a, false).eigenvalues().real().maxCoeff();
}

// Largest singular value of C (iw - A)^{-1} B + D over a log grid of
// w in [1e-4, 1e3] plus w = 0.
inline double frequency_sweep_gain(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                                   const Eigen::MatrixXd& c, const Eigen::MatrixXd& d) {
  using Cd = std::complex<double>;
  const int n = static_cast<int>(a.rows());
  double best = 0.0;
  for (int k = -1; k <= 2000; ++k) {
    const double w = k < 0 ? 0.0 : std::pow(10.0, -4.0 + 7.0 * k / 2000.0);
    const Eigen::MatrixXcd resolvent =
        (Cd(0.0, w) * Eigen::MatrixXcd::Identity(n, n) - a.cast<Cd>());
    const Eigen::MatrixXcd g =
        c.cast<Cd>() * resolvent.partialPivLu().solve(b.cast<Cd>()) + d.cast<Cd>();
    best = std::max(best, Eigen::JacobiSVD<Eigen::MatrixXcd>(g).singularValues()(0));
  }
  return best;
}

// Random n x n matrix shifted so its spectral abscissa equals `abscissa`.
inline Eigen::MatrixXd random_with_abscissa(std::mt19937_64& rng, int n, double abscissa) {
  std::normal_distribution<double> normal;
  Eigen::MatrixXd a(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) a(i, j) = normal(rng);
  }
  const double shift = abscissa - spectral_abscissa(a);
  return a + shift * Eigen::MatrixXd::Identity(n, n);
}

}  // namespace pisos::testing
