#include "pisos/sdp.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>
#include <map>
#include <sstream>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include "pisos/errors.hpp"

namespace pisos {

const char* to_string(SdpStatus status) {
  switch (status) {
    case SdpStatus::Optimal: return "Optimal";
    case SdpStatus::Infeasible: return "Infeasible";
    case SdpStatus::Unbounded: return "Unbounded";
    case SdpStatus::MaxIter: return "MaxIter";
  }
  return "?";
}

int SdpProblem::block_dim(int block) const {
  return std::abs(block_sizes.at(block));
}

void SdpProblem::validate() const {
  auto check = [this](const SymEntry& e, const char* where) {
    if (e.block < 0 || e.block >= static_cast<int>(block_sizes.size())) {
      throw AssemblyError(std::string(where) + ": block index out of range");
    }
    const int dim = block_dim(e.block);
    if (e.row < 0 || e.col < 0 || e.row >= dim || e.col >= dim) {
      throw AssemblyError(std::string(where) + ": entry index out of range");
    }
    if (e.row > e.col) {
      throw AssemblyError(std::string(where) +
                          ": entries must be in the upper triangle");
    }
    if (is_diagonal(e.block) && e.row != e.col) {
      throw AssemblyError(std::string(where) +
                          ": off-diagonal entry in a diagonal block");
    }
    if (!std::isfinite(e.value)) {
      throw AssemblyError(std::string(where) + ": non-finite entry");
    }
  };
  for (int size : block_sizes) {
    if (size == 0) throw AssemblyError("zero-sized block");
  }
  for (const auto& e : objective) check(e, "objective");
  for (const auto& c : constraints) {
    for (const auto& e : c.entries) check(e, "constraint");
    if (!std::isfinite(c.rhs)) throw AssemblyError("non-finite right-hand side");
  }
}

BlockMatrix zero_blocks(const SdpProblem& problem) {
  BlockMatrix x;
  for (std::size_t b = 0; b < problem.block_sizes.size(); ++b) {
    const int d = problem.block_dim(static_cast<int>(b));
    x.push_back(Eigen::MatrixXd::Zero(d, d));
  }
  return x;
}

double trace_product(const SdpProblem& /*problem*/,
                     const std::vector<SymEntry>& entries,
                     const BlockMatrix& x) {
  double v = 0.0;
  for (const auto& e : entries) {
    const auto& blk = x[e.block];
    v += e.row == e.col ? e.value * blk(e.row, e.row)
                        : e.value * (blk(e.row, e.col) + blk(e.col, e.row));
  }
  return v;
}

void compute_residuals(const SdpProblem& problem, SdpSolution& sol) {
  double primal = 0.0;
  for (std::size_t i = 0; i < problem.constraints.size(); ++i) {
    const auto& c = problem.constraints[i];
    const double r = trace_product(problem, c.entries, sol.X) - c.rhs;
    primal = std::max(primal, std::abs(r) / (1.0 + std::abs(c.rhs)));
  }
  BlockMatrix r = sol.S;
  double c_norm_sq = 0.0;
  for (const auto& e : problem.objective) {
    r[e.block](e.row, e.col) -= e.value;
    if (e.row != e.col) r[e.block](e.col, e.row) -= e.value;
    c_norm_sq += (e.row == e.col ? 1.0 : 2.0) * e.value * e.value;
  }
  for (std::size_t i = 0; i < problem.constraints.size(); ++i) {
    const double yi = sol.y.size() > 0 ? sol.y(i) : 0.0;
    if (yi == 0.0) continue;
    for (const auto& e : problem.constraints[i].entries) {
      r[e.block](e.row, e.col) += yi * e.value;
      if (e.row != e.col) r[e.block](e.col, e.row) += yi * e.value;
    }
  }
  double dual_sq = 0.0;
  for (const auto& blk : r) dual_sq += blk.squaredNorm();
  sol.primal_objective = trace_product(problem, problem.objective, sol.X);
  double by = 0.0;
  for (std::size_t i = 0; i < problem.constraints.size(); ++i) {
    by += problem.constraints[i].rhs * (sol.y.size() > 0 ? sol.y(i) : 0.0);
  }
  sol.dual_objective = by;
  sol.primal_infeasibility = primal;
  sol.dual_infeasibility = std::sqrt(dual_sq) / (1.0 + std::sqrt(c_norm_sq));
  sol.duality_gap = std::abs(sol.primal_objective - sol.dual_objective) /
                    (1.0 + std::abs(sol.primal_objective) +
                     std::abs(sol.dual_objective));
}

namespace {

struct Triplet {
  int r;
  int c;
  double v;
};

struct BlockTerm {
  int block;
  std::vector<Triplet> entries;
};

struct Row {
  std::vector<BlockTerm> terms;
  double rhs = 0.0;
};

// Working iterates: dense blocks are n x n, diagonal blocks n x 1.
using Blocks = std::vector<Eigen::MatrixXd>;

struct Layout {
  std::vector<int> dim;
  std::vector<bool> diag;
  int nu = 0;

  std::size_t size() const { return dim.size(); }
};

Blocks identity(const Layout& L) {
  Blocks x;
  for (std::size_t b = 0; b < L.size(); ++b) {
    x.push_back(L.diag[b] ? Eigen::MatrixXd(Eigen::VectorXd::Ones(L.dim[b]))
                          : Eigen::MatrixXd::Identity(L.dim[b], L.dim[b]));
  }
  return x;
}

Blocks zeros(const Layout& L) {
  Blocks x;
  for (std::size_t b = 0; b < L.size(); ++b) {
    x.push_back(L.diag[b] ? Eigen::MatrixXd::Zero(L.dim[b], 1)
                          : Eigen::MatrixXd::Zero(L.dim[b], L.dim[b]));
  }
  return x;
}

double dot(const Blocks& a, const Blocks& b) {
  double v = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) v += a[k].cwiseProduct(b[k]).sum();
  return v;
}

void axpy(Blocks& y, double alpha, const Blocks& x) {
  for (std::size_t k = 0; k < y.size(); ++k) y[k] += alpha * x[k];
}

double row_dot(const Row& row, const Blocks& x, const Layout& L) {
  double v = 0.0;
  for (const auto& t : row.terms) {
    const auto& blk = x[t.block];
    if (L.diag[t.block]) {
      for (const auto& e : t.entries) v += e.v * blk(e.r, 0);
    } else {
      for (const auto& e : t.entries) {
        v += e.r == e.c ? e.v * blk(e.r, e.r)
                        : e.v * (blk(e.r, e.c) + blk(e.c, e.r));
      }
    }
  }
  return v;
}

void add_row(Blocks& out, const Row& row, double scale, const Layout& L) {
  if (scale == 0.0) return;
  for (const auto& t : row.terms) {
    auto& blk = out[t.block];
    if (L.diag[t.block]) {
      for (const auto& e : t.entries) blk(e.r, 0) += scale * e.v;
    } else {
      for (const auto& e : t.entries) {
        blk(e.r, e.c) += scale * e.v;
        if (e.r != e.c) blk(e.c, e.r) += scale * e.v;
      }
    }
  }
}

Eigen::VectorXd apply_A(const std::vector<Row>& rows, const Blocks& x,
                        const Layout& L) {
  Eigen::VectorXd v(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) v(i) = row_dot(rows[i], x, L);
  return v;
}

Blocks apply_At(const std::vector<Row>& rows, const Eigen::VectorXd& y,
                const Layout& L) {
  Blocks out = zeros(L);
  for (std::size_t i = 0; i < rows.size(); ++i) add_row(out, rows[i], y(i), L);
  return out;
}

Eigen::MatrixXd sym(const Eigen::MatrixXd& m) {
  return 0.5 * (m + m.transpose());
}

// sym(X W S^{-1}) blockwise; for diagonal blocks x .* w ./ s.
Blocks hkm_product(const Blocks& X, const Blocks& W, const Blocks& Sinv,
                   const Layout& L) {
  Blocks out(L.size());
  for (std::size_t b = 0; b < L.size(); ++b) {
    if (L.diag[b]) {
      out[b] = X[b].cwiseProduct(W[b]).cwiseProduct(Sinv[b]);
    } else {
      out[b] = sym(X[b] * W[b] * Sinv[b]);
    }
  }
  return out;
}

// Largest alpha with M + alpha * D PSD (infinity if unrestricted).
double max_step(const Eigen::MatrixXd& M, const Eigen::MatrixXd& D,
                bool diagonal) {
  double alpha = std::numeric_limits<double>::infinity();
  if (diagonal) {
    for (Eigen::Index i = 0; i < M.rows(); ++i) {
      if (D(i, 0) < 0.0) alpha = std::min(alpha, -M(i, 0) / D(i, 0));
    }
    return alpha;
  }
  Eigen::LLT<Eigen::MatrixXd> llt(M);
  if (llt.info() != Eigen::Success) return 0.0;
  Eigen::MatrixXd Linv_D =
      llt.matrixL().solve(D);  // L^{-1} D
  Eigen::MatrixXd T = llt.matrixL().solve(Linv_D.transpose());  // L^{-1} D' L^{-T}
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym(T),
                                                    Eigen::EigenvaluesOnly);
  const double lmin = es.eigenvalues().minCoeff();
  if (lmin < 0.0) alpha = -1.0 / lmin;
  return alpha;
}

struct Reduced {
  std::vector<Row> rows;
  std::vector<int> original_index;  // row k came from constraint original_index[k]
  std::vector<double> row_scale;    // normalized row = original / row_scale
  bool inconsistent = false;
};

std::vector<Row> build_rows(const SdpProblem& problem) {
  std::vector<Row> rows;
  rows.reserve(problem.constraints.size());
  for (const auto& c : problem.constraints) {
    std::map<int, std::map<std::pair<int, int>, double>> grouped;
    for (const auto& e : c.entries) grouped[e.block][{e.row, e.col}] += e.value;
    Row row;
    row.rhs = c.rhs;
    for (const auto& [block, entries] : grouped) {
      BlockTerm t{block, {}};
      for (const auto& [rc, v] : entries) {
        if (v != 0.0) t.entries.push_back({rc.first, rc.second, v});
      }
      if (!t.entries.empty()) row.terms.push_back(std::move(t));
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

// Normalizes rows, removes linearly dependent ones and checks that removed
// rows are consistent with the kept ones.
Reduced reduce_rows(const std::vector<Row>& rows, const Layout& L) {
  std::vector<int> offset(L.size());
  int nvec = 0;
  for (std::size_t b = 0; b < L.size(); ++b) {
    offset[b] = nvec;
    nvec += L.diag[b] ? L.dim[b] : L.dim[b] * (L.dim[b] + 1) / 2;
  }
  auto svec_index = [&](int block, int r, int c) {
    if (L.diag[block]) return offset[block] + r;
    // Column-wise upper triangle: (r, c) with r <= c.
    return offset[block] + c * (c + 1) / 2 + r;
  };

  Reduced out;
  const int m = static_cast<int>(rows.size());
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(m, nvec);
  Eigen::VectorXd b(m);
  for (int i = 0; i < m; ++i) {
    for (const auto& t : rows[i].terms) {
      for (const auto& e : t.entries) {
        const double w = (L.diag[t.block] || e.r == e.c) ? 1.0 : std::sqrt(2.0);
        A(i, svec_index(t.block, e.r, e.c)) += w * e.v;
      }
    }
    b(i) = rows[i].rhs;
  }

  std::vector<int> nonzero;
  Eigen::VectorXd norms(m);
  for (int i = 0; i < m; ++i) {
    norms(i) = A.row(i).norm();
    if (norms(i) > 0.0) {
      nonzero.push_back(i);
    } else if (std::abs(b(i)) > 1e-12) {
      out.inconsistent = true;
    }
  }
  if (out.inconsistent || nonzero.empty()) return out;

  const int k = static_cast<int>(nonzero.size());
  Eigen::MatrixXd An(k, nvec);
  Eigen::VectorXd bn(k);
  for (int r = 0; r < k; ++r) {
    An.row(r) = A.row(nonzero[r]) / norms(nonzero[r]);
    bn(r) = b(nonzero[r]) / norms(nonzero[r]);
  }

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(An.transpose());
  qr.setThreshold(1e-10);
  const int rank = static_cast<int>(qr.rank());
  std::vector<int> keep;
  std::vector<bool> kept(k, false);
  for (int r = 0; r < rank; ++r) {
    const int idx = qr.colsPermutation().indices()(r);
    keep.push_back(idx);
    kept[idx] = true;
  }
  std::sort(keep.begin(), keep.end());

  if (rank < k) {
    // Minimum-norm solution of the kept rows, then test the dropped ones.
    Eigen::MatrixXd Ak(rank, nvec);
    Eigen::VectorXd bk(rank);
    for (int r = 0; r < rank; ++r) {
      Ak.row(r) = An.row(keep[r]);
      bk(r) = bn(keep[r]);
    }
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(Ak);
    const Eigen::VectorXd x0 = cod.solve(bk);
    const double scale = 1.0 + x0.norm();
    for (int r = 0; r < k; ++r) {
      if (kept[r]) continue;
      const double resid = std::abs(An.row(r).dot(x0) - bn(r));
      if (resid > 1e-7 * scale * (1.0 + std::abs(bn(r)))) {
        out.inconsistent = true;
        return out;
      }
    }
  }

  for (int idx : keep) {
    const int orig = nonzero[idx];
    Row row = rows[orig];
    const double s = norms(orig);
    for (auto& t : row.terms) {
      for (auto& e : t.entries) e.v /= s;
    }
    row.rhs /= s;
    out.rows.push_back(std::move(row));
    out.original_index.push_back(orig);
    out.row_scale.push_back(s);
  }
  return out;
}

Eigen::MatrixXd to_dense_block(const Eigen::MatrixXd& blk, bool diag) {
  if (!diag) return blk;
  return blk.col(0).asDiagonal();
}

}  // namespace

SdpSolution solve_sdp(const SdpProblem& problem, const SdpOptions& options) {
  problem.validate();
  SdpSolution sol;
  const int m_orig = static_cast<int>(problem.constraints.size());
  sol.X = zero_blocks(problem);
  sol.S = zero_blocks(problem);
  sol.y = Eigen::VectorXd::Zero(m_orig);

  Layout L;
  for (std::size_t b = 0; b < problem.block_sizes.size(); ++b) {
    L.dim.push_back(problem.block_dim(static_cast<int>(b)));
    L.diag.push_back(problem.is_diagonal(static_cast<int>(b)));
    L.nu += L.dim.back();
  }

  Reduced red = reduce_rows(build_rows(problem), L);
  if (red.inconsistent) {
    sol.status = SdpStatus::Infeasible;
    compute_residuals(problem, sol);
    return sol;
  }
  if (L.size() == 0) {
    sol.status = SdpStatus::Optimal;
    compute_residuals(problem, sol);
    return sol;
  }

  const std::vector<Row>& rows = red.rows;

  const int m = static_cast<int>(rows.size());

  Blocks C = zeros(L);
  for (const auto& e : problem.objective) {
    if (L.diag[e.block]) {
      C[e.block](e.row, 0) += e.value;
    } else {
      C[e.block](e.row, e.col) += e.value;
      if (e.row != e.col) C[e.block](e.col, e.row) += e.value;
    }
  }
  Eigen::VectorXd b(m);
  for (int i = 0; i < m; ++i) b(i) = rows[i].rhs;

  // Scale data so that b and C are O(1).
  const double b_scale = std::max(1.0, m > 0 ? b.cwiseAbs().maxCoeff() : 0.0);
  double c_max = 0.0;
  for (const auto& blk : C) {
    if (blk.size() > 0) c_max = std::max(c_max, blk.cwiseAbs().maxCoeff());
  }
  const double c_scale = std::max(1.0, c_max);
  b /= b_scale;
  for (auto& blk : C) blk /= c_scale;

  Blocks X = identity(L);
  Blocks S = identity(L);
  Eigen::VectorXd y = Eigen::VectorXd::Zero(m);
  double tau = 1.0;
  double kappa = 1.0;

  const double b_norm = b.norm();
  const double c_norm = std::sqrt(dot(C, C));
  SdpStatus status = SdpStatus::MaxIter;
  // Best iterate seen, for runs that stall short of the target tolerance.
  struct Snapshot {
    Blocks X, S;
    Eigen::VectorXd y;
    double tau = 1.0, kappa = 1.0;
    double merit = std::numeric_limits<double>::infinity();
  } best;
  int stalled = 0;
  int iter = 0;

  for (; iter <= options.max_iterations; ++iter) {
    const Eigen::VectorXd AX = apply_A(rows, X, L);
    const Blocks AtY = apply_At(rows, y, L);
    const double cx = dot(C, X);
    const double by = b.dot(y);

    // Convergence and infeasibility tests on the normalized iterate.
    {
      const double pinf = (AX / tau - b).norm() / (1.0 + b_norm);
      double dres = 0.0;
      for (std::size_t k = 0; k < L.size(); ++k) {
        dres += ((AtY[k] + S[k]) / tau - C[k]).squaredNorm();
      }
      const double dinf = std::sqrt(dres) / (1.0 + c_norm);
      const double pobj = cx / tau;
      const double dobj = by / tau;
      const double gap =
          std::abs(pobj - dobj) / (1.0 + std::abs(pobj) + std::abs(dobj));
      if (options.verbose) {
        std::cerr << "iter " << iter << " pinf " << pinf << " dinf " << dinf
                  << " gap " << gap << " pobj " << pobj << " tau " << tau
                  << " kappa " << kappa << "\n";
      }
      const double merit = std::max({pinf, dinf, gap});
      if (merit <= options.tolerance) {
        status = SdpStatus::Optimal;
        break;
      }
      if (merit < best.merit) best = {X, S, y, tau, kappa, merit};
      // Certificates: A'y + S = 0 with b'y > 0, or A(X) = 0 with tr(CX) < 0.
      double cert_dual = 0.0;
      for (std::size_t k = 0; k < L.size(); ++k) {
        cert_dual += (AtY[k] + S[k]).squaredNorm();
      }
      cert_dual = std::sqrt(cert_dual);
      const double cert_primal = AX.norm();
      const bool ratio_small = tau <= options.infeasibility_ratio * kappa;
      if (by > 0.0 &&
          (ratio_small || cert_dual <= options.tolerance * by) &&
          by >= -cx) {
        status = SdpStatus::Infeasible;
        break;
      }
      if (cx < 0.0 &&
          (ratio_small || cert_primal <= options.tolerance * (-cx))) {
        status = SdpStatus::Unbounded;
        break;
      }
    }
    if (iter == options.max_iterations) break;

    const Eigen::VectorXd rp = AX - b * tau;
    Blocks rd = C;
    for (std::size_t k = 0; k < L.size(); ++k) rd[k] = C[k] * tau - AtY[k] - S[k];
    const double rg = by - cx - kappa;
    const double mu = (dot(X, S) + tau * kappa) / (L.nu + 1);

    Blocks Sinv(L.size());
    for (std::size_t k = 0; k < L.size(); ++k) {
      if (L.diag[k]) {
        Sinv[k] = S[k].cwiseInverse();
      } else {
        Eigen::LLT<Eigen::MatrixXd> llt(S[k]);
        if (llt.info() != Eigen::Success) {
          throw NumericalFailure("dual iterate lost positive definiteness");
        }
        Sinv[k] = llt.solve(Eigen::MatrixXd::Identity(L.dim[k], L.dim[k]));
        Sinv[k] = sym(Sinv[k]);
      }
    }

    // Schur complement M_ij = tr(A_i X A_j S^{-1}).
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(m, m);
    {
      std::vector<std::vector<std::pair<int, const BlockTerm*>>> by_block(L.size());
      for (int i = 0; i < m; ++i) {
        for (const auto& t : rows[i].terms) by_block[t.block].push_back({i, &t});
      }
      for (std::size_t k = 0; k < L.size(); ++k) {
        const auto& list = by_block[k];
        if (list.empty()) continue;
        if (L.diag[k]) {
          const Eigen::VectorXd d = X[k].col(0).cwiseProduct(Sinv[k].col(0));
          // Sparse dot products through a dense scatter vector.
          Eigen::VectorXd scatter = Eigen::VectorXd::Zero(L.dim[k]);
          for (const auto& [j, tj] : list) {
            for (const auto& e : tj->entries) scatter(e.r) = e.v * d(e.r);
            for (const auto& [i, ti] : list) {
              double v = 0.0;
              for (const auto& e : ti->entries) v += e.v * scatter(e.r);
              M(i, j) += v;
            }
            for (const auto& e : tj->entries) scatter(e.r) = 0.0;
          }
          continue;
        }
        const int n = L.dim[k];
        Eigen::MatrixXd T(n, n);
        for (const auto& [j, tj] : list) {
          T.setZero();
          for (const auto& e : tj->entries) {
            T.col(e.c) += e.v * X[k].col(e.r);
            if (e.r != e.c) T.col(e.r) += e.v * X[k].col(e.c);
          }
          const Eigen::MatrixXd W = T * Sinv[k];
          for (const auto& [i, ti] : list) {
            if (i > j) continue;
            double v = 0.0;
            for (const auto& e : ti->entries) {
              v += e.r == e.c ? e.v * W(e.r, e.r)
                              : e.v * (W(e.r, e.c) + W(e.c, e.r));
            }
            M(i, j) += v;
            if (i != j) M(j, i) += v;
          }
        }
      }
    }
    M = sym(M);

    Eigen::LLT<Eigen::MatrixXd> schur;
    if (m > 0) {
      schur.compute(M);
      if (schur.info() != Eigen::Success) {
        const double reg = 1e-12 * std::max(1.0, M.diagonal().cwiseAbs().maxCoeff());
        M.diagonal().array() += reg;
        schur.compute(M);
        if (schur.info() != Eigen::Success) {
          throw NumericalFailure(
              "Schur complement is not positive definite after "
              "regularization");
        }
      }
    }
    auto schur_solve = [&](const Eigen::VectorXd& r) -> Eigen::VectorXd {
      if (m == 0) return Eigen::VectorXd(0);
      // Two steps of iterative refinement; M is badly conditioned near the
      // optimum of degenerate problems.
      Eigen::VectorXd x = schur.solve(r);
      for (int k = 0; k < 2; ++k) x += schur.solve(r - M * x);
      return x;
    };

    const Blocks G = hkm_product(X, C, Sinv, L);  // sym(X C S^{-1})
    const Eigen::VectorXd u = apply_A(rows, G, L);
    const double w = dot(C, G);
    const Blocks Zrd = hkm_product(X, rd, Sinv, L);
    const Eigen::VectorXd AZrd = apply_A(rows, Zrd, L);
    const double CZrd = dot(C, Zrd);
    const Eigen::VectorXd q = schur_solve(u + b);
    const double denom = (b - u).dot(q) + w + kappa / tau;

    struct Direction {
      Blocks dX;
      Eigen::VectorXd dy;
      Blocks dS;
      double dtau = 0.0;
      double dkappa = 0.0;
    };

    auto solve_direction = [&](const Blocks& Rc, double r_tk) {
      Direction d;
      const Eigen::VectorXd r1 = -rp - apply_A(rows, Rc, L) + AZrd;
      const double r2 = -rg + dot(C, Rc) - CZrd + r_tk / tau;
      const Eigen::VectorXd p = schur_solve(r1);
      d.dtau = (r2 - (b - u).dot(p)) / denom;
      d.dy = p + q * d.dtau;
      d.dS = apply_At(rows, -d.dy, L);
      for (std::size_t k = 0; k < L.size(); ++k) {
        d.dS[k] += C[k] * d.dtau + rd[k];
      }
      const Blocks corr = hkm_product(X, d.dS, Sinv, L);
      d.dX = Rc;
      axpy(d.dX, -1.0, corr);
      d.dkappa = (r_tk - kappa * d.dtau) / tau;
      return d;
    };

    auto step_to_boundary = [&](const Direction& d) {
      double alpha = std::numeric_limits<double>::infinity();
      for (std::size_t k = 0; k < L.size(); ++k) {
        alpha = std::min(alpha, max_step(X[k], d.dX[k], L.diag[k]));
        alpha = std::min(alpha, max_step(S[k], d.dS[k], L.diag[k]));
      }
      if (d.dtau < 0.0) alpha = std::min(alpha, -tau / d.dtau);
      if (d.dkappa < 0.0) alpha = std::min(alpha, -kappa / d.dkappa);
      return alpha;
    };

    // Predictor.
    Blocks Rc_aff(L.size());
    for (std::size_t k = 0; k < L.size(); ++k) Rc_aff[k] = -X[k];
    const Direction aff = solve_direction(Rc_aff, -tau * kappa);
    const double alpha_aff = std::min(1.0, step_to_boundary(aff));
    Blocks Xa = X;
    Blocks Sa = S;
    axpy(Xa, alpha_aff, aff.dX);
    axpy(Sa, alpha_aff, aff.dS);
    const double mu_aff =
        (dot(Xa, Sa) + (tau + alpha_aff * aff.dtau) * (kappa + alpha_aff * aff.dkappa)) /
        (L.nu + 1);
    const double sigma = std::clamp(std::pow(mu_aff / mu, 3.0), 0.0, 1.0);

    // Corrector.
    Blocks Rc(L.size());
    for (std::size_t k = 0; k < L.size(); ++k) {
      if (L.diag[k]) {
        Rc[k] = sigma * mu * Sinv[k] - X[k] -
                aff.dX[k].cwiseProduct(aff.dS[k]).cwiseProduct(Sinv[k]);
      } else {
        Rc[k] = sigma * mu * Sinv[k] - X[k] - sym(aff.dX[k] * aff.dS[k] * Sinv[k]);
      }
    }
    const Direction dir =
        solve_direction(Rc, sigma * mu - tau * kappa - aff.dtau * aff.dkappa);
    const double alpha =
        std::min(1.0, options.step_fraction * step_to_boundary(dir));

    axpy(X, alpha, dir.dX);
    axpy(S, alpha, dir.dS);
    for (std::size_t k = 0; k < L.size(); ++k) {
      if (!L.diag[k]) {
        X[k] = sym(X[k]);
        S[k] = sym(S[k]);
      }
    }
    y += alpha * dir.dy;
    tau += alpha * dir.dtau;
    kappa += alpha * dir.dkappa;

    stalled = alpha < 1e-9 ? stalled + 1 : 0;
    if (stalled >= 5) break;
  }

  if (status == SdpStatus::MaxIter && best.merit < std::numeric_limits<double>::infinity()) {
    X = best.X;
    S = best.S;
    y = best.y;
    tau = best.tau;
    kappa = best.kappa;
    if (best.merit <= options.acceptable_tolerance) status = SdpStatus::Optimal;
  }
  sol.status = status;
  sol.iterations = iter;
  // Certificates are reported unnormalized; solutions are divided by tau.
  const double inv_tau =
      (status == SdpStatus::Infeasible || status == SdpStatus::Unbounded)
          ? 1.0
          : 1.0 / tau;
  for (std::size_t k = 0; k < L.size(); ++k) {
    sol.X[k] = to_dense_block(X[k], L.diag[k]) * (inv_tau * b_scale);
    sol.S[k] = to_dense_block(S[k], L.diag[k]) * (inv_tau * c_scale);
  }
  for (int i = 0; i < m; ++i) {
    sol.y(red.original_index[i]) = y(i) * inv_tau * c_scale / red.row_scale[i];
  }
  compute_residuals(problem, sol);
  return sol;
}

}  // namespace pisos
