#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace pisos {

// One stored entry of a symmetric block-diagonal matrix: value at
// (row, col) and (col, row) of `block`. Indices are 0-based, row <= col.
struct SymEntry {
  int block = 0;
  int row = 0;
  int col = 0;
  double value = 0.0;
};

// tr(A X) = rhs.
struct SdpConstraint {
  std::vector<SymEntry> entries;
  double rhs = 0.0;
};

// Standard-form primal SDP
//
//   minimize tr(C X)  subject to  tr(A_i X) = b_i,  X block-diagonal PSD,
//
// with dual  maximize b'y  subject to  sum_i y_i A_i + S = C,  S PSD.
// A negative block size marks a diagonal (nonnegative orthant) block.
struct SdpProblem {
  std::vector<int> block_sizes;
  std::vector<SymEntry> objective;
  std::vector<SdpConstraint> constraints;

  // Throws AssemblyError on out-of-range indices, lower-triangle entries,
  // off-diagonal entries in diagonal blocks, or zero-sized blocks.
  void validate() const;
  int block_dim(int block) const;
  bool is_diagonal(int block) const { return block_sizes[block] < 0; }
};

enum class SdpStatus { Optimal, Infeasible, Unbounded, MaxIter };

const char* to_string(SdpStatus status);

// Block matrices in the problem's layout. Diagonal blocks are stored as
// dense matrices too (off-diagonal entries zero).
using BlockMatrix = std::vector<Eigen::MatrixXd>;

struct SdpSolution {
  SdpStatus status = SdpStatus::MaxIter;
  BlockMatrix X;
  Eigen::VectorXd y;
  BlockMatrix S;
  double primal_objective = 0.0;
  double dual_objective = 0.0;
  double primal_infeasibility = 0.0;
  double dual_infeasibility = 0.0;
  double duality_gap = 0.0;
  int iterations = 0;
};

struct SdpOptions {
  double tolerance = 1e-8;
  int max_iterations = 200;
  // tau/kappa below this declares infeasibility.
  double infeasibility_ratio = 1e-8;
  double step_fraction = 0.95;
  bool verbose = false;
  // A run that stalls is still reported Optimal if its best iterate meets
  // this looser tolerance.
  double acceptable_tolerance = 1e-7;
};

// Primal-dual path following on the homogeneous self-dual embedding with
// the HKM search direction and Mehrotra predictor-corrector steps. Linearly
// dependent constraints are removed up front; an inconsistent dependent
// constraint is reported as Infeasible. Throws NumericalFailure if the
// Schur complement stays indefinite after regularization.
SdpSolution solve_sdp(const SdpProblem& problem, const SdpOptions& options = {});

// Residuals of a candidate (X, y, S) on the original data:
// primal = max_i |tr(A_i X) - b_i| / (1 + |b_i|),
// dual = ||sum y_i A_i + S - C||_F / (1 + ||C||_F),
// gap = |tr(CX) - b'y| / (1 + |tr(CX)| + |b'y|).
void compute_residuals(const SdpProblem& problem, SdpSolution& solution);

BlockMatrix zero_blocks(const SdpProblem& problem);
double trace_product(const SdpProblem& problem,
                     const std::vector<SymEntry>& entries,
                     const BlockMatrix& x);

// SDPA sparse format (.dat-s). The problem is written in SDPA's dual form:
// F_i = A_i, c = b, and F_0 = -C so that SDPA's "maximize tr(F_0 Y)"
// minimizes tr(C X).
std::string export_sdpa(const SdpProblem& problem);
// Inverse of export_sdpa. Comment lines starting with '"' or '*' are
// skipped. Throws ParseError with a line number on malformed input.
SdpProblem import_sdpa(const std::string& text);

// SDPA result file (.out): reads objValPrimal/objValDual, xVec, xMat and
// yMat and maps them back (y = -xVec, S = xMat, X = yMat).
SdpSolution import_sdpa_solution(const std::string& text,
                                 const SdpProblem& problem);
// Writes a solution in the same layout, e.g. for feeding results computed
// by the internal solver to tools that expect SDPA output.
std::string export_sdpa_solution(const SdpSolution& solution,
                                 const SdpProblem& problem);

}  // namespace pisos
