#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "pisos/opvar.hpp"
#include "pisos/poly.hpp"
#include "pisos/sdp.hpp"

namespace pisos {

// d1: degree in s of P/Q1/Q2/R0 for indefinite operators.
// d2, d3: degrees in s and theta of the monomial basis behind positive
// operators (and of R1/R2 for indefinite ones).
struct DegreeSpec {
  int d1 = 2;
  int d2 = 2;
  int d3 = 2;

  bool operator==(const DegreeSpec&) const = default;
};

std::ostream& operator<<(std::ostream& os, const DegreeSpec& d);

struct SolveReport {
  SdpStatus status = SdpStatus::MaxIter;
  double objective = 0.0;
  double primal_infeasibility = 0.0;
  double dual_infeasibility = 0.0;
  double duality_gap = 0.0;
  int iterations = 0;
  int sdp_blocks = 0;
  int sdp_constraints = 0;
  std::vector<std::string> warnings;

  bool feasible() const { return status == SdpStatus::Optimal; }
  // "key: value" lines, one per field.
  std::string to_text() const;
};

// Where a decision variable lives in the assembled SDP.
struct VarSlot {
  enum class Kind { Free, PsdEntry } kind = Kind::Free;
  int block = 0;  // for Free: index of the positive part in the free block
  int row = 0;
  int col = 0;
};

struct AssembledProgram {
  SdpProblem sdp;
  std::map<DecisionVarId, VarSlot> slots;
  double objective_constant = 0.0;
};

enum class ProgramState { Building, Solved };

// Accumulates decision variables, linear equalities and a linear objective,
// then solves the resulting SDP. All declarations and constraints must
// happen before solve; afterwards the program only answers queries.
class Program {
 public:
  explicit Program(Interval interval = {});

  const Interval& interval() const { return interval_; }
  ProgramState state() const { return state_; }
  std::uint32_t serial() const { return serial_; }
  std::size_t variable_count() const { return vars_.size(); }
  std::size_t equality_count() const { return equalities_.size(); }
  const std::vector<std::string>& warnings() const { return warnings_; }

  DecisionVarId declare_scalar(const std::string& name = "");
  // Symmetric size x size PSD matrix; entry (r, c) and (c, r) share an id.
  std::vector<std::vector<DecisionVarId>> declare_psd(int size);

  // Free operator: constant P, Q1/Q2/R0 with monomials s^i (i <= d1),
  // R1/R2 with monomials s^i theta^j (i <= d2, j <= d3).
  OpVar declare_opvar(OpDims dims, DegreeSpec deg);

  // Z* (g M) Z summed over g = 1 and, when requested, g = (s-a)(b-s); every
  // M is a fresh PSD matrix. With include_multiplier off the pointwise
  // rows (Z1 y) are omitted from Z, giving an operator with R0 = 0.
  OpVar declare_posopvar(int m, int n, DegreeSpec deg,
                         bool include_boundary_weight = true,
                         bool include_multiplier = true);

  // Coefficient matching: every coefficient of every block entry = 0.
  void constrain_zero(const OpVar& a);
  void constrain_zero(const Coefficient& form);
  // a >= 0 via a positive slack of sufficient degree.
  void constrain_positive(const OpVar& a, DegreeSpec deg,
                          bool include_boundary_weight = true);
  // Scalar form >= 0 via a 1x1 PSD slack.
  void constrain_nonnegative(const Coefficient& form);

  // Minimized by solve. Without an objective solve is a feasibility test.
  void set_objective(const Coefficient& objective);

  // Throws AssemblyError if a constraint or the objective references a
  // variable this program did not declare.
  AssembledProgram assemble() const;

  SolveReport solve(const SdpOptions& options = {});
  // Accepts a solution computed elsewhere (e.g. an SDPA result file) for
  // the problem returned by assemble().
  SolveReport load_solution(const AssembledProgram& assembled,
                            const SdpSolution& solution);

  const SolveReport& report() const;
  const Assignment& assignment() const;
  double value(DecisionVarId id) const;
  double value(const Coefficient& form) const;
  // Substitutes solved values. Throws StateError before solve and
  // InfeasibleNoSolution unless the solve ended Optimal.
  OpVar get_solution_opvar(const OpVar& var) const;

 private:
  DecisionVarId fresh(VarSlot::Kind kind);
  void require_building(const char* what) const;
  void require_solution() const;
  SolveReport finish(const AssembledProgram& assembled,
                     const SdpSolution& solution);

  struct VarInfo {
    VarSlot::Kind kind;
    std::string name;
  };

  Interval interval_;
  std::uint32_t serial_;
  ProgramState state_ = ProgramState::Building;
  std::vector<VarInfo> vars_;
  std::vector<std::vector<std::vector<DecisionVarId>>> psd_blocks_;
  std::vector<Coefficient> equalities_;
  Coefficient objective_;
  std::vector<std::string> warnings_;
  SolveReport report_;
  Assignment assignment_;
};

// Monomial lifting used by declare_posopvar: maps R^m x L2^n into
// L2^{m + n K} (see declare_posopvar). Exposed for tests.
OpVar monomial_lifting(int m, int n, DegreeSpec deg, Interval interval,
                       bool include_multiplier = true);

// Slack degrees large enough to represent a positive operator with the
// degrees of `a`; never smaller than `deg`.
DegreeSpec dominating_degrees(const OpVar& a, DegreeSpec deg);

}  // namespace pisos
