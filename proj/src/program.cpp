#include "pisos/program.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <iomanip>
#include <sstream>

#include "pisos/errors.hpp"

namespace pisos {

namespace {

std::atomic<std::uint32_t> next_serial{1};

// Weights below this fraction of a form's largest weight are rounding dust
// from the polynomial algebra.
constexpr double kDustRatio = 1e-13;

Coefficient cleaned(Coefficient c) {
  c.prune(kDustRatio * c.magnitude());
  return c;
}

void add_form(const Coefficient& form, const std::map<DecisionVarId, VarSlot>& slots,
              std::vector<SymEntry>& out) {
  for (const auto& [id, w] : form.linear()) {
    const VarSlot& slot = slots.at(id);
    if (slot.kind == VarSlot::Kind::Free) {
      out.push_back({slot.block, slot.row, slot.row, w});
      out.push_back({slot.block, slot.col, slot.col, -w});
    } else if (slot.row == slot.col) {
      out.push_back({slot.block, slot.row, slot.row, w});
    } else {
      out.push_back({slot.block, slot.row, slot.col, 0.5 * w});
    }
  }
}

int ceil_half(int v) { return (v + 1) / 2; }

}  // namespace

std::ostream& operator<<(std::ostream& os, const DegreeSpec& d) {
  return os << d.d1 << ',' << d.d2 << ',' << d.d3;
}

std::string SolveReport::to_text() const {
  std::ostringstream out;
  out << std::setprecision(10);
  out << "status: " << to_string(status) << '\n';
  out << "objective: " << objective << '\n';
  out << "primal_infeasibility: " << primal_infeasibility << '\n';
  out << "dual_infeasibility: " << dual_infeasibility << '\n';
  out << "duality_gap: " << duality_gap << '\n';
  out << "iterations: " << iterations << '\n';
  out << "sdp_blocks: " << sdp_blocks << '\n';
  out << "sdp_constraints: " << sdp_constraints << '\n';
  for (const auto& w : warnings) out << "warning: " << w << '\n';
  return out.str();
}

Program::Program(Interval interval)
    : interval_(interval), serial_(next_serial.fetch_add(1)) {}

void Program::require_building(const char* what) const {
  if (state_ != ProgramState::Building) {
    throw StateError(std::string(what) +
                     ": program is already solved and cannot be modified");
  }
}

void Program::require_solution() const {
  if (state_ != ProgramState::Solved) {
    throw StateError("program has not been solved");
  }
}

DecisionVarId Program::fresh(VarSlot::Kind kind) {
  const auto id = DecisionVarId::make(serial_, static_cast<std::uint32_t>(vars_.size()));
  vars_.push_back({kind, ""});
  return id;
}

DecisionVarId Program::declare_scalar(const std::string& name) {
  require_building("declare_scalar");
  const DecisionVarId id = fresh(VarSlot::Kind::Free);
  vars_.back().name = name;
  return id;
}

std::vector<std::vector<DecisionVarId>> Program::declare_psd(int size) {
  require_building("declare_psd");
  if (size <= 0) throw DimMismatch("PSD block size must be positive");
  std::vector<std::vector<DecisionVarId>> grid(size, std::vector<DecisionVarId>(size));
  for (int c = 0; c < size; ++c) {
    for (int r = 0; r <= c; ++r) {
      grid[r][c] = grid[c][r] = fresh(VarSlot::Kind::PsdEntry);
    }
  }
  psd_blocks_.push_back(grid);
  return grid;
}

OpVar Program::declare_opvar(OpDims dims, DegreeSpec deg) {
  require_building("declare_opvar");
  if (deg.d1 < 0 || deg.d2 < 0 || deg.d3 < 0) {
    throw DimMismatch("degrees must be nonnegative");
  }
  OpVar a = op_new(dims, interval_);
  auto var = [this] { return Coefficient::variable(fresh(VarSlot::Kind::Free)); };
  auto univariate = [&](PolyMatrix& block) {
    for (int r = 0; r < block.rows(); ++r) {
      for (int c = 0; c < block.cols(); ++c) {
        Poly2 p;
        for (int i = 0; i <= deg.d1; ++i) p.add_term(i, 0, var());
        block(r, c) = p;
      }
    }
  };
  auto bivariate = [&](PolyMatrix& block) {
    for (int r = 0; r < block.rows(); ++r) {
      for (int c = 0; c < block.cols(); ++c) {
        Poly2 p;
        for (int i = 0; i <= deg.d2; ++i) {
          for (int j = 0; j <= deg.d3; ++j) p.add_term(i, j, var());
        }
        block(r, c) = p;
      }
    }
  };
  for (int r = 0; r < a.P.rows(); ++r) {
    for (int c = 0; c < a.P.cols(); ++c) a.P(r, c) = Poly2(var());
  }
  univariate(a.Q1);
  univariate(a.Q2);
  univariate(a.R0);
  bivariate(a.R1);
  bivariate(a.R2);
  return a;
}

OpVar monomial_lifting(int m, int n, DegreeSpec deg, Interval interval,
                       bool include_multiplier) {
  if (m < 0 || n < 0 || deg.d2 < 0 || deg.d3 < 0) {
    throw DimMismatch("monomial lifting needs nonnegative sizes and degrees");
  }
  const int k1 = include_multiplier ? deg.d2 + 1 : 0;
  const int k2 = (deg.d2 + 1) * (deg.d3 + 1);
  const int q = m + n * (k1 + 2 * k2);
  OpVar z = op_new({0, m, q, n}, interval);
  int row = 0;
  for (int i = 0; i < m; ++i) z.Q2(row++, i) = Poly2(1.0);
  for (int i = 0; i < k1; ++i) {
    for (int c = 0; c < n; ++c) z.R0(row++, c) = Poly2::monomial(i, 0, 1.0);
  }
  for (PolyMatrix* block : {&z.R1, &z.R2}) {
    for (int i = 0; i <= deg.d2; ++i) {
      for (int j = 0; j <= deg.d3; ++j) {
        for (int c = 0; c < n; ++c) (*block)(row++, c) = Poly2::monomial(i, j, 1.0);
      }
    }
  }
  return z;
}

OpVar Program::declare_posopvar(int m, int n, DegreeSpec deg,
                                bool include_boundary_weight,
                                bool include_multiplier) {
  require_building("declare_posopvar");
  const OpVar z = monomial_lifting(m, n, deg, interval_, include_multiplier);
  const OpVar zt = op_adjoint(z);
  const int size = z.dims.q;
  OpVar result = op_new({m, m, n, n}, interval_);
  if (size == 0) return result;

  std::vector<Poly2> weights{Poly2(1.0)};
  if (include_boundary_weight) {
    const Poly2 s = Poly2::s();
    weights.push_back((s - interval_.a) * (interval_.b - s));
  }
  for (const Poly2& g : weights) {
    const auto grid = declare_psd(size);
    OpVar mult = op_new({0, 0, size, size}, interval_);
    for (int r = 0; r < size; ++r) {
      for (int c = 0; c < size; ++c) {
        mult.R0(r, c) = scale(g, Coefficient::variable(grid[r][c]));
      }
    }
    result = op_add(result, op_compose(zt, op_compose(mult, z)));
  }
  return result;
}

void Program::constrain_zero(const Coefficient& form) {
  require_building("constrain_zero");
  Coefficient c = cleaned(form);
  if (c.is_zero()) return;
  equalities_.push_back(std::move(c));
}

void Program::constrain_zero(const OpVar& a) {
  require_building("constrain_zero");
  a.validate();
  for (const PolyMatrix* block : {&a.P, &a.Q1, &a.Q2, &a.R0, &a.R1, &a.R2}) {
    for (const Poly2& p : block->entries()) {
      for (const auto& [exponents, coeff] : p.terms()) constrain_zero(coeff);
    }
  }
}

DegreeSpec dominating_degrees(const OpVar& a, DegreeSpec deg) {
  const Degrees mult = a.multiplier_degrees();
  const Degrees kern = a.kernel_degrees();
  DegreeSpec out = deg;
  out.d2 = std::max(out.d2, ceil_half(mult.s));
  const int kmax = std::max(kern.s, kern.theta);
  out.d3 = std::max(out.d3, kmax - 2 * out.d2 - 1);
  out.d1 = std::max(out.d1, mult.s);
  return out;
}

void Program::constrain_positive(const OpVar& a, DegreeSpec deg,
                                 bool include_boundary_weight) {
  require_building("constrain_positive");
  if (!a.dims.square()) {
    std::ostringstream msg;
    msg << "constrain_positive needs a square operator, got " << a.dims;
    throw DimMismatch(msg.str());
  }
  if (!(a.interval == interval_)) {
    throw IntervalMismatch("operator interval differs from the program's");
  }
  const DegreeSpec used = dominating_degrees(a, deg);
  if (!(used == deg)) {
    std::ostringstream msg;
    msg << "slack degrees raised from (" << deg << ") to (" << used << ")";
    warnings_.push_back(msg.str());
  }
  // A slack whose pointwise part must vanish has a zero Z1 block in every
  // feasible M, so it is left out up front.
  const bool multiplier = a.dims.n > 0 && !a.R0.is_zero();
  const OpVar slack = declare_posopvar(a.dims.m, a.dims.n, used,
                                       include_boundary_weight, multiplier);
  constrain_zero(op_sub(a, slack));
}

void Program::constrain_nonnegative(const Coefficient& form) {
  require_building("constrain_nonnegative");
  const auto grid = declare_psd(1);
  constrain_zero(form - Coefficient::variable(grid[0][0]));
}

void Program::set_objective(const Coefficient& objective) {
  require_building("set_objective");
  objective_ = cleaned(objective);
}

AssembledProgram Program::assemble() const {
  auto check = [this](const Coefficient& form) {
    for (const auto& [id, w] : form.linear()) {
      if (id.program() != serial_ || id.index() >= vars_.size()) {
        throw AssemblyError("constraint references a decision variable that "
                            "was not declared in this program");
      }
    }
  };
  for (const auto& e : equalities_) check(e);
  check(objective_);

  AssembledProgram out;
  for (std::size_t b = 0; b < psd_blocks_.size(); ++b) {
    const auto& grid = psd_blocks_[b];
    const int size = static_cast<int>(grid.size());
    out.sdp.block_sizes.push_back(size);
    for (int c = 0; c < size; ++c) {
      for (int r = 0; r <= c; ++r) {
        out.slots[grid[r][c]] = {VarSlot::Kind::PsdEntry, static_cast<int>(b), r, c};
      }
    }
  }
  int free_count = 0;
  const int free_block = static_cast<int>(psd_blocks_.size());
  for (std::size_t i = 0; i < vars_.size(); ++i) {
    if (vars_[i].kind != VarSlot::Kind::Free) continue;
    const auto id = DecisionVarId::make(serial_, static_cast<std::uint32_t>(i));
    out.slots[id] = {VarSlot::Kind::Free, free_block, 2 * free_count,
                     2 * free_count + 1};
    ++free_count;
  }
  if (free_count > 0) out.sdp.block_sizes.push_back(-2 * free_count);

  for (const auto& e : equalities_) {
    SdpConstraint c;
    add_form(e, out.slots, c.entries);
    c.rhs = e.constant() == 0.0 ? 0.0 : -e.constant();
    out.sdp.constraints.push_back(std::move(c));
  }
  add_form(objective_, out.slots, out.sdp.objective);
  out.objective_constant = objective_.constant();
  return out;
}

SolveReport Program::finish(const AssembledProgram& assembled,
                            const SdpSolution& solution) {
  SolveReport r;
  r.status = solution.status;
  r.objective = solution.primal_objective + assembled.objective_constant;
  r.primal_infeasibility = solution.primal_infeasibility;
  r.dual_infeasibility = solution.dual_infeasibility;
  r.duality_gap = solution.duality_gap;
  r.iterations = solution.iterations;
  r.sdp_blocks = static_cast<int>(assembled.sdp.block_sizes.size());
  r.sdp_constraints = static_cast<int>(assembled.sdp.constraints.size());
  r.warnings = warnings_;

  assignment_.clear();
  for (const auto& [id, slot] : assembled.slots) {
    if (solution.X.empty()) {
      assignment_[id] = 0.0;
      continue;
    }
    const auto& blk = solution.X.at(slot.block);
    assignment_[id] = slot.kind == VarSlot::Kind::Free
                          ? blk(slot.row, slot.row) - blk(slot.col, slot.col)
                          : blk(slot.row, slot.col);
  }
  report_ = r;
  state_ = ProgramState::Solved;
  return r;
}

SolveReport Program::solve(const SdpOptions& options) {
  require_building("solve");
  const AssembledProgram assembled = assemble();
  return finish(assembled, solve_sdp(assembled.sdp, options));
}

SolveReport Program::load_solution(const AssembledProgram& assembled,
                                   const SdpSolution& solution) {
  require_building("load_solution");
  if (solution.X.size() != assembled.sdp.block_sizes.size()) {
    throw AssemblyError("solution block count does not match the program");
  }
  return finish(assembled, solution);
}

const SolveReport& Program::report() const {
  require_solution();
  return report_;
}

const Assignment& Program::assignment() const {
  require_solution();
  return assignment_;
}

double Program::value(DecisionVarId id) const {
  require_solution();
  const auto it = assignment_.find(id);
  if (it == assignment_.end()) {
    throw UnboundDecisionVar("decision variable is not part of this program");
  }
  return it->second;
}

double Program::value(const Coefficient& form) const {
  require_solution();
  return form.evaluate(assignment_);
}

OpVar Program::get_solution_opvar(const OpVar& var) const {
  require_solution();
  if (report_.status != SdpStatus::Optimal) {
    throw InfeasibleNoSolution(std::string("no solution available: solve ended ") +
                               to_string(report_.status));
  }
  return evaluate_decisions(var, assignment_);
}

}  // namespace pisos
