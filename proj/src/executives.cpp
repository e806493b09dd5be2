#include "pisos/executives.hpp"

#include <initializer_list>
#include <sstream>
#include <utility>

#include "pisos/errors.hpp"

namespace pisos {

namespace {

using Named = std::pair<const OpVar*, const char*>;

void require_numeric(const OpVar& a, const char* name) {
  a.validate();
  if (!a.is_numeric()) {
    throw DimMismatch(std::string(name) + " must be a numeric operator");
  }
}

void require_dims(const OpVar& a, const char* name, OpDims expected) {
  if (!(a.dims == expected)) {
    std::ostringstream msg;
    msg << name << " has dims " << a.dims << ", expected " << expected;
    throw DimMismatch(msg.str());
  }
}

void require_interval(const OpVar& a, const char* name, const Interval& iv) {
  if (!(a.interval == iv)) {
    throw IntervalMismatch(std::string(name) +
                           " is defined on a different interval");
  }
}

// P0 + eps I with P0 a fresh positive operator on the state space of H.
OpVar coercive_posopvar(Program& prog, const OpDims& state, DegreeSpec deg,
                        double eps) {
  const OpVar p0 = prog.declare_posopvar(state.m, state.n, deg);
  return op_add(p0, op_scale(eps, op_identity(state.m, state.n, prog.interval())));
}

OpVar scaled_identity(const Coefficient& c, int m, int n, const Interval& iv) {
  return op_scale(c, op_identity(m, n, iv));
}

OpVar negate(const OpVar& a) { return op_scale(-1.0, a); }

// The state-space checks shared by all executives.
OpDims check_state(const OpVar& H, const OpVar& A) {
  require_numeric(H, "H");
  require_numeric(A, "A");
  if (!H.dims.square()) throw DimMismatch("H must be square");
  require_dims(A, "A", H.dims);
  require_interval(A, "A", H.interval);
  return H.dims;
}

}  // namespace

StabilityProgram build_stability(const OpVar& H, const OpVar& A,
                                 DegreeSpec deg, double eps) {
  const OpDims x = check_state(H, A);
  StabilityProgram out{Program(H.interval), {}};
  out.P = coercive_posopvar(out.program, x, deg, eps);
  const OpVar lhs = op_add(op_compose(op_adjoint(A), op_compose(out.P, H)),
                           op_compose(op_adjoint(H), op_compose(out.P, A)));
  out.program.constrain_positive(negate(lhs), deg);
  return out;
}

StabilityResult exec_stability(const OpVar& H, const OpVar& A, DegreeSpec deg,
                               double eps, const SdpOptions& options) {
  StabilityProgram built = build_stability(H, A, deg, eps);
  StabilityResult r;
  r.report = built.program.solve(options);
  r.feasible = r.report.feasible();
  if (r.feasible) r.P = built.program.get_solution_opvar(built.P);
  return r;
}

GainProgram build_hinf_gain(const OpVar& H, const OpVar& A, const OpVar& B,
                            const OpVar& C, const OpVar& D, DegreeSpec deg,
                            double eps) {
  const OpDims x = check_state(H, A);
  require_numeric(B, "B");
  require_numeric(C, "C");
  require_numeric(D, "D");
  const int mw = B.dims.m;
  const int nw = B.dims.n;
  const int mz = C.dims.p;
  const int nz = C.dims.q;
  require_dims(B, "B", {x.p, mw, x.q, nw});
  require_dims(C, "C", {mz, x.m, nz, x.n});
  require_dims(D, "D", {mz, mw, nz, nw});
  for (const auto& [op, name] : std::initializer_list<Named>{{&B, "B"}, {&C, "C"}, {&D, "D"}}) {
    require_interval(*op, name, H.interval);
  }

  GainProgram out{Program(H.interval), {}, {}};
  Program& prog = out.program;
  const Interval iv = H.interval;
  out.gamma = prog.declare_scalar("gamma");
  const Coefficient g = Coefficient::variable(out.gamma);
  out.P = coercive_posopvar(prog, x, deg, eps);
  const OpVar& P = out.P;

  const OpVar BtPH = op_compose(op_adjoint(B), op_compose(P, H));
  const OpVar lyap = op_add(op_compose(op_adjoint(A), op_compose(P, H)),
                            op_compose(op_adjoint(H), op_compose(P, A)));
  const OpVar lmi = op_blocks_3x3({{
      {scaled_identity(-g, mw, nw, iv), op_adjoint(D), BtPH},
      {D, scaled_identity(-g, mz, nz, iv), C},
      {op_adjoint(BtPH), op_adjoint(C), lyap},
  }});
  prog.constrain_positive(negate(lmi), deg);
  prog.set_objective(g);
  return out;
}

GainResult exec_hinf_gain(const OpVar& H, const OpVar& A, const OpVar& B,
                          const OpVar& C, const OpVar& D, DegreeSpec deg,
                          double eps, const SdpOptions& options) {
  GainProgram built = build_hinf_gain(H, A, B, C, D, deg, eps);
  GainResult r;
  r.report = built.program.solve(options);
  // An unattained infimum (e.g. no input path) ends MaxIter; the last gamma
  // is still the best bound found.
  if (r.report.status == SdpStatus::Optimal ||
      r.report.status == SdpStatus::MaxIter) {
    r.gamma = built.program.value(built.gamma);
  }
  if (r.report.feasible()) r.P = built.program.get_solution_opvar(built.P);
  return r;
}

EstimatorProgram build_hinf_estimator(const OpVar& H, const OpVar& A,
                                      const OpVar& B, const OpVar& C1,
                                      const OpVar& C2, const OpVar& D11,
                                      const OpVar& D21, double gamma,
                                      DegreeSpec deg, double eps) {
  if (!(gamma > 0.0)) throw InvalidBounds("gamma must be positive");
  const OpDims x = check_state(H, A);
  require_numeric(B, "B");
  require_numeric(C1, "C1");
  require_numeric(C2, "C2");
  require_numeric(D11, "D11");
  require_numeric(D21, "D21");
  const int mw = B.dims.m;
  const int nw = B.dims.n;
  const int mz = C1.dims.p;
  const int nz = C1.dims.q;
  const int my = C2.dims.p;
  require_dims(B, "B", {x.p, mw, x.q, nw});
  require_dims(C1, "C1", {mz, x.m, nz, x.n});
  require_dims(C2, "C2", {my, x.m, 0, x.n});
  require_dims(D11, "D11", {mz, mw, nz, nw});
  require_dims(D21, "D21", {my, mw, 0, nw});
  for (const auto& [op, name] : std::initializer_list<Named>{
           {&B, "B"}, {&C1, "C1"}, {&C2, "C2"}, {&D11, "D11"}, {&D21, "D21"}}) {
    require_interval(*op, name, H.interval);
  }

  EstimatorProgram out{Program(H.interval), {}, {}};
  Program& prog = out.program;
  const Interval iv = H.interval;
  out.P = coercive_posopvar(prog, x, deg, eps);
  // Z maps the measured outputs into the state space; it has no L2 input.
  out.Z = prog.declare_opvar({x.p, my, x.q, 0}, deg);
  const OpVar& P = out.P;
  const OpVar& Z = out.Z;

  const OpVar PAZC = op_add(op_compose(P, A), op_compose(Z, C2));
  const OpVar T = negate(op_compose(
      op_adjoint(op_add(op_compose(P, B), op_compose(Z, D21))), H));
  const OpVar lyap = op_add(op_compose(op_adjoint(PAZC), H),
                            op_compose(op_adjoint(H), PAZC));
  const OpVar lmi = op_blocks_3x3({{
      {scaled_identity(-gamma, mw, nw, iv), negate(op_adjoint(D11)), T},
      {negate(D11), scaled_identity(-gamma, mz, nz, iv), C1},
      {op_adjoint(T), op_adjoint(C1), lyap},
  }});
  prog.constrain_positive(negate(lmi), deg);
  return out;
}

EstimatorResult exec_hinf_estimator(const OpVar& H, const OpVar& A,
                                    const OpVar& B, const OpVar& C1,
                                    const OpVar& C2, const OpVar& D11,
                                    const OpVar& D21, double gamma,
                                    DegreeSpec deg, double eps,
                                    const SdpOptions& options) {
  EstimatorProgram built =
      build_hinf_estimator(H, A, B, C1, C2, D11, D21, gamma, deg, eps);
  EstimatorResult r;
  r.report = built.program.solve(options);
  r.feasible = r.report.feasible();
  if (r.feasible) {
    r.P = built.program.get_solution_opvar(built.P);
    r.Z = built.program.get_solution_opvar(built.Z);
  }
  return r;
}

}  // namespace pisos
