#pragma once

// Demo programs shared by the unit and acceptance suites.

#include "pisos/opvar.hpp"
#include "pisos/program.hpp"

namespace pisos::testing {

inline OpVar volterra_operator() {
  OpVar a = op_new({0, 0, 1, 1}, Interval(0.0, 1.0));
  a.R1(0, 0) = Poly2(1.0);
  return a;
}

// u = H u'' and u' = H2 u'' for u(0) = u(1) = 0 on [0, 1].
inline OpVar green_operator() {
  OpVar h = op_new({0, 0, 1, 1}, Interval(0.0, 1.0));
  h.R1(0, 0) = Poly2::s() * Poly2::theta() - Poly2::theta();
  h.R2(0, 0) = Poly2::s() * Poly2::theta() - Poly2::s();
  return h;
}

inline OpVar green_derivative_operator() {
  OpVar h = op_new({0, 0, 1, 1}, Interval(0.0, 1.0));
  h.R1(0, 0) = Poly2::theta();
  h.R2(0, 0) = Poly2::theta() - 1.0;
  return h;
}

struct ScalarProgram {
  Program program;
  DecisionVarId bound;
};

// min g s.t. g I - A*A >= 0.
inline ScalarProgram norm_bound_program(const OpVar& a, DegreeSpec deg) {
  ScalarProgram out{Program(a.interval), {}};
  out.bound = out.program.declare_scalar("gamma");
  const OpVar lhs = op_sub(op_scale(Coefficient::variable(out.bound),
                                    op_identity(a.dims.m, a.dims.n, a.interval)),
                           op_compose(op_adjoint(a), a));
  out.program.constrain_positive(lhs, deg);
  out.program.set_objective(Coefficient::variable(out.bound));
  return out;
}

// min C s.t. C H2*H2 - H*H >= 0.
inline ScalarProgram poincare_program(DegreeSpec deg) {
  const OpVar h = green_operator();
  const OpVar h2 = green_derivative_operator();
  ScalarProgram out{Program(h.interval), {}};
  out.bound = out.program.declare_scalar("C");
  out.program.constrain_positive(
      op_sub(op_scale(Coefficient::variable(out.bound), op_compose(op_adjoint(h2), h2)),
             op_compose(op_adjoint(h), h)),
      deg);
  out.program.set_objective(Coefficient::variable(out.bound));
  return out;
}

}  // namespace pisos::testing
