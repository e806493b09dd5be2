#include "pisos/program.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "pisos/errors.hpp"
#include "pisos/numeric.hpp"
#include "support/generators.hpp"
#include "support/programs.hpp"
#include "support/sdp_generators.hpp"

namespace pisos {
namespace {

const Interval kUnit(0.0, 1.0);

Coefficient var(DecisionVarId id) { return Coefficient::variable(id); }

// Assignment giving every PSD matrix of `prog` a random PSD value and every
// free scalar a random value.
Assignment random_psd_assignment(std::mt19937_64& rng, const Program& prog) {
  const AssembledProgram assembled = prog.assemble();
  BlockMatrix blocks;
  for (int size : assembled.sdp.block_sizes) {
    const int n = std::abs(size);
    Eigen::MatrixXd m = testing::random_pd(rng, n) - 0.9 * Eigen::MatrixXd::Identity(n, n);
    if (size < 0) m = Eigen::MatrixXd(m.diagonal().asDiagonal());
    blocks.push_back(m);
  }
  Assignment out;
  for (const auto& [id, slot] : assembled.slots) {
    if (slot.kind == VarSlot::Kind::PsdEntry) {
      out[id] = blocks[slot.block](slot.row, slot.col);
    } else {
      out[id] = testing::uniform(rng);
    }
  }
  return out;
}

double min_quadratic_form(std::mt19937_64& rng, const OpVar& p, int samples) {
  const int nodes = default_node_count(p) + 8;
  double worst = std::numeric_limits<double>::infinity();
  for (int k = 0; k < samples; ++k) {
    const FunctionSample z = random_sample(rng, p.interval, p.dims.m, p.dims.n, 4, nodes);
    worst = std::min(worst, inner_product(z, op_apply(p, z)));
  }
  return worst;
}

TEST(ProgramLifecycleTest, EmptyProgramIsFeasible) {
  Program prog(kUnit);
  EXPECT_EQ(prog.variable_count(), 0u);
  const SolveReport r = prog.solve();
  EXPECT_EQ(r.status, SdpStatus::Optimal);
  EXPECT_EQ(r.objective, 0.0);
  EXPECT_EQ(prog.state(), ProgramState::Solved);
}

TEST(ProgramLifecycleTest, SolvedProgramRejectsChanges) {
  Program prog;
  const DecisionVarId g = prog.declare_scalar();
  prog.solve();
  EXPECT_THROW(prog.declare_scalar(), StateError);
  EXPECT_THROW(prog.declare_psd(2), StateError);
  EXPECT_THROW(prog.constrain_zero(var(g)), StateError);
  EXPECT_THROW(prog.set_objective(var(g)), StateError);
  EXPECT_THROW(prog.solve(), StateError);
}

TEST(ProgramLifecycleTest, QueriesBeforeSolve) {
  Program prog;
  OpVar p = prog.declare_posopvar(1, 0, {});
  EXPECT_THROW(prog.get_solution_opvar(p), StateError);
  EXPECT_THROW(prog.report(), StateError);
}

TEST(ProgramObjectiveTest, LowerBound) {
  Program prog;
  const DecisionVarId g = prog.declare_scalar("gam");
  prog.constrain_nonnegative(var(g) - 3.0);
  prog.set_objective(var(g));
  const SolveReport r = prog.solve();
  ASSERT_EQ(r.status, SdpStatus::Optimal);
  EXPECT_NEAR(prog.value(g), 3.0, 1e-6);
  EXPECT_NEAR(r.objective, 3.0, 1e-6);
}

TEST(ProgramObjectiveTest, Maximization) {
  Program prog;
  const DecisionVarId g = prog.declare_scalar("gam");
  prog.constrain_nonnegative(5.0 - var(g));
  prog.set_objective(-var(g));
  ASSERT_EQ(prog.solve().status, SdpStatus::Optimal);
  EXPECT_NEAR(prog.value(g), 5.0, 1e-6);
}

TEST(ProgramObjectiveTest, IndependentScalarsAndDuplicateNames) {
  Program prog;
  const DecisionVarId a = prog.declare_scalar("x");
  const DecisionVarId b = prog.declare_scalar("x");
  EXPECT_NE(a, b);
  prog.constrain_nonnegative(var(a) - 1.0);
  prog.constrain_nonnegative(var(b) - 2.0);
  prog.set_objective(var(a) + var(b));
  ASSERT_EQ(prog.solve().status, SdpStatus::Optimal);
  EXPECT_NEAR(prog.value(a), 1.0, 1e-6);
  EXPECT_NEAR(prog.value(b), 2.0, 1e-6);
}

TEST(DeclareOpvarTest, MatrixVariable) {
  Program prog(kUnit);
  const OpVar p = prog.declare_opvar({1, 1, 0, 0}, {3, 3, 3});
  EXPECT_EQ(prog.variable_count(), 1u);
  EXPECT_EQ(p.P(0, 0).size(), 1u);
  EXPECT_FALSE(p.P(0, 0).is_numeric());
}

TEST(DeclareOpvarTest, DegreeRule) {
  Program prog(kUnit);
  const OpVar p = prog.declare_opvar({0, 0, 1, 1}, {1, 0, 0});
  EXPECT_EQ(p.R0(0, 0).size(), 2u);
  EXPECT_EQ(max_degrees(p.R0(0, 0)).s, 1);
  EXPECT_EQ(p.R1(0, 0).size(), 1u);
  EXPECT_EQ(p.R2(0, 0).size(), 1u);
  EXPECT_EQ(prog.variable_count(), 4u);
}

TEST(DeclareOpvarTest, ConstantDegree) {
  Program prog(kUnit);
  const OpVar p = prog.declare_opvar({1, 1, 1, 1}, {0, 0, 0});
  for (const PolyMatrix* b : {&p.P, &p.Q1, &p.Q2, &p.R0, &p.R1, &p.R2}) {
    EXPECT_EQ((*b)(0, 0).size(), 1u);
    EXPECT_EQ(max_degrees((*b)(0, 0)), (Degrees{0, 0}));
  }
}

TEST(DeclarePosopvarTest, FiniteDimensionalReduction) {
  Program prog(Interval(-1.0, 2.0));
  const OpVar p = prog.declare_posopvar(1, 0, {}, false);
  const auto& terms = p.P(0, 0).terms();
  ASSERT_EQ(terms.size(), 1u);
  const Coefficient& c = terms.begin()->second;
  ASSERT_EQ(c.linear().size(), 1u);
  EXPECT_NEAR(c.linear()[0].second, 3.0, 1e-14);
  EXPECT_TRUE(p.Q1.empty() && p.R0.empty());
}

TEST(DeclarePosopvarTest, SelfAdjoint) {
  for (bool bw : {false, true}) {
    Program prog(Interval(-0.5, 1.5));
    const OpVar p = prog.declare_posopvar(1, 2, {1, 1, 1}, bw);
    EXPECT_TRUE(approx_equal(p, op_adjoint(p), 0.0));
  }
}

TEST(DeclarePosopvarTest, PositiveForRandomPsdMultipliers) {
  std::mt19937_64 rng(41);
  for (int t = 0; t < 5; ++t) {
    Program prog(testing::random_interval(rng));
    const int m = testing::uniform_int(rng, 0, 2);
    const int n = testing::uniform_int(rng, 1, 2);
    const OpVar p = prog.declare_posopvar(m, n, {2, 1, 1});
    const OpVar numeric = evaluate_decisions(p, random_psd_assignment(rng, prog));
    EXPECT_GE(min_quadratic_form(rng, numeric, 100), -1e-9);
  }
}

TEST(DeclarePosopvarTest, DegreeRegression) {
  for (int d2 = 0; d2 <= 3; ++d2) {
    for (int d3 = 0; d3 <= 2; ++d3) {
      const DegreeSpec deg{2, d2, d3};
      Program prog(kUnit);
      const OpVar p = prog.declare_posopvar(1, 1, deg, false);
      EXPECT_LE(p.R0.max_degrees().s, 2 * d2);
      const int cap = std::max(deg.d1 + d2, 2 * d2 + d3 + 1) + 1;
      for (const PolyMatrix* b : {&p.R1, &p.R2}) {
        EXPECT_LE(b->max_degrees().s, cap);
        EXPECT_LE(b->max_degrees().theta, cap);
      }
    }
  }
}

TEST(MonomialLiftingTest, Shape) {
  const OpVar z = monomial_lifting(2, 1, {0, 2, 1}, kUnit);
  // 2 + (3 pointwise + 2 * 3 * 2 integral) rows.
  EXPECT_EQ(z.dims, (OpDims{0, 2, 17, 1}));
  EXPECT_EQ(monomial_lifting(2, 1, {0, 2, 1}, kUnit, false).dims.q, 14);
  EXPECT_THROW(monomial_lifting(-1, 1, {}, kUnit), DimMismatch);
}

TEST(ConstrainZeroTest, ForcesEquality) {
  Program prog(kUnit);
  const OpVar p1 = prog.declare_opvar({1, 1, 1, 1}, {1, 1, 1});
  OpVar p2 = op_new({1, 1, 1, 1}, kUnit);
  p2.P(0, 0) = Poly2(0.5);
  p2.Q1(0, 0) = Poly2(2.0);
  p2.Q2(0, 0) = Poly2::s();
  p2.R0(0, 0) = 1.0 - Poly2::s();
  p2.R1(0, 0) = Poly2::s() * Poly2::theta();
  p2.R2(0, 0) = Poly2::theta();
  prog.constrain_zero(op_sub(p1, p2));
  ASSERT_EQ(prog.solve().status, SdpStatus::Optimal);
  EXPECT_TRUE(approx_equal(prog.get_solution_opvar(p1), p2, 1e-8));
}

TEST(ConstrainZeroTest, ZeroOperatorAddsNothing) {
  Program prog(kUnit);
  prog.constrain_zero(op_new({1, 1, 1, 1}, kUnit));
  EXPECT_EQ(prog.equality_count(), 0u);
}

TEST(ConstrainZeroTest, NumericNonzeroIsInfeasible) {
  Program prog(kUnit);
  prog.constrain_zero(op_identity(0, 1, kUnit));
  EXPECT_EQ(prog.equality_count(), 1u);
  EXPECT_EQ(prog.solve().status, SdpStatus::Infeasible);
  EXPECT_THROW(prog.get_solution_opvar(op_identity(0, 1, kUnit)),
               InfeasibleNoSolution);
}

TEST(ConstrainZeroTest, CoefficientMatchingSoundness) {
  // A = B - X for numeric B and a free X: any solution makes A vanish.
  std::mt19937_64 rng(17);
  Program prog(kUnit);
  const OpDims dims{1, 1, 1, 1};
  const OpVar x = prog.declare_opvar(dims, {2, 2, 2});
  OpVar b = op_new(dims, kUnit);
  b.P(0, 0) = Poly2(testing::uniform(rng));
  b.Q1(0, 0) = testing::random_poly(rng, 2, 0);
  b.Q2(0, 0) = testing::random_poly(rng, 2, 0);
  b.R0(0, 0) = testing::random_poly(rng, 2, 0);
  b.R1(0, 0) = testing::random_poly(rng, 2, 2);
  b.R2(0, 0) = testing::random_poly(rng, 2, 2);
  const OpVar a = op_sub(b, x);
  prog.constrain_zero(a);
  ASSERT_EQ(prog.solve().status, SdpStatus::Optimal);
  const OpVar solved = prog.get_solution_opvar(a);
  const int nodes = default_node_count(b) + 4;
  for (int k = 0; k < 200; ++k) {
    const FunctionSample z = random_sample(rng, kUnit, 1, 1, 3, nodes);
    const FunctionSample r = op_apply(solved, z);
    EXPECT_LE(norm(r), 1e-8 * (1.0 + norm(z)));
  }
}

TEST(ConstrainPositiveTest, IdentityAndNegatedIdentity) {
  {
    Program prog(kUnit);
    prog.constrain_positive(op_identity(1, 1, kUnit), {1, 1, 1});
    EXPECT_EQ(prog.solve().status, SdpStatus::Optimal);
  }
  {
    Program prog(kUnit);
    prog.constrain_positive(op_scale(-1.0, op_identity(1, 1, kUnit)), {1, 1, 1});
    EXPECT_EQ(prog.solve().status, SdpStatus::Infeasible);
  }
}

TEST(ConstrainPositiveTest, RejectsNonSquare) {
  Program prog(kUnit);
  EXPECT_THROW(prog.constrain_positive(op_new({1, 0, 0, 0}, kUnit), {}), DimMismatch);
  EXPECT_THROW(prog.constrain_positive(op_new({0, 0, 1, 2}, kUnit), {}), DimMismatch);
}

TEST(ConstrainPositiveTest, ExtractedSlackIsPositive) {
  // P - I >= 0 with P a posopvar; the extracted P is positive.
  std::mt19937_64 rng(23);
  Program prog(kUnit);
  const OpVar p = prog.declare_posopvar(1, 1, {2, 2, 2});
  prog.constrain_positive(op_sub(p, op_identity(1, 1, kUnit)), {2, 2, 2});
  ASSERT_EQ(prog.solve().status, SdpStatus::Optimal);
  const OpVar value = prog.get_solution_opvar(p);
  EXPECT_TRUE(value.is_numeric());
  const int nodes = default_node_count(value) + 8;
  for (int k = 0; k < 500; ++k) {
    const FunctionSample z = random_sample(rng, kUnit, 1, 1, 4, nodes);
    EXPECT_GE(inner_product(z, op_apply(value, z)), -1e-7 * inner_product(z, z));
  }
}

TEST(ConstrainPositiveTest, RaisesDegreesWithWarning) {
  Program prog(kUnit);
  OpVar a = op_identity(0, 1, kUnit);
  a.R0(0, 0) = 2.0 + Poly2::monomial(6, 0);
  prog.constrain_positive(a, {0, 0, 0});
  ASSERT_EQ(prog.warnings().size(), 1u);
  EXPECT_NE(prog.warnings()[0].find("raised"), std::string::npos);
  const DegreeSpec d = dominating_degrees(a, {0, 0, 0});
  EXPECT_GE(d.d2, 3);
  EXPECT_EQ(dominating_degrees(a, d), d);
}

TEST(SolutionTest, PureMatrixPosopvarIsPsd) {
  Program prog;
  const OpVar p = prog.declare_posopvar(2, 0, {});
  OpVar shift = op_identity(2, 0, Interval());
  shift.P(0, 1) = Poly2(0.5);
  shift.P(1, 0) = Poly2(0.5);
  prog.constrain_positive(op_sub(p, shift), {});
  ASSERT_EQ(prog.solve().status, SdpStatus::Optimal);
  const OpVar v = prog.get_solution_opvar(p);
  Eigen::Matrix2d m;
  for (int r = 0; r < 2; ++r) {
    for (int c = 0; c < 2; ++c) m(r, c) = evaluate(v.P(r, c), 0.0);
  }
  EXPECT_NEAR(m(0, 1), m(1, 0), 1e-12);
  EXPECT_GE(testing::min_eigenvalue(m), -1e-8);
}

TEST(AssemblyTest, ForeignVariable) {
  Program a;
  Program b;
  const DecisionVarId x = a.declare_scalar();
  b.constrain_zero(var(x) - 1.0);
  EXPECT_THROW(b.assemble(), AssemblyError);
  EXPECT_THROW(b.solve(), AssemblyError);
  Program c;
  c.set_objective(var(DecisionVarId::make(c.serial(), 99)));
  EXPECT_THROW(c.assemble(), AssemblyError);
}

TEST(AssemblyTest, FixedScalarProblem) {
  Program prog;
  const auto m = prog.declare_psd(1);
  prog.constrain_zero(var(m[0][0]) - 3.0);
  prog.set_objective(var(m[0][0]));
  const AssembledProgram assembled = prog.assemble();
  EXPECT_EQ(assembled.sdp.constraints.size(), 1u);
  EXPECT_NEAR(solve_sdp(assembled.sdp).primal_objective, 3.0, 1e-7);
}

TEST(AssemblyTest, VolterraHasSeveralBlocks) {
  auto built = testing::norm_bound_program(testing::volterra_operator(), {2, 2, 2});
  EXPECT_GE(built.program.assemble().sdp.block_sizes.size(), 2u);
}

TEST(DemoProgramTest, VolterraNormBound) {
  auto built = testing::norm_bound_program(testing::volterra_operator(), {2, 2, 2});
  ASSERT_EQ(built.program.solve().status, SdpStatus::Optimal);
  EXPECT_NEAR(std::sqrt(built.program.value(built.bound)), 2.0 / std::numbers::pi, 2e-3);
}

TEST(DemoProgramTest, MonotoneInDegree) {
  for (int which = 0; which < 2; ++which) {
    double previous = std::numeric_limits<double>::infinity();
    for (int d = 1; d <= 3; ++d) {
      auto built = which == 0 ? testing::norm_bound_program(testing::volterra_operator(),
                                                            {d, d, d})
                              : testing::poincare_program({d, d, d});
      ASSERT_EQ(built.program.solve().status, SdpStatus::Optimal) << which << " " << d;
      const double v = built.program.value(built.bound);
      EXPECT_LE(v, previous + 1e-6) << which << " " << d;
      previous = v;
    }
  }
}

TEST(SolveReportTest, TextHasOneFieldPerLine) {
  Program prog;
  prog.solve();
  const std::string text = prog.report().to_text();
  EXPECT_NE(text.find("status: Optimal\n"), std::string::npos);
  EXPECT_NE(text.find("objective: "), std::string::npos);
  EXPECT_NE(text.find("iterations: "), std::string::npos);
}

}  // namespace
}  // namespace pisos
