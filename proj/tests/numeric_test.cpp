#include "pisos/numeric.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "pisos/errors.hpp"
#include "support/generators.hpp"

namespace pisos {
namespace {

const Interval kUnit(0.0, 1.0);

OpVar volterra() {
  OpVar a = op_new({0, 0, 1, 1}, kUnit);
  a.R1(0, 0) = Poly2(1.0);
  return a;
}

TEST(QuadratureTest, ExactForLowDegree) {
  for (int count : {1, 2, 5, 12}) {
    QuadratureRule rule = quad_nodes(-1.0, 2.0, count);
    EXPECT_NEAR(rule.weights.sum(), 3.0, 1e-13);
    for (int k = 0; k <= 2 * count - 1; ++k) {
      double q = 0.0;
      for (int i = 0; i < count; ++i) q += rule.weights(i) * std::pow(rule.nodes(i), k);
      const double exact = (std::pow(2.0, k + 1) - std::pow(-1.0, k + 1)) / (k + 1);
      EXPECT_NEAR(q, exact, 1e-12 * (1.0 + std::abs(exact))) << count << " " << k;
    }
  }
}

TEST(QuadratureTest, NodesInsideAndSorted) {
  QuadratureRule rule = quad_nodes(kUnit, 9);
  for (int i = 0; i < 9; ++i) {
    EXPECT_GT(rule.nodes(i), 0.0);
    EXPECT_LT(rule.nodes(i), 1.0);
    EXPECT_GT(rule.weights(i), 0.0);
    if (i > 0) EXPECT_LT(rule.nodes(i - 1), rule.nodes(i));
  }
}

TEST(SampleTest, InterpolationReproducesPolynomials) {
  FunctionSample z = make_sample(kUnit, Eigen::VectorXd(0),
                                 {[](double s) { return 1.0 - 3.0 * s * s * s; }}, 6);
  for (double s : {0.0, 0.13, 0.5, 0.99, 1.0}) {
    EXPECT_NEAR(interpolate(z, 0, s), 1.0 - 3.0 * s * s * s, 1e-12);
  }
}

TEST(SampleTest, InnerProductOfKnownFunctions) {
  Eigen::VectorXd x(1);
  x << 2.0;
  FunctionSample z = make_sample(kUnit, x, {[](double s) { return s; }}, 4);
  // 2^2 + int_0^1 s^2 ds
  EXPECT_NEAR(inner_product(z, z), 4.0 + 1.0 / 3.0, 1e-14);
}

TEST(ApplyTest, VolterraIntegratesConstant) {
  FunctionSample one = make_sample(kUnit, Eigen::VectorXd(0),
                                   {[](double) { return 1.0; }}, 8);
  FunctionSample r = op_apply(volterra(), one);
  for (int i = 0; i < r.node_count(); ++i) EXPECT_NEAR(r.y(0, i), r.nodes(i), 1e-14);
}

TEST(ApplyTest, MixedBlocks) {
  // P x + int Q1 y = 2x + int s^2 ds;  Q2 x + R0 y = s x + 3 y(s)
  OpVar a = op_new({1, 1, 1, 1}, kUnit);
  a.P(0, 0) = Poly2(2.0);
  a.Q1(0, 0) = Poly2::s();
  a.Q2(0, 0) = Poly2::s();
  a.R0(0, 0) = Poly2(3.0);
  Eigen::VectorXd x(1);
  x << 1.5;
  FunctionSample z = make_sample(kUnit, x, {[](double s) { return s; }}, 6);
  FunctionSample r = op_apply(a, z);
  EXPECT_NEAR(r.x(0), 3.0 + 1.0 / 3.0, 1e-14);
  for (int i = 0; i < r.node_count(); ++i) {
    EXPECT_NEAR(r.y(0, i), 1.5 * r.nodes(i) + 3.0 * r.nodes(i), 1e-13);
  }
}

TEST(ApplyTest, RejectsDecisionVariablesAndBadShapes) {
  OpVar a = op_new({0, 0, 1, 1}, kUnit);
  a.R0(0, 0) = Poly2(Coefficient::variable(DecisionVarId::make(9, 0)));
  FunctionSample z = make_sample(kUnit, 0, 1, 4);
  EXPECT_THROW(op_apply(a, z), AffineDegreeViolation);
  EXPECT_THROW(op_apply(volterra(), make_sample(kUnit, 1, 1, 4)), DimMismatch);
}

TEST(ApplyPropertyTest, AdjointInnerProductIdentity) {
  std::mt19937_64 rng(77);
  for (int t = 0; t < 30; ++t) {
    const Interval iv = testing::random_interval(rng);
    const OpDims dims = testing::random_dims(rng, 2);
    OpVar a = testing::random_opvar(rng, dims, iv, 2);
    const int nodes = default_node_count(a) + 4;
    FunctionSample z1 = random_sample(rng, iv, dims.m, dims.n, 3, nodes);
    FunctionSample z2 = random_sample(rng, iv, dims.p, dims.q, 3, nodes);
    const double lhs = inner_product(op_apply(a, z1), z2);
    const double rhs = inner_product(z1, op_apply(op_adjoint(a), z2));
    EXPECT_NEAR(lhs, rhs, 1e-8 * (1.0 + std::abs(lhs)));
  }
}

TEST(NormEstimateTest, VolterraFromBelow) {
  const double exact = 2.0 / std::numbers::pi;
  NormEstimate e = estimate_norm(volterra(), 20, 24, 3);
  EXPECT_LE(e.value, exact + 1e-9);
  EXPECT_GE(e.value, exact - 2e-3);
  EXPECT_LE(e.best_trial, e.value + 1e-15);
}

TEST(NormEstimateTest, IdentityAndZero) {
  EXPECT_NEAR(estimate_norm(op_identity(1, 2, kUnit), 5, 8).value, 1.0, 1e-12);
  EXPECT_NEAR(estimate_norm(op_new({0, 0, 1, 1}, kUnit), 5, 8).value, 0.0, 1e-15);
}

TEST(NormEstimateTest, Deterministic) {
  std::mt19937_64 rng(5);
  OpVar a = testing::random_opvar(rng, {1, 1, 1, 1}, kUnit, 2);
  EXPECT_EQ(estimate_norm(a, 10, 10, 8).value, estimate_norm(a, 10, 10, 8).value);
}

}  // namespace
}  // namespace pisos
