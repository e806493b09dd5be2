#include "pisos/operator_json.hpp"

#include <random>

#include <gtest/gtest.h>

#include "pisos/errors.hpp"
#include "support/generators.hpp"

namespace pisos {
namespace {

TEST(OperatorJsonTest, RoundTripIsExact) {
  std::mt19937_64 rng(99);
  for (int t = 0; t < 50; ++t) {
    const OpDims dims = testing::random_dims(rng, 2);
    const OpVar a = testing::random_opvar(rng, dims, testing::random_interval(rng), 3);
    const OpVar b = parse_operator(format_operator(a));
    EXPECT_TRUE(approx_equal(a, b, 1e-15));
    EXPECT_EQ(format_operator(b), format_operator(a));
  }
}

TEST(OperatorJsonTest, Layout) {
  OpVar a = op_new({0, 0, 1, 1}, Interval(0.0, 1.0));
  a.R1(0, 0) = Poly2(1.0);
  EXPECT_EQ(format_operator(a),
            "{\n \"dims\": [0,0,1,1],\n \"interval\": [0.0,1.0],\n \"P\": [],\n"
            " \"Q1\": [],\n \"Q2\": [[]],\n \"R0\": [[[]]],\n \"R1\": [[[[0,0,1.0]]]],\n"
            " \"R2\": [[[]]]\n}\n");
}

TEST(OperatorJsonTest, MissingBlocksAreZero) {
  const OpVar a = parse_operator(R"({"dims": [1, 1, 1, 1], "R0": [[[[2, 0, 3.5]]]]})");
  EXPECT_EQ(a.interval, Interval(0.0, 1.0));
  EXPECT_TRUE(a.P(0, 0).is_zero());
  EXPECT_EQ(a.R0(0, 0).coefficient(2, 0).constant(), 3.5);
}

TEST(OperatorJsonTest, MalformedJsonReportsPosition) {
  try {
    parse_operator("{\"dims\": [0, 0, 1, 1],\n \"R0\": [[[0, 0, x]]]}\n");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos) << e.what();
    EXPECT_NE(std::string(e.what()).find("column"), std::string::npos) << e.what();
  }
}

TEST(OperatorJsonTest, SchemaErrors) {
  EXPECT_THROW(parse_operator("[]"), ParseError);
  EXPECT_THROW(parse_operator(R"({"interval": [0, 1]})"), ParseError);
  EXPECT_THROW(parse_operator(R"({"dims": [1, 1, -1, 1]})"), ParseError);
  EXPECT_THROW(parse_operator(R"({"dims": [1, 1, 0, 0], "P": [[[[0, 0, "x"]]]]})"),
               ParseError);
  EXPECT_THROW(parse_operator(R"({"dims": [1, 1, 0, 0], "P": [[[[-1, 0, 1]]]]})"),
               ParseError);
  EXPECT_THROW(parse_operator(R"({"dims": [1, 1, 0, 0], "P": [[[[0, 0.5, 1]]]]})"),
               ParseError);
  EXPECT_THROW(parse_operator(R"({"dims": [1, 1, 0, 0], "P": [[[], []]]})"), DimMismatch);
  EXPECT_THROW(parse_operator(R"({"dims": [1, 1, 0, 0], "P": [[[[0, 1, 1]]]]})"),
               DimMismatch);
  EXPECT_THROW(parse_operator(R"({"dims": [0, 0, 1, 1], "interval": [1, 1]})"), BadInterval);
}

TEST(OperatorFileTest, NamedOperatorsAndSettings) {
  const OperatorFile f = parse_operator_file(
      R"({"H": {"dims": [1, 1, 0, 0], "P": [[[[0, 0, 1]]]]},
          "A": {"dims": [1, 1, 0, 0], "P": [[[[0, 0, -1]]]]},
          "eps": 0.001, "gamma": 2, "deg": [1, 2, 3]})");
  EXPECT_EQ(f.operators.size(), 2u);
  EXPECT_EQ(evaluate(f.at("A").P(0, 0), 0.0), -1.0);
  EXPECT_EQ(*f.eps, 0.001);
  EXPECT_EQ(*f.gamma, 2.0);
  EXPECT_EQ(*f.deg, (DegreeSpec{1, 2, 3}));
  EXPECT_THROW(f.at("B"), ParseError);

  const OperatorFile g = parse_operator_file(format_operator_file(f));
  EXPECT_EQ(format_operator_file(g), format_operator_file(f));
}

TEST(OperatorFileTest, SingleOperatorFile) {
  const OperatorFile f = parse_operator_file(R"({"dims": [0, 0, 1, 1]})");
  ASSERT_EQ(f.operators.count(""), 1u);
  EXPECT_THROW(parse_operator_file(R"({"eps": "small"})"), ParseError);
  EXPECT_THROW(parse_operator_file(R"({"deg": [1, 2]})"), ParseError);
  EXPECT_THROW(parse_operator_file(R"({"note": 3})"), ParseError);
}

TEST(OperatorJsonTest, DecisionVariablesCannotBeWritten) {
  OpVar a = op_new({1, 1, 0, 0}, Interval());
  a.P(0, 0) = Poly2(Coefficient::variable(DecisionVarId::make(1, 0)));
  EXPECT_THROW(format_operator(a), DimMismatch);
}

}  // namespace
}  // namespace pisos
