#include <gtest/gtest.h>

#include <cmath>

#include "generators.hpp"
#include "nhdirac/expr.hpp"

using namespace nhdirac;
using namespace nhdirac::expr;

TEST(ExprParse, ExponentOfLinearForm) {
  const auto ast = parse("exp(r*t + q*x)");
  const auto expected =
      call(Func::exp, binary(BinaryOp::add, binary(BinaryOp::mul, parameter("r"), variable(Var::t)),
                             binary(BinaryOp::mul, parameter("q"), variable(Var::x))));
  EXPECT_TRUE(structurally_equal(ast, expected));
}

TEST(ExprParse, IncompleteExpressionReportsOffset) {
  try {
    parse("2*");
    FAIL() << "expected syntax_error";
  } catch (const syntax_error& e) {
    EXPECT_EQ(e.offset, 2u);
  }
}

TEST(ExprParse, PowerIsRightAssociative) {
  const auto ast = parse("2^3^2");
  const auto expected = binary(BinaryOp::pow, literal(2), binary(BinaryOp::pow, literal(3), literal(2)));
  EXPECT_TRUE(structurally_equal(ast, expected));
  EXPECT_DOUBLE_EQ(eval(ast, 0, 0, {}), 512.0);
}

TEST(ExprParse, NestedDeSitterLapse) {
  const auto ast = parse("(1 - (q*x)^2)^0.5");
  const auto expected = binary(
      BinaryOp::pow,
      binary(BinaryOp::sub, literal(1),
             binary(BinaryOp::pow, binary(BinaryOp::mul, parameter("q"), variable(Var::x)), literal(2))),
      literal(0.5));
  EXPECT_TRUE(structurally_equal(ast, expected));
}

TEST(ExprParse, PrecedenceOfUnaryMinusAndPower) {
  // ^ binds tighter than unary minus
  EXPECT_DOUBLE_EQ(eval(parse("-2^2"), 0, 0, {}), -4.0);
  EXPECT_DOUBLE_EQ(eval(parse("2^-1"), 0, 0, {}), 0.5);
  EXPECT_DOUBLE_EQ(eval(parse("8/4/2"), 0, 0, {}), 1.0);
  EXPECT_DOUBLE_EQ(eval(parse("1-2-3"), 0, 0, {}), -4.0);
  EXPECT_DOUBLE_EQ(eval(parse("1+2*3"), 0, 0, {}), 7.0);
}

TEST(ExprParse, Rejections) {
  EXPECT_THROW(parse(""), syntax_error);
  EXPECT_THROW(parse("1 + "), syntax_error);
  EXPECT_THROW(parse("(1"), syntax_error);
  EXPECT_THROW(parse("1 2"), syntax_error);
  EXPECT_THROW(parse("foo(1)"), syntax_error);
  EXPECT_THROW(parse("x $ t"), syntax_error);
}

TEST(ExprEval, Examples) {
  EXPECT_DOUBLE_EQ(eval(parse("exp(r*t+q*x)"), 0, 0, {{"r", 0.7}, {"q", -3.0}}), 1.0);
  const double q = 0.01;
  EXPECT_EQ(eval(parse("(1-(q*x)^2)^0.5"), 1 / q, 0, {{"q", q}}), 0.0);
  EXPECT_DOUBLE_EQ(eval(parse("q*x"), 3, 0, {{"q", 0.002}}), 0.006);
}

TEST(ExprEval, DomainErrors) {
  EXPECT_THROW(eval(parse("sqrt(x)"), -1, 0, {}), evaluation_error);
  EXPECT_THROW(eval(parse("log(x)"), 0, 0, {}), evaluation_error);
  EXPECT_THROW(eval(parse("1/x"), 0, 0, {}), evaluation_error);
  EXPECT_THROW(eval(parse("x^0.5"), -2, 0, {}), evaluation_error);
  EXPECT_THROW(eval(parse("q*x"), 1, 0, {}), evaluation_error);
  EXPECT_THROW(eval(parse("exp(x)"), 1000, 0, {}), evaluation_error);
  EXPECT_DOUBLE_EQ(eval(parse("x^2"), -2, 0, {}), 4.0);
}

TEST(ExprDiff, Examples) {
  const auto d = diff_t(parse("exp(r*t+q*x)"));
  const ParamMap p{{"r", 0.5}, {"q", 0.01}};
  for (double x : {0.0, 3.0, 10.0})
    for (double t : {0.0, 0.4})
      EXPECT_NEAR(eval(d, x, t, p), 0.5 * std::exp(0.5 * t + 0.01 * x), 1e-14 * std::exp(0.5 * t + 0.01 * x));
  EXPECT_TRUE(structurally_equal(diff_t(parse("q*x")), literal(0)));
  const auto lin = diff_t(parse("r*t+q*x"));
  for (double x : {-1.0, 2.0}) EXPECT_DOUBLE_EQ(eval(lin, x, 7.0, {{"r", 0.3}, {"q", 2.0}}), 0.3);
}

TEST(ExprDiff, AbsOfTimeDependentArgumentRejected) {
  EXPECT_THROW(diff_t(parse("abs(t)")), error);
  EXPECT_TRUE(structurally_equal(diff_t(parse("abs(x)")), literal(0)));
}

TEST(ExprProperties, PrintParseRoundTrip) {
  gen::Rng rng(11);
  for (int i = 0; i < 500; ++i) {
    const auto ast = gen::any_tree(rng, 5);
    const auto text = to_string(ast);
    const auto back = parse(text);
    ASSERT_TRUE(structurally_equal(ast, back)) << text << " -> " << to_string(back);
  }
}

TEST(ExprProperties, DiffMatchesCentralDifference) {
  gen::Rng rng(23);
  const double h = 1e-6;
  int checked = 0;
  for (int i = 0; i < 400; ++i) {
    const auto ast = gen::smooth_tree(rng, 4);
    const auto d = diff_t(ast);
    const auto p = gen::params(rng);
    const double x = gen::uniform(rng, -1, 1), t = gen::uniform(rng, -1, 1);
    double exact, fd, scale;
    try {
      exact = eval(d, x, t, p);
      fd = (eval(ast, x, t + h, p) - eval(ast, x, t - h, p)) / (2 * h);
      scale = std::max({std::abs(exact), std::abs(eval(ast, x, t, p)), 1.0});
    } catch (const evaluation_error&) {
      continue;
    }
    if (scale > 1e4) continue;  // finite-difference roundoff dominates there
    ++checked;
    ASSERT_NEAR(exact, fd, 1e-6 * scale) << to_string(ast);
  }
  EXPECT_GT(checked, 300);
}

TEST(ExprIntrospection, ParametersAndTimeDependence) {
  const auto ast = parse("a*exp(b*t) + sin(x)");
  EXPECT_EQ(parameters(ast), (std::set<std::string>{"a", "b"}));
  EXPECT_TRUE(depends_on_t(ast));
  EXPECT_FALSE(depends_on_t(parse("q*x + 2")));
}
