#include <catch2/catch_amalgamated.hpp>

#include "phg/expr.hpp"

using phg::ScalarExpr;

TEST_CASE("numbers, variables, and arithmetic evaluate correctly") {
  CHECK(ScalarExpr::parse("2+3*4").eval(std::vector<double>{}) == 14.0);
  CHECK(ScalarExpr::parse("(2+3)*4").eval(std::vector<double>{}) == 20.0);
  CHECK(ScalarExpr::parse("x1-x2/2").eval(std::vector<double>{3.0, 4.0}) == 1.0);
  CHECK(ScalarExpr::parse("x2^3").eval(std::vector<double>{0.0, 2.0}) == 8.0);
  CHECK(ScalarExpr::parse("-x1^2").eval(std::vector<double>{3.0}) == -9.0);
  CHECK(ScalarExpr::parse("0.5*cos(x1)").eval(std::vector<double>{0.0}) == 0.5);
}

TEST_CASE("whitespace is insignificant") {
  auto a = ScalarExpr::parse("1+x1*sin(x2)");
  auto b = ScalarExpr::parse("  1 + x1 * sin( x2 ) ");
  std::vector<double> p{0.7, -0.3};
  CHECK(a.eval(p) == b.eval(p));
}

TEST_CASE("function library matches the standard library") {
  std::vector<double> p{0.37};
  CHECK(ScalarExpr::parse("sin(x1)").eval(p) == std::sin(0.37));
  CHECK(ScalarExpr::parse("cos(x1)").eval(p) == std::cos(0.37));
  CHECK(ScalarExpr::parse("exp(x1)").eval(p) == std::exp(0.37));
  CHECK(ScalarExpr::parse("log(x1)").eval(p) == std::log(0.37));
  CHECK(ScalarExpr::parse("sqrt(x1)").eval(p) == std::sqrt(0.37));
  CHECK(ScalarExpr::parse("tanh(x1)").eval(p) == std::tanh(0.37));
}

TEST_CASE("malformed input raises ParseError with a position") {
  try {
    ScalarExpr::parse("sin(x1");
    FAIL("expected ParseError");
  } catch (const phg::ParseError& e) {
    CHECK(e.pos >= 6);  // the unclosed parenthesis is noticed at end of input
  }
  CHECK_THROWS_AS(ScalarExpr::parse("1+*2"), phg::ParseError);
  CHECK_THROWS_AS(ScalarExpr::parse("x0"), phg::ParseError);
  CHECK_THROWS_AS(ScalarExpr::parse("x1^x2"), phg::ParseError);  // integer exponents only
  CHECK_THROWS_AS(ScalarExpr::parse("foo(x1)"), phg::ParseError);
  CHECK_THROWS_AS(ScalarExpr::parse(""), phg::ParseError);
}

TEST_CASE("domain violations raise DomainError at evaluation time") {
  CHECK_THROWS_AS(ScalarExpr::parse("1/x1").eval(std::vector<double>{0.0}), phg::DomainError);
  CHECK_THROWS_AS(ScalarExpr::parse("log(x1)").eval(std::vector<double>{-1.0}), phg::DomainError);
  CHECK_THROWS_AS(ScalarExpr::parse("log(x1)").eval(std::vector<double>{0.0}), phg::DomainError);
  CHECK_THROWS_AS(ScalarExpr::parse("sqrt(x1)").eval(std::vector<double>{-0.5}), phg::DomainError);
}

TEST_CASE("max_var reports the highest referenced coordinate") {
  CHECK(ScalarExpr::parse("1").max_var() == 0);
  CHECK(ScalarExpr::parse("x1*x3").max_var() == 3);
}
