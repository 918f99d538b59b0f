#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "lantern/expr.hpp"

using namespace lantern::expr;

TEST_CASE("parsing and evaluation") {
  CHECK(eval(parse("u^2+v^2"), 3.0, 4.0) == doctest::Approx(25.0).epsilon(1e-15));
  CHECK(eval(parse("sin(pi*u)"), 0.5, 0.0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(eval(parse("1+2*3^2"), 0.0, 0.0) == 19.0);  // precedence: ^ then * then +
  CHECK(eval(parse("u"), 3.0, 4.0) == 3.0);
  CHECK(eval(parse("sqrt(u*u+v*v)"), 3.0, 4.0) == doctest::Approx(5.0).epsilon(1e-15));
  CHECK(eval(parse("  1 +  2 * u "), 2.0, 0.0) == 5.0);  // whitespace insensitive
  CHECK(eval(parse("2^3^2"), 0.0, 0.0) == 512.0);        // right associative
  CHECK(eval(parse("-2^2"), 0.0, 0.0) == -4.0);          // ^ binds tighter than unary -
  CHECK(eval(parse("2^-1"), 0.0, 0.0) == 0.5);
  CHECK(eval(parse("(1+2)*3"), 0.0, 0.0) == 9.0);
  CHECK(eval(parse("abs(-3)"), 0.0, 0.0) == 3.0);
  CHECK(eval(parse("sign(-2)"), 0.0, 0.0) == -1.0);
  CHECK(eval(parse("sign(0)"), 0.0, 0.0) == 0.0);
}

TEST_CASE("syntax errors carry the byte offset") {
  try {
    parse("1+*2");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.offset == 2);
  }
  try {
    parse("sin(u");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.offset == 5);
  }
  CHECK_THROWS_AS(parse("bogus(u)"), ParseError);
  CHECK_THROWS_AS(parse("1 2"), ParseError);
  CHECK_THROWS_AS(parse(""), ParseError);
}

TEST_CASE("domain errors name the subexpression") {
  CHECK_THROWS_AS(eval(parse("1/(u-1)"), 1.0, 0.0), EvalError);
  CHECK_THROWS_AS(eval(parse("log(u)"), -1.0, 0.0), EvalError);
  CHECK_THROWS_AS(eval(parse("log(u)"), 0.0, 0.0), EvalError);
  CHECK_THROWS_AS(eval(parse("sqrt(u)"), -1.0, 0.0), EvalError);
  CHECK_THROWS_AS(eval(parse("(-2)^0.5"), 0.0, 0.0), EvalError);
  CHECK(eval(parse("(-2)^3"), 0.0, 0.0) == -8.0);  // integer powers of negatives are fine
  try {
    eval(parse("1/(u-1)"), 1.0, 0.0);
  } catch (const EvalError& e) {
    CHECK(e.subexpression.find("u-1") != std::string::npos);
  }
}

TEST_CASE("gradient") {
  SUBCASE("polynomials differentiate structurally") {
    auto [du, dv] = gradient(parse("u^2+v^2"));
    for (double x : {-2.0, 0.0, 1.5})
      for (double y : {-1.0, 0.5}) {
        CHECK(eval(du, x, y) == doctest::Approx(2.0 * x).epsilon(1e-14));
        CHECK(eval(dv, x, y) == doctest::Approx(2.0 * y).epsilon(1e-14));
      }
  }

  SUBCASE("sin(u) gives (cos(u), 0)") {
    auto [du, dv] = gradient(parse("sin(u)"));
    CHECK(eval(du, 0.7, 0.0) == doctest::Approx(std::cos(0.7)).epsilon(1e-15));
    CHECK(eval(dv, 0.7, 123.0) == 0.0);
  }

  SUBCASE("matches central differences on random smooth expressions") {
    const char* samples[] = {
        "u*v + 3*u - v^2",
        "sin(u)*cos(v)",
        "exp(u/4)*v",
        "sqrt(u*u + v*v + 1)",
        "u^3 - 2*u*v + v^3/3",
        "1/(2 + sin(v))",
        "tan(u/3)",
        "log(2 + u*u)",
    };
    std::mt19937 rng(29);
    std::uniform_real_distribution<double> pt(-1.0, 1.0);
    const double h = 1e-6;
    for (const char* src : samples) {
      const auto e = parse(src);
      auto [du, dv] = gradient(e);
      for (int i = 0; i < 50; ++i) {
        const double x = pt(rng), y = pt(rng);
        const double fdu = (eval(e, x + h, y) - eval(e, x - h, y)) / (2.0 * h);
        const double fdv = (eval(e, x, y + h) - eval(e, x, y - h)) / (2.0 * h);
        CHECK(eval(du, x, y) == doctest::Approx(fdu).epsilon(1e-6).scale(1.0 + std::abs(fdu)));
        CHECK(eval(dv, x, y) == doctest::Approx(fdv).epsilon(1e-6).scale(1.0 + std::abs(fdv)));
      }
    }
  }

  SUBCASE("abs has subgradient 0 at the kink") {
    auto [du, dv] = gradient(parse("abs(u)"));
    CHECK(eval(du, 2.0, 0.0) == 1.0);
    CHECK(eval(du, -2.0, 0.0) == -1.0);
    CHECK(eval(du, 0.0, 0.0) == 0.0);
    CHECK(eval(dv, 5.0, 0.0) == 0.0);
  }

  SUBCASE("general exponent falls back to exp/log form") {
    auto [du, dv] = gradient(parse("u^v"));
    (void)dv;
    // d/du u^v = v u^(v-1)
    CHECK(eval(du, 2.0, 3.0) == doctest::Approx(12.0).epsilon(1e-12));
  }
}

TEST_CASE("print/parse round trip evaluates identically") {
  const char* samples[] = {
      "u^2+v^2",
      "-u^2",
      "2^3^2",
      "1-(2-3)",
      "8/(4/2)",
      "sin(pi*u)*cos(v)-tan(u/5)",
      "abs(u-v)+sign(v)",
      "exp(-(u^2+v^2))",
      "1/(2+u*u)",
      "-(u+v)*(u-v)",
  };
  std::mt19937 rng(31);
  std::uniform_real_distribution<double> pt(-0.9, 0.9);
  for (const char* src : samples) {
    const auto e = parse(src);
    const auto round = parse(print(e));
    CAPTURE(src);
    CAPTURE(print(e));
    for (int i = 0; i < 100; ++i) {
      const double x = pt(rng), y = pt(rng);
      const double a = eval(e, x, y);
      const double b = eval(round, x, y);
      CHECK(std::abs(a - b) <= 1e-15 * (1.0 + std::abs(a)));
    }
  }

  SUBCASE("gradient trees round trip too") {
    for (const char* src : {"u^2*sin(v)", "sqrt(1+u*u)", "u/(1+v*v)"}) {
      auto [du, dv] = gradient(parse(src));
      for (const auto& g : {du, dv}) {
        const auto round = parse(print(g));
        for (int i = 0; i < 50; ++i) {
          const double x = pt(rng), y = pt(rng);
          CHECK(eval(g, x, y) == doctest::Approx(eval(round, x, y)).epsilon(1e-15));
        }
      }
    }
  }
}
