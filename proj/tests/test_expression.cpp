// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "kolmo/error.hpp"
#include "kolmo/expression.hpp"
#include "kolmo/rng.hpp"

using kolmo::problem::ExpressionTree;

namespace {
double eval1(const ExpressionTree& e, double t, double x) {
    const double pt[1] = {x};
    return e.eval(t, std::span<const double>(pt, 1));
}
}  // namespace

TEST_CASE("basic arithmetic") {
    CHECK(eval1(ExpressionTree::parse("x1^2 + 1", 1), 0, 2) == doctest::Approx(5.0));
    CHECK(eval1(ExpressionTree::parse("exp(-t)*x1", 1), 0, 3) == doctest::Approx(3.0));
    CHECK(eval1(ExpressionTree::parse("2+3*4^2", 1), 0, 0) == doctest::Approx(50.0));
    CHECK(eval1(ExpressionTree::parse("-2^2", 1), 0, 0) == doctest::Approx(-4.0));
    CHECK(eval1(ExpressionTree::parse("2^-2", 1), 0, 0) == doctest::Approx(0.25));
    CHECK(eval1(ExpressionTree::parse("2^3^2", 1), 0, 0) == doctest::Approx(512.0));
    CHECK(eval1(ExpressionTree::parse("min(3, t) + max(2, x1)", 1), 7, 1) == doctest::Approx(5.0));
    CHECK(eval1(ExpressionTree::parse("abs(-x1) + sqrt(4)", 1), 0, -3) == doctest::Approx(5.0));
    CHECK(eval1(ExpressionTree::parse("tanh(0) + sin(0) + cos(0)", 1), 0, 0) ==
          doctest::Approx(1.0));
}

TEST_CASE("malformed input reports a position") {
    using kolmo::ParseError;
    CHECK_THROWS_AS(ExpressionTree::parse("x1 + (x2", 2), ParseError);
    try {
        ExpressionTree::parse("x1 + (x2", 2);
    } catch (const ParseError& e) {
        CHECK(e.position == 5);  // the unbalanced parenthesis
    }
    CHECK_THROWS_AS(ExpressionTree::parse("x3", 2), ParseError);
    CHECK_THROWS_AS(ExpressionTree::parse("foo(1)", 1), ParseError);
    CHECK_THROWS_AS(ExpressionTree::parse("y + 1", 1), ParseError);
    CHECK_THROWS_AS(ExpressionTree::parse("", 1), ParseError);
    CHECK_THROWS_AS(ExpressionTree::parse("1 +", 1), ParseError);
    CHECK_THROWS_AS(ExpressionTree::parse("min(1)", 1), ParseError);
}

TEST_CASE("domain violations raise EvalError") {
    using kolmo::EvalError;
    auto log_neg = ExpressionTree::parse("log(x1)", 1);
    CHECK_THROWS_AS(eval1(log_neg, 0, -1), EvalError);
    auto sqrt_neg = ExpressionTree::parse("sqrt(x1)", 1);
    CHECK_THROWS_AS(eval1(sqrt_neg, 0, -1), EvalError);
    auto div0 = ExpressionTree::parse("1/x1", 1);
    CHECK_THROWS_AS(eval1(div0, 0, 0), EvalError);
    auto bad_pow = ExpressionTree::parse("x1^0.5", 1);
    CHECK_THROWS_AS(eval1(bad_pow, 0, -2), EvalError);
    auto zero_neg_pow = ExpressionTree::parse("x1^-1", 1);
    CHECK_THROWS_AS(eval1(zero_neg_pow, 0, 0), EvalError);
}

TEST_CASE("print / reparse round-trip evaluates identically") {
    const char* sources[] = {
        "x1^2 + 1",
        "exp(-t)*x1 - 3/(x2 + 10)",
        "min(x1, max(t, x2)) * tanh(x1 - x2)",
        "-x1^3 + 2.5e-1*x2 - sqrt(abs(x1))",
    };
    for (const char* src : sources) {
        const auto tree = ExpressionTree::parse(src, 2);
        const auto round = ExpressionTree::parse(tree.to_string(), 2);
        for (int i = 0; i < 100; ++i) {
            const double t = kolmo::rng::uniform01(1, 0, static_cast<std::uint64_t>(i));
            const double pt[2] = {
                20.0 * kolmo::rng::uniform01(1, 1, static_cast<std::uint64_t>(i)) - 10.0,
                20.0 * kolmo::rng::uniform01(1, 2, static_cast<std::uint64_t>(i)) - 10.0};
            std::span<const double> x(pt, 2);
            CHECK(tree.eval(t, x) == round.eval(t, x));
        }
    }
}
