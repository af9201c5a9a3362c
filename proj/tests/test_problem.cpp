// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "kolmo/error.hpp"
#include "kolmo/problem.hpp"
#include "kolmo/problem_io.hpp"
#include "kolmo/problems.hpp"
#include "kolmo/rng.hpp"

using namespace kolmo;
using problem::CoefficientField;
using problem::ProblemSpec;

TEST_CASE("a = sigma sigma^T / 2") {
    SUBCASE("scalar sqrt(2)") {
        const auto spec = problems::make_builtin_problem("heat");
        const double x[1] = {0.3};
        const auto co = problem::evaluate_coefficients(spec, 0.2, std::span<const double>(x, 1));
        CHECK(co.a[0] == doctest::Approx(1.0).epsilon(1e-15));
    }
    SUBCASE("rank-1 outer product, d=2 m=1") {
        ProblemSpec spec;
        spec.d = 2;
        spec.m = 1;
        spec.drift = {CoefficientField::family("const(0)", 2), CoefficientField::family("const(0)", 2)};
        spec.diffusion = {CoefficientField::family("const(1)", 2),
                          CoefficientField::family("const(0)", 2)};
        spec.potential = CoefficientField::family("const(1)", 2);
        spec.source = CoefficientField::family("const(0)", 2);
        spec.terminal = CoefficientField::family("const(1)", 2);
        spec.c0 = 1;
        const double x[2] = {1.0, 2.0};
        const auto co = problem::evaluate_coefficients(spec, 0.0, std::span<const double>(x, 2));
        CHECK(co.a[0] == doctest::Approx(0.5));
        CHECK(co.a[1] == 0.0);
        CHECK(co.a[2] == 0.0);
        CHECK(co.a[3] == 0.0);
    }
    SUBCASE("sigma = 1 + |x| at x = 3 gives a = 8") {
        auto spec = problems::make_builtin_problem("heat");
        spec.diffusion = {CoefficientField::family("linear_growth(1,1)", 1)};
        const double x[1] = {3.0};
        const auto co = problem::evaluate_coefficients(spec, 0.0, std::span<const double>(x, 1));
        CHECK(co.a[0] == doctest::Approx(8.0).epsilon(1e-15));
    }
    SUBCASE("symmetry within 4 ulps on an expression-based 2x2 diffusion") {
        ProblemSpec spec;
        spec.d = 2;
        spec.m = 2;
        spec.drift = {CoefficientField::family("const(0)", 2), CoefficientField::family("const(0)", 2)};
        spec.diffusion = {CoefficientField::expression("1 + 0.1*x1", 2),
                          CoefficientField::expression("0.2*x2", 2),
                          CoefficientField::expression("0.3 - 0.05*x1", 2),
                          CoefficientField::expression("1.1", 2)};
        spec.potential = CoefficientField::family("const(1)", 2);
        spec.source = CoefficientField::family("const(0)", 2);
        spec.terminal = CoefficientField::family("const(1)", 2);
        for (int k = 0; k < 50; ++k) {
            const double x[2] = {10 * rng::uniform01(2, 0, static_cast<std::uint64_t>(k)) - 5,
                                 10 * rng::uniform01(2, 1, static_cast<std::uint64_t>(k)) - 5};
            const auto co = problem::evaluate_coefficients(spec, 0.1, std::span<const double>(x, 2));
            CHECK(co.a[1] == co.a[2]);  // symmetric by construction
            // a - sigma sigma^T/2 entrywise
            for (int i = 0; i < 2; ++i)
                for (int j = 0; j < 2; ++j) {
                    double s = 0;
                    for (int kk = 0; kk < 2; ++kk)
                        s += co.sigma[static_cast<std::size_t>(i * 2 + kk)] *
                             co.sigma[static_cast<std::size_t>(j * 2 + kk)];
                    s *= 0.5;
                    CHECK(co.a[static_cast<std::size_t>(i * 2 + j)] ==
                          doctest::Approx(s).epsilon(1e-15));
                }
        }
    }
}

TEST_CASE("analytic gradients agree with central differences") {
    const char* families[] = {"quad(1.5)", "weight(2)", "linear_growth(1,1)", "tanh_coord(5,1)",
                              "linear(0.5,2,-1)"};
    for (const char* fam : families) {
        const auto field = CoefficientField::family(fam, 2);
        REQUIRE(field.has_analytic_gradient());
        double worst = 0;
        for (int k = 0; k < 1000; ++k) {
            double x[2] = {20 * rng::uniform01(7, 0, static_cast<std::uint64_t>(k)) - 10,
                           20 * rng::uniform01(7, 1, static_cast<std::uint64_t>(k)) - 10};
            // keep linear_growth away from its kink at the origin
            if (std::string(fam).rfind("linear_growth", 0) == 0 &&
                std::sqrt(x[0] * x[0] + x[1] * x[1]) < 0.1)
                x[0] += 0.5;
            std::span<const double> xs(x, 2);
            double ga[2], gf[2];
            field.gradient(0.3, xs, ga);
            field.fd_gradient(0.3, xs, gf);
            for (int i = 0; i < 2; ++i) {
                const double scale = std::max(1.0, std::fabs(ga[i]));
                worst = std::max(worst, std::fabs(ga[i] - gf[i]) / scale);
            }
        }
        CHECK(worst <= 1e-5);
    }
}

TEST_CASE("validate_assumptions") {
    const double lo[1] = {-5.0}, hi[1] = {5.0};
    SUBCASE("linear drift, unit diffusion: all BASIC entries pass") {
        ProblemSpec spec = problems::make_builtin_problem("heat");
        spec.drift = {CoefficientField::expression("x1", 1)};
        spec.diffusion = {CoefficientField::family("const(1)", 1)};
        spec.potential = CoefficientField::family("const(2)", 1);
        spec.c0 = 1.0;
        const auto rep = problem::validate_assumptions(spec, std::span<const double>(lo, 1),
                                                       std::span<const double>(hi, 1), 400,
                                                       problem::Profile::Basic);
        CHECK(rep.all_pass());
        CHECK(rep.find("K1-ellipticity")->constant == doctest::Approx(0.5));
        CHECK(rep.find("c-lower-bound")->constant == doctest::Approx(1.0));
    }
    SUBCASE("quadratic drift fails A2 near the box edge") {
        ProblemSpec spec = problems::make_builtin_problem("heat");
        spec.drift = {CoefficientField::expression("x1^2", 1)};
        const auto rep = problem::validate_assumptions(spec, std::span<const double>(lo, 1),
                                                       std::span<const double>(hi, 1), 400,
                                                       problem::Profile::Basic);
        const auto* a2 = rep.find("A2-linear-growth");
        REQUIRE(a2 != nullptr);
        CHECK_FALSE(a2->pass);
        REQUIRE(a2->worst_x.size() == 1);
        CHECK(std::fabs(a2->worst_x[0]) > 4.0);
    }
    SUBCASE("sigma = 1 + |x| passes the STRICT band") {
        ProblemSpec spec = problems::make_builtin_problem("heat");
        spec.diffusion = {CoefficientField::family("linear_growth(1,1)", 1)};
        const auto rep = problem::validate_assumptions(spec, std::span<const double>(lo, 1),
                                                       std::span<const double>(hi, 1), 400,
                                                       problem::Profile::Strict);
        const auto* band = rep.find("sigma-band");
        REQUIRE(band != nullptr);
        CHECK(band->pass);
        CHECK(band->constant >= 0.99);  // C1 estimate
    }
    SUBCASE("deterministic given the seed") {
        const auto spec = problems::make_builtin_problem("heat");
        const auto r1 = problem::validate_assumptions(spec, std::span<const double>(lo, 1),
                                                      std::span<const double>(hi, 1), 200,
                                                      problem::Profile::Basic, 99);
        const auto r2 = problem::validate_assumptions(spec, std::span<const double>(lo, 1),
                                                      std::span<const double>(hi, 1), 200,
                                                      problem::Profile::Basic, 99);
        REQUIRE(r1.entries.size() == r2.entries.size());
        for (std::size_t i = 0; i < r1.entries.size(); ++i)
            CHECK(r1.entries[i].constant == r2.entries[i].constant);
    }
}

TEST_CASE("zeroth-order shift") {
    const auto spec = problems::make_builtin_problem("heat");
    const double x[1] = {1.5};
    std::span<const double> xs(x, 1);

    SUBCASE("gamma = 0 is the identity") {
        const auto shifted = problem::shift_zeroth_order(spec, 0.0);
        const auto a = problem::evaluate_coefficients(spec, 0.4, xs);
        const auto b = problem::evaluate_coefficients(shifted, 0.4, xs);
        CHECK(a.c == b.c);
        CHECK(a.f == b.f);
        CHECK(problem::evaluate_terminal(spec, xs) == problem::evaluate_terminal(shifted, xs));
    }
    SUBCASE("c == 2, gamma = 1 gives c' == 1 and f' = e^{-t} f") {
        auto base = spec;
        base.potential = CoefficientField::family("const(2)", 1);
        base.source = CoefficientField::family("const(3)", 1);
        base.c0 = 2.0;
        const auto shifted = problem::shift_zeroth_order(base, 1.0);
        CHECK(shifted.c0 == doctest::Approx(1.0));
        const auto co = problem::evaluate_coefficients(shifted, 0.4, xs);
        CHECK(co.c == doctest::Approx(1.0));
        CHECK(co.f == doctest::Approx(3.0 * std::exp(-0.4)));
        CHECK(problem::evaluate_terminal(shifted, xs) ==
              doctest::Approx(problem::evaluate_terminal(base, xs) * std::exp(-base.T)));
    }
    SUBCASE("gamma then -gamma restores the spec exactly") {
        const auto twice = problem::shift_zeroth_order(problem::shift_zeroth_order(spec, 0.7), -0.7);
        CHECK(twice.gamma == 0.0);
        for (int k = 0; k < 50; ++k) {
            const double t = rng::uniform01(4, 0, static_cast<std::uint64_t>(k));
            const double p[1] = {8 * rng::uniform01(4, 1, static_cast<std::uint64_t>(k)) - 4};
            std::span<const double> ps(p, 1);
            const auto a = problem::evaluate_coefficients(spec, t, ps);
            const auto b = problem::evaluate_coefficients(twice, t, ps);
            CHECK(a.c == b.c);
            CHECK(a.f == b.f);
        }
    }
}

TEST_CASE("problem file round-trip") {
    for (const auto& name : problems::builtin_problem_names()) {
        const auto spec = problems::make_builtin_problem(name);
        const std::string text = problem::write_problem(spec);
        const auto back = problem::read_problem(text);
        CHECK(problem::write_problem(back) == text);
        for (int k = 0; k < 20; ++k) {
            const double t = rng::uniform01(8, 0, static_cast<std::uint64_t>(k));
            const double p[1] = {10 * rng::uniform01(8, 1, static_cast<std::uint64_t>(k)) - 5};
            std::span<const double> ps(p, 1);
            const auto a = problem::evaluate_coefficients(spec, t, ps);
            const auto b = problem::evaluate_coefficients(back, t, ps);
            CHECK(a.c == b.c);
            CHECK(a.f == b.f);
            CHECK(a.b[0] == b.b[0]);
            CHECK(a.sigma[0] == b.sigma[0]);
            CHECK(problem::evaluate_terminal(spec, ps) == problem::evaluate_terminal(back, ps));
        }
    }
    CHECK_THROWS_AS(problem::read_problem("[dimensions]\nd = 1\n"), Error);
}

TEST_CASE("shape validation") {
    ProblemSpec spec = problems::make_builtin_problem("heat");
    spec.T = 0.0;
    CHECK_THROWS_AS(spec.validate_shape(), Error);
    spec = problems::make_builtin_problem("heat");
    spec.q = -1;
    CHECK_THROWS_AS(spec.validate_shape(), Error);
    spec = problems::make_builtin_problem("heat");
    spec.drift.clear();
    CHECK_THROWS_AS(spec.validate_shape(), Error);
}
