// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "kolmo/error.hpp"
#include "kolmo/fd.hpp"
#include "kolmo/problems.hpp"
#include "kolmo/rng.hpp"
#include "kolmo/spaces.hpp"
#include "oracles.hpp"

using namespace kolmo;
using problem::CoefficientField;

TEST_CASE("polynomial weight") {
    const double p34[2] = {3.0, 4.0};
    CHECK(spaces::weight(1, std::span<const double>(p34, 2)) == doctest::Approx(26.0));
    const double origin[2] = {0.0, 0.0};
    CHECK(spaces::weight(2, std::span<const double>(origin, 2)) == 1.0);
    const double anywhere[2] = {17.0, -4.0};
    CHECK(spaces::weight(0, std::span<const double>(anywhere, 2)) == 1.0);
    CHECK_THROWS_AS(spaces::weight(-1, std::span<const double>(origin, 2)), Error);

    SUBCASE("even, >= 1, nondecreasing in |x|") {
        for (int q : {1, 2, 3}) {
            double prev = 0.0;
            for (int i = 0; i <= 40; ++i) {
                const double r = 0.25 * i;
                const double plus[1] = {r}, minus[1] = {-r};
                const double w = spaces::weight(q, std::span<const double>(plus, 1));
                CHECK(w == spaces::weight(q, std::span<const double>(minus, 1)));
                CHECK(w >= 1.0);
                CHECK(w >= prev);
                prev = w;
            }
        }
    }
    SUBCASE("analytic derivatives match finite differences") {
        for (int q : {1, 2, 3}) {
            const auto field = CoefficientField::family("weight(" + std::to_string(q) + ")", 2);
            for (int k = 0; k < 200; ++k) {
                double x[2] = {8 * rng::uniform01(5, 0, static_cast<std::uint64_t>(k)) - 4,
                               8 * rng::uniform01(5, 1, static_cast<std::uint64_t>(k)) - 4};
                std::span<const double> xs(x, 2);
                double ga[2], gf[2];
                field.gradient(0, xs, ga);
                field.fd_gradient(0, xs, gf);
                for (int i = 0; i < 2; ++i)
                    CHECK(ga[i] == doctest::Approx(gf[i]).epsilon(1e-5).scale(
                                       std::max(1.0, std::fabs(ga[i]))));
            }
        }
    }
    SUBCASE("|P^{-1} D^alpha P| <= C (1+|x|^2)^{-|alpha|/2} with a frozen C") {
        for (int q : {1, 2, 3}) {
            const double frozen_c = 5.0 * q * q;
            double g[1], h[1];
            for (int i = 0; i <= 400; ++i) {
                const double x = -20.0 + 0.1 * i;
                const double pt[1] = {x};
                std::span<const double> xs(pt, 1);
                const double P = spaces::weight(q, xs);
                spaces::weight_gradient(q, xs, g);
                spaces::weight_hessian(q, xs, h);
                const double s = 1.0 + x * x;
                CHECK(std::fabs(g[0]) / P * std::sqrt(s) <= frozen_c);
                CHECK(std::fabs(h[0]) / P * s <= frozen_c);
            }
        }
    }
}

TEST_CASE("Hoelder seminorm") {
    auto make = [](std::initializer_list<double> xs, std::initializer_list<double> vs) {
        std::vector<spaces::Sample> s;
        auto vi = vs.begin();
        for (double x : xs) s.push_back({{x}, *vi++});
        return s;
    };
    SUBCASE("constants give zero") {
        const auto s = make({0, 1, 2, 3}, {5, 5, 5, 5});
        CHECK(spaces::holder_seminorm(s, 0.5) == 0.0);
    }
    SUBCASE("f(x) = x on five points, beta = 1/2") {
        const auto s = make({0, 0.25, 0.5, 0.75, 1}, {0, 0.25, 0.5, 0.75, 1});
        CHECK(spaces::holder_seminorm(s, 0.5) == doctest::Approx(1.0).epsilon(1e-15));
    }
    SUBCASE("f(x) = sqrt(x), beta = 1/2: the pairs through 0 saturate") {
        const auto s = make({0, 0.01, 0.25, 1}, {0, 0.1, 0.5, 1});
        CHECK(spaces::holder_seminorm(s, 0.5) == doctest::Approx(1.0).epsilon(1e-15));
    }
    SUBCASE("matches the exhaustive brute force on a random cloud") {
        std::vector<spaces::Sample> s;
        std::vector<std::vector<double>> pts;
        std::vector<double> vals;
        for (int i = 0; i < 300; ++i) {
            const double x = 10 * rng::uniform01(6, 0, static_cast<std::uint64_t>(i)) - 5;
            const double y = 10 * rng::uniform01(6, 1, static_cast<std::uint64_t>(i)) - 5;
            const double v = std::sin(x) * y + 0.3 * x * x;
            s.push_back({{x, y}, v});
            pts.push_back({x, y});
            vals.push_back(v);
        }
        const double mine = spaces::holder_seminorm(s, 0.4);
        const double brute = oracles::brute_holder(pts, vals, 0.4);
        CHECK(mine == brute);  // identical arithmetic, identical result
    }
    SUBCASE("absolutely homogeneous and monotone under adding samples") {
        auto s = make({0, 0.3, 1.1, 2.0}, {1, -2, 0.4, 3});
        const double base = spaces::holder_seminorm(s, 0.7);
        auto scaled = s;
        for (auto& e : scaled) e.value *= -3.5;
        CHECK(spaces::holder_seminorm(scaled, 0.7) == doctest::Approx(3.5 * base).epsilon(1e-14));
        s.push_back({{4.0}, 9.0});
        CHECK(spaces::holder_seminorm(s, 0.7) >= base);
    }
    SUBCASE("rejects duplicates and tiny clouds") {
        auto s = make({1, 1}, {0, 2});
        CHECK_THROWS_AS(spaces::holder_seminorm(s, 0.5), Error);
        auto one = make({1}, {0});
        CHECK_THROWS_AS(spaces::holder_seminorm(one, 0.5), Error);
    }
}

TEST_CASE("weighted norms") {
    std::vector<double> lo = {-10.0}, hi = {10.0};
    const auto pts = spaces::norm_cloud(lo, hi, 41, 64);

    SUBCASE("f = P itself: sup term 1, seminorm 0") {
        const auto f = CoefficientField::family("weight(1)", 1);
        const auto cloud = spaces::DerivCloud::from_function(f, 0.0, pts, 0, "test cloud");
        const auto r = spaces::weighted_norm(cloud, 1, 0, 0.5, spaces::NormVariant::Standard);
        CHECK(r.value == doctest::Approx(1.0).epsilon(1e-14));
        CHECK(r.terms.at("[D(0)]_beta") == doctest::Approx(0.0).epsilon(1e-14));
    }
    SUBCASE("f = 0 vanishes in both variants") {
        const auto f = CoefficientField::family("const(0)", 1);
        const auto cloud = spaces::DerivCloud::from_function(f, 0.0, pts, 2, "test cloud");
        CHECK(spaces::weighted_norm(cloud, 1, 2, 0.5, spaces::NormVariant::Standard).value == 0.0);
        CHECK(spaces::weighted_norm(cloud, 1, 2, 0.5, spaces::NormVariant::TripleBar).value == 0.0);
    }
    SUBCASE("the two variants are equivalent within a recorded bracket") {
        const double kappa = 10.0;
        for (const char* src : {"quad(1)", "tanh_coord(1,1)", "weight(1)"}) {
            const auto f = CoefficientField::family(src, 1);
            const auto cloud = spaces::DerivCloud::from_function(f, 0.0, pts, 0, "test cloud");
            const double std_norm =
                spaces::weighted_norm(cloud, 1, 0, 0.5, spaces::NormVariant::Standard).value;
            const double bar_norm =
                spaces::weighted_norm(cloud, 1, 0, 0.5, spaces::NormVariant::TripleBar).value;
            CHECK(std_norm > 0.0);
            CHECK(bar_norm > 0.0);
            CHECK(std_norm / bar_norm <= kappa);
            CHECK(bar_norm / std_norm <= kappa);
        }
        const auto zero = CoefficientField::family("const(0)", 1);
        const auto zcloud = spaces::DerivCloud::from_function(zero, 0.0, pts, 0, "test cloud");
        CHECK(spaces::weighted_norm(zcloud, 1, 0, 0.5, spaces::NormVariant::Standard).value == 0.0);
        CHECK(spaces::weighted_norm(zcloud, 1, 0, 0.5, spaces::NormVariant::TripleBar).value ==
              0.0);
    }
    SUBCASE("quotient-rule derivatives of f/P match direct finite differences") {
        const auto f = CoefficientField::family("quad(1)", 1);  // x^2
        auto ratio = [](double x) { return x * x / (1.0 + x * x); };
        const auto cloud = spaces::DerivCloud::from_function(f, 0.0, pts, 2, "test cloud");
        // reconstruct the standard-variant first and second derivative values
        // at a probe point via the result's term breakdown is indirect; check
        // against the analytic forms instead on a few points
        for (double x : {0.5, 1.5, -2.0}) {
            const double g1 = 2 * x / ((1 + x * x) * (1 + x * x));
            const double h = 1e-5;
            const double g1_fd = (ratio(x + h) - ratio(x - h)) / (2 * h);
            CHECK(g1 == doctest::Approx(g1_fd).epsilon(1e-6));
        }
        // the norm itself: sup |x^2/P| = sup x^2/(1+x^2) < 1 on the cloud
        const auto r = spaces::weighted_norm(cloud, 1, 0, std::nullopt,
                                             spaces::NormVariant::Standard);
        CHECK(r.value < 1.0);
        CHECK(r.value > 0.98);
    }
    SUBCASE("json record carries variant, q, p, beta, value, terms, cloud") {
        const auto f = CoefficientField::family("quad(1)", 1);
        const auto cloud = spaces::DerivCloud::from_function(f, 0.0, pts, 0, "doc cloud");
        const auto j = spaces::weighted_norm(cloud, 1, 0, 0.5, spaces::NormVariant::TripleBar)
                           .to_json();
        CHECK(j.at("variant") == "triple_bar");
        CHECK(j.at("q") == 1);
        CHECK(j.at("p") == 0);
        CHECK(j.at("beta") == doctest::Approx(0.5));
        CHECK(j.at("cloud") == "doc cloud");
        CHECK(j.contains("terms"));
    }
}

TEST_CASE("transform_to_bounded") {
    const auto spec = problems::make_builtin_problem("heat");
    SUBCASE("q = 0 is rejected as the identity") {
        CHECK_THROWS_AS(spaces::transform_to_bounded(spec, 0), Error);
    }
    SUBCASE("heat family, q = 1: drift and potential terms") {
        const auto tspec = spaces::transform_to_bounded(spec, 1);
        const double x1[1] = {1.0};
        const auto co = problem::evaluate_coefficients(tspec, 0.3, std::span<const double>(x1, 1));
        // b~ = 2 a P'/P = 4x/(1+x^2) -> 2 at x=1; c~ = c - P''/P = 1 - 2/(1+x^2) -> 0
        CHECK(co.b[0] == doctest::Approx(2.0).epsilon(1e-14));
        CHECK(co.c == doctest::Approx(0.0).epsilon(1e-14));
        const double x0[1] = {0.0};
        const auto at0 = problem::evaluate_coefficients(tspec, 0.3, std::span<const double>(x0, 1));
        CHECK(at0.b[0] == doctest::Approx(0.0).epsilon(1e-14));
        CHECK(at0.c == doctest::Approx(-1.0).epsilon(1e-14));
        CHECK(tspec.c0 == doctest::Approx(-1.0).epsilon(0.05));  // sampled lower bound
        // h~ = x^2/(1+x^2)
        const double x2[1] = {2.0};
        CHECK(problem::evaluate_terminal(tspec, std::span<const double>(x2, 1)) ==
              doctest::Approx(0.8).epsilon(1e-14));
    }
    SUBCASE("h = P transforms to the constant 1") {
        auto base = spec;
        base.terminal = CoefficientField::family("weight(1)", 1);
        const auto tspec = spaces::transform_to_bounded(base, 1);
        for (double x : {-3.0, 0.0, 0.7, 5.0}) {
            const double pt[1] = {x};
            CHECK(problem::evaluate_terminal(tspec, std::span<const double>(pt, 1)) == 1.0);
        }
    }
    SUBCASE("already-transformed specs are rejected") {
        const auto tspec = spaces::transform_to_bounded(spec, 1);
        CHECK_THROWS_AS(spaces::transform_to_bounded(tspec, 1), Error);
    }
    SUBCASE("FD solve of the transformed problem recovers the heat oracle") {
        const auto tspec = spaces::transform_to_bounded(spec, 1);
        field::Box box;
        box.lo = {-6};
        box.hi = {6};
        box.nodes = {481};
        box.t1 = 0;
        box.t2 = 1;
        box.n_time = 400;
        // exact transformed boundary/terminal from the closed form of u
        const auto v_truth = [](double t, double x) {
            return oracles::heat_value(t, x) / (1.0 + x * x);
        };
        std::vector<double> terminal(static_cast<std::size_t>(box.slice_size()));
        for (std::int64_t s = 0; s < box.slice_size(); ++s)
            terminal[static_cast<std::size_t>(s)] = v_truth(1.0, box.coord(0, static_cast<int>(s)));
        const auto boundary = [&](double t, std::span<const double> x) {
            return v_truth(t, x[0]);
        };
        const auto v = fd::solve_dirichlet(tspec, box, terminal, boundary);
        double worst = 0;
        for (int k = 0; k <= box.n_time; ++k)
            for (std::int64_t s = 1; s + 1 < box.slice_size(); ++s) {
                const double x = box.coord(0, static_cast<int>(s));
                worst = std::max(worst,
                                 std::fabs(v.at(k, s) * (1 + x * x) - oracles::heat_value(box.time(k), x)));
            }
        CHECK(worst <= 5e-3);
    }
    SUBCASE("transform and gamma-shift commute bit-exactly") {
        const auto ab = problem::shift_zeroth_order(spaces::transform_to_bounded(spec, 1), 0.4);
        auto shifted_first = spaces::transform_to_bounded(problem::shift_zeroth_order(spec, 0.4), 1);
        // align the sampled c0 so only coefficient evaluations are compared
        shifted_first.c0 = ab.c0;
        for (int k = 0; k < 200; ++k) {
            const double t = rng::uniform01(9, 0, static_cast<std::uint64_t>(k));
            const double pt[1] = {12 * rng::uniform01(9, 1, static_cast<std::uint64_t>(k)) - 6};
            std::span<const double> xs(pt, 1);
            const auto a = problem::evaluate_coefficients(ab, t, xs);
            const auto b = problem::evaluate_coefficients(shifted_first, t, xs);
            CHECK(a.c == b.c);
            CHECK(a.f == b.f);
            CHECK(a.b[0] == b.b[0]);
            CHECK(problem::evaluate_terminal(ab, xs) == problem::evaluate_terminal(shifted_first, xs));
        }
    }
}
