// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "kolmo/error.hpp"
#include "kolmo/fd.hpp"
#include "kolmo/problems.hpp"
#include "oracles.hpp"

using namespace kolmo;
using problem::CoefficientField;
using problem::ProblemSpec;

namespace {

field::Box box1d(double lo, double hi, int nodes, double t1, double t2, int nt) {
    field::Box box;
    box.lo = {lo};
    box.hi = {hi};
    box.nodes = {nodes};
    box.t1 = t1;
    box.t2 = t2;
    box.n_time = nt;
    return box;
}

std::vector<double> sample_terminal(const ProblemSpec& spec, const field::Box& box) {
    std::vector<double> out(static_cast<std::size_t>(box.slice_size()));
    std::vector<double> pt(static_cast<std::size_t>(box.dim()));
    for (std::int64_t s = 0; s < box.slice_size(); ++s) {
        box.spatial_point(s, pt);
        out[static_cast<std::size_t>(s)] = problem::evaluate_terminal(spec, pt);
    }
    return out;
}

double max_interior_error(const field::Field& u, const std::function<double(double, double)>& truth) {
    double worst = 0;
    for (int k = 0; k <= u.box.n_time; ++k) {
        for (std::int64_t s = 1; s + 1 < u.box.slice_size(); ++s) {
            const double x = u.box.coord(0, static_cast<int>(s));
            worst = std::max(worst, std::fabs(u.at(k, s) - truth(u.box.time(k), x)));
        }
    }
    return worst;
}

}  // namespace

TEST_CASE("spatially constant solution follows the theta-rule to 1e-10 on a fine time grid") {
    const auto spec = problems::make_builtin_problem("constant");  // c = 1, f = 0, h = 2.5
    const auto box = box1d(-2, 2, 11, 0.0, 1.0, 50000);
    const auto boundary = [&](double t, std::span<const double>) {
        return 2.5 * std::exp(-(box.t2 - t));
    };
    const auto u = fd::solve_dirichlet(spec, box, sample_terminal(spec, box), boundary);
    const double err = max_interior_error(
        u, [&](double t, double) { return 2.5 * std::exp(-(box.t2 - t)); });
    CHECK(err <= 1e-10);
}

TEST_CASE("heat family on [-6,6] with the analytic boundary") {
    const auto spec = problems::make_builtin_problem("heat");
    const auto oracle = [](double t, double x) { return oracles::heat_value(t, x); };
    const auto boundary = [&](double t, std::span<const double> x) {
        return oracles::heat_value(t, x[0]);
    };

    const auto box = box1d(-6, 6, 241, 0.0, 1.0, 200);
    fd::SolveDiagnostics diag;
    const auto u = fd::solve_dirichlet(spec, box, sample_terminal(spec, box), boundary, {}, &diag);
    const double err = max_interior_error(u, oracle);
    CHECK(err <= 2e-3);
    CHECK(diag.peclet_ok);

    SUBCASE("halving dx and dt shrinks the error by at least 3") {
        const auto coarse_box = box1d(-6, 6, 121, 0.0, 1.0, 100);
        const auto coarse =
            fd::solve_dirichlet(spec, coarse_box, sample_terminal(spec, coarse_box), boundary);
        const double coarse_err = max_interior_error(coarse, oracle);
        CHECK(coarse_err / err >= 3.0);
    }

    SUBCASE("residual of the FD solution shrinks under refinement") {
        const auto res_fine = fd::residual(spec, u);
        double fine_max = 0;
        for (double v : res_fine.values) fine_max = std::max(fine_max, std::fabs(v));
        const auto coarse_box = box1d(-6, 6, 121, 0.0, 1.0, 100);
        const auto coarse =
            fd::solve_dirichlet(spec, coarse_box, sample_terminal(spec, coarse_box), boundary);
        const auto res_coarse = fd::residual(spec, coarse);
        double coarse_max = 0;
        for (double v : res_coarse.values) coarse_max = std::max(coarse_max, std::fabs(v));
        CHECK(fine_max < coarse_max);
    }
}

TEST_CASE("observed spatial order on a non-polynomial solution") {
    // h = tanh(5x) smoothed by the heat flow; time error pinned far below the
    // spatial one by Crank-Nicolson on a fine time grid
    const auto spec = problems::make_builtin_problem("smoothing");
    auto h = [](double y) { return std::tanh(5.0 * y); };
    auto oracle = [&](double t, double x) {
        return oracles::gauss_smoothed(h, x, 2.0 * (1.0 - t), std::exp(-(1.0 - t)));
    };
    const auto boundary = [&](double t, std::span<const double> x) { return oracle(t, x[0]); };

    auto run = [&](int nodes) {
        const auto box = box1d(-6, 6, nodes, 0.0, 1.0, 2000);
        const auto u = fd::solve_dirichlet(spec, box, sample_terminal(spec, box), boundary);
        // compare on the slice t = 0 over the middle of the box
        double worst = 0;
        for (std::int64_t s = 0; s < box.slice_size(); ++s) {
            const double x = box.coord(0, static_cast<int>(s));
            if (std::fabs(x) > 3.0) continue;
            worst = std::max(worst, std::fabs(u.at(0, s) - oracle(0.0, x)));
        }
        return worst;
    };

    const double e_coarse = run(201);
    const double e_fine = run(401);
    const double order = std::log2(e_coarse / e_fine);
    CHECK(order >= 1.9);
}

TEST_CASE("stationary balance f = c K is reproduced exactly") {
    auto spec = problems::make_builtin_problem("heat");
    spec.source = CoefficientField::family("const(2.5)", 1);    // c = 1, K = 2.5
    spec.terminal = CoefficientField::family("const(2.5)", 1);
    const auto box = box1d(-3, 3, 31, 0.0, 1.0, 100);
    const auto boundary = [](double, std::span<const double>) { return 2.5; };
    const auto u = fd::solve_dirichlet(spec, box, sample_terminal(spec, box), boundary);
    for (double v : u.values) CHECK(v == doctest::Approx(2.5).epsilon(1e-12));
}

TEST_CASE("residual") {
    SUBCASE("time-constant x^2 with a=1, b=c=f=0 gives exactly 2") {
        auto spec = problems::make_builtin_problem("heat");
        spec.potential = CoefficientField::family("const(0)", 1);
        spec.c0 = 0.0;
        const auto box = box1d(-2, 2, 21, 0.0, 1.0, 4);
        auto u = field::Field::zeros(box, "analytic");
        for (int k = 0; k <= box.n_time; ++k)
            for (std::int64_t s = 0; s < box.slice_size(); ++s) {
                const double x = box.coord(0, static_cast<int>(s));
                u.at(k, s) = x * x;
            }
        const auto res = fd::residual(spec, u);
        for (double v : res.values) CHECK(v == doctest::Approx(2.0).epsilon(1e-12));
    }
    SUBCASE("constant field with c K = f is an exact zero") {
        auto spec = problems::make_builtin_problem("heat");
        spec.source = CoefficientField::family("const(2.5)", 1);
        const auto box = box1d(-2, 2, 11, 0.0, 1.0, 4);
        auto u = field::Field::zeros(box, "analytic");
        for (auto& v : u.values) v = 2.5;
        const auto res = fd::residual(spec, u);
        for (double v : res.values) CHECK(v == 0.0);
    }
    SUBCASE("analytic heat solution: residual is O(dt^2) and refines") {
        const auto spec = problems::make_builtin_problem("heat");
        auto sample = [&](int nt) {
            const auto box = box1d(-4, 4, 41, 0.0, 1.0, nt);
            auto u = field::Field::zeros(box, "analytic");
            for (int k = 0; k <= box.n_time; ++k)
                for (std::int64_t s = 0; s < box.slice_size(); ++s)
                    u.at(k, s) = oracles::heat_value(box.time(k), box.coord(0, static_cast<int>(s)));
            const auto res = fd::residual(spec, u);
            double worst = 0;
            for (double v : res.values) worst = std::max(worst, std::fabs(v));
            return worst;
        };
        const double coarse = sample(50);
        const double fine = sample(100);
        CHECK(coarse <= 5e-2);
        CHECK(coarse / fine >= 3.0);
    }
}

TEST_CASE("two space dimensions") {
    SUBCASE("isotropic heat: u = e^{-tau}(|x|^2 + 4 tau)") {
        ProblemSpec spec;
        spec.name = "heat2d";
        spec.d = 2;
        spec.m = 2;
        spec.drift = {CoefficientField::family("const(0)", 2),
                      CoefficientField::family("const(0)", 2)};
        spec.diffusion = {CoefficientField::family("const(1.4142135623730951)", 2),
                          CoefficientField::family("const(0)", 2),
                          CoefficientField::family("const(0)", 2),
                          CoefficientField::family("const(1.4142135623730951)", 2)};
        spec.potential = CoefficientField::family("const(1)", 2);
        spec.source = CoefficientField::family("const(0)", 2);
        spec.terminal = CoefficientField::family("quad(1)", 2);
        spec.c0 = 1;
        spec.q = 1;
        auto truth = [](double t, double x, double y) {
            const double tau = 1.0 - t;
            return std::exp(-tau) * (x * x + y * y + 4.0 * tau);
        };
        field::Box box;
        box.lo = {-3, -3};
        box.hi = {3, 3};
        box.nodes = {31, 31};
        box.t1 = 0;
        box.t2 = 1;
        box.n_time = 50;
        const auto boundary = [&](double t, std::span<const double> x) {
            return truth(t, x[0], x[1]);
        };
        const auto u = fd::solve_dirichlet(spec, box, sample_terminal(spec, box), boundary);
        double worst = 0;
        std::vector<double> pt(2);
        for (int k = 0; k <= box.n_time; ++k)
            for (std::int64_t s = 0; s < box.slice_size(); ++s) {
                if (box.is_spatial_boundary(s)) continue;
                box.spatial_point(s, pt);
                worst = std::max(worst,
                                 std::fabs(u.at(k, s) - truth(box.time(k), pt[0], pt[1])));
            }
        CHECK(worst <= 5e-3);
    }
    SUBCASE("cross-derivative terms against a manufactured quadratic") {
        // sigma rows (1, 0.6), (0.6, 1): a11 = a22 = 0.68, a12 = 0.6
        // u* = e^{-tau}(x^2 + xy + y^2) solves the equation with
        // f = -2 (a11 + a12 + a22) e^{-tau} = -3.92 e^{t-1}
        ProblemSpec spec;
        spec.name = "cross2d";
        spec.d = 2;
        spec.m = 2;
        spec.drift = {CoefficientField::family("const(0)", 2),
                      CoefficientField::family("const(0)", 2)};
        spec.diffusion = {CoefficientField::family("const(1)", 2),
                          CoefficientField::family("const(0.6)", 2),
                          CoefficientField::family("const(0.6)", 2),
                          CoefficientField::family("const(1)", 2)};
        spec.potential = CoefficientField::family("const(1)", 2);
        spec.source = CoefficientField::expression("-3.92*exp(t - 1)", 2);
        spec.terminal = CoefficientField::expression("x1^2 + x1*x2 + x2^2", 2);
        spec.c0 = 1;
        auto truth = [](double t, double x, double y) {
            return std::exp(-(1.0 - t)) * (x * x + x * y + y * y);
        };
        field::Box box;
        box.lo = {-2, -2};
        box.hi = {2, 2};
        box.nodes = {21, 21};
        box.t1 = 0;
        box.t2 = 1;
        box.n_time = 50;
        const auto boundary = [&](double t, std::span<const double> x) {
            return truth(t, x[0], x[1]);
        };
        const auto u = fd::solve_dirichlet(spec, box, sample_terminal(spec, box), boundary);
        double worst = 0;
        std::vector<double> pt(2);
        for (int k = 0; k <= box.n_time; ++k)
            for (std::int64_t s = 0; s < box.slice_size(); ++s) {
                if (box.is_spatial_boundary(s)) continue;
                box.spatial_point(s, pt);
                worst = std::max(worst,
                                 std::fabs(u.at(k, s) - truth(box.time(k), pt[0], pt[1])));
            }
        CHECK(worst <= 5e-3);
    }
}

TEST_CASE("discrete maximum principle with theta = 1 and nonpositive data") {
    auto spec = problems::make_builtin_problem("bounded_h");
    spec.terminal = CoefficientField::family("const(-1)", 1);
    const auto box = box1d(-4, 4, 41, 0.0, 1.0, 60);
    const auto boundary = [&](double t, std::span<const double>) {
        return -std::exp(-(box.t2 - t));
    };
    fd::SolveOptions opts;
    opts.theta = 1.0;
    const auto u = fd::solve_dirichlet(spec, box, sample_terminal(spec, box), boundary, opts);
    for (double v : u.values) CHECK(v <= 1e-12);
}

TEST_CASE("solver guards") {
    const auto spec = problems::make_builtin_problem("heat");
    const auto box = box1d(-2, 2, 11, 0.0, 1.0, 10);
    const auto boundary = [](double, std::span<const double>) { return 0.0; };
    SUBCASE("theta outside [1/2, 1]") {
        fd::SolveOptions opts;
        opts.theta = 0.25;
        CHECK_THROWS_AS(
            fd::solve_dirichlet(spec, box, sample_terminal(spec, box), boundary, opts), Error);
    }
    SUBCASE("terminal size mismatch") {
        std::vector<double> bad(3, 0.0);
        CHECK_THROWS_AS(fd::solve_dirichlet(spec, box, bad, boundary), Error);
    }
    SUBCASE("degenerate diffusion is refused") {
        auto degenerate = spec;
        degenerate.diffusion = {CoefficientField::family("const(0)", 1)};
        CHECK_THROWS_AS(
            fd::solve_dirichlet(degenerate, box, sample_terminal(degenerate, box), boundary),
            Error);
    }
    SUBCASE("a large mesh Peclet number is reported") {
        auto advective = spec;
        advective.drift = {CoefficientField::family("const(50)", 1)};
        const auto wide = box1d(-2, 2, 9, 0.0, 1.0, 10);  // dx = 0.5
        fd::SolveDiagnostics diag;
        fd::solve_dirichlet(advective, wide, sample_terminal(advective, wide), boundary, {},
                            &diag);
        CHECK_FALSE(diag.peclet_ok);
        CHECK_FALSE(diag.warnings.empty());
    }
}

TEST_CASE("localized cross check") {
    SUBCASE("constant data: FD and MC agree to the fine-grid allowance") {
        const auto spec = problems::make_builtin_problem("constant");
        const auto box = box1d(-2, 2, 11, 0.0, 1.0, 5000);
        fd::CrossCheckParams params;
        params.interior_mc = {4000, 50, 21, false, 0};
        params.boundary_mc = {2000, 50, 22, false, 0};
        params.anchor_times = 101;
        params.n_probes = 6;
        params.allowance = 1e-6;
        const auto check = fd::localized_cross_check(spec, box, params);
        CHECK(check.pass);
    }
    SUBCASE("heat family passes at desk budgets") {
        const auto spec = problems::make_builtin_problem("heat");
        const auto box = box1d(-4, 4, 81, 0.0, 1.0, 200);
        fd::CrossCheckParams params;
        params.interior_mc = {30000, 200, 31, false, 0};
        params.boundary_mc = {20000, 100, 32, false, 0};
        params.anchor_times = 13;
        params.n_probes = 9;
        params.allowance = 5e-3;
        const auto check = fd::localized_cross_check(spec, box, params);
        CHECK(check.pass);

        // negative control: corrupting the FD potential must break the identity
        params.corrupt_potential = 0.5;
        const auto corrupted = fd::localized_cross_check(spec, box, params);
        CHECK_FALSE(corrupted.pass);
    }
}
