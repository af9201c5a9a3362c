// SPDX-License-Identifier: Apache-2.0
//
// Command-line front end: Monte-Carlo estimation (point and grid), pathwise
// gradients, localized finite-difference solves, weighted norms, the
// verification suite, and strong-convergence studies.

#include <cstdio>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "kolmo/harness.hpp"
#include "kolmo/problem_io.hpp"
#include "kolmo/problems.hpp"

namespace {

using namespace kolmo;

problem::ProblemSpec load_problem(const std::string& file, const std::string& builtin) {
    if (!file.empty()) return problem::read_problem_file(file);
    if (!builtin.empty()) return problems::make_builtin_problem(builtin);
    throw Error("give either --problem FILE or --builtin NAME");
}

std::vector<double> parse_point(const std::string& text, int d) {
    std::vector<double> x;
    std::size_t pos = 0;
    while (pos < text.size()) {
        auto comma = text.find(',', pos);
        if (comma == std::string::npos) comma = text.size();
        x.push_back(std::strtod(text.substr(pos, comma - pos).c_str(), nullptr));
        pos = comma + 1;
    }
    if (static_cast<int>(x.size()) != d)
        throw Error("point has " + std::to_string(x.size()) + " coordinates, problem needs " +
                    std::to_string(d));
    return x;
}

// "lo:hi:n" per axis, comma separated
field::Box parse_box(const std::string& text, double t1, double t2, int n_time) {
    field::Box box;
    std::size_t pos = 0;
    while (pos < text.size()) {
        auto comma = text.find(',', pos);
        if (comma == std::string::npos) comma = text.size();
        const std::string axis = text.substr(pos, comma - pos);
        double lo, hi;
        int n;
        if (std::sscanf(axis.c_str(), "%lf:%lf:%d", &lo, &hi, &n) != 3)
            throw Error("malformed box axis '" + axis + "', expected lo:hi:n");
        box.lo.push_back(lo);
        box.hi.push_back(hi);
        box.nodes.push_back(n);
        pos = comma + 1;
    }
    box.t1 = t1;
    box.t2 = t2;
    box.n_time = n_time;
    box.validate();
    return box;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Feynman-Kac / finite-difference toolkit for backward Kolmogorov problems"};
    app.require_subcommand(1);

    std::string problem_file, builtin;
    int workers = 0;
    app.add_option("--workers", workers, "worker threads (0 = default)")->capture_default_str();

    auto add_problem_opts = [&](CLI::App* cmd) {
        cmd->add_option("--problem", problem_file, "problem file");
        cmd->add_option("--builtin", builtin, "built-in problem name");
    };

    // ---- estimate ----------------------------------------------------------
    auto* est = app.add_subcommand("estimate", "Monte-Carlo value estimate (point or grid)");
    add_problem_opts(est);
    std::string x_text = "0";
    double t = 0.0;
    sde::McParams mc;
    std::string grid_text, out_path;
    double grid_t1 = 0.0, grid_t2 = 1.0;
    int grid_nt = 10;
    est->add_option("--t", t, "evaluation time");
    est->add_option("--x", x_text, "point, comma separated");
    est->add_option("--paths", mc.n_paths)->capture_default_str();
    est->add_option("--steps", mc.n_steps)->capture_default_str();
    est->add_option("--seed", mc.seed)->capture_default_str();
    est->add_flag("--antithetic", mc.antithetic);
    est->add_option("--grid", grid_text, "space grid lo:hi:n[,lo:hi:n...] (grid mode)");
    est->add_option("--t1", grid_t1)->capture_default_str();
    est->add_option("--t2", grid_t2)->capture_default_str();
    est->add_option("--nt", grid_nt)->capture_default_str();
    est->add_option("--out", out_path, "CSV output path (grid mode)");

    // ---- gradient ----------------------------------------------------------
    auto* grad = app.add_subcommand("gradient", "pathwise first-variation gradient estimate");
    add_problem_opts(grad);
    grad->add_option("--t", t);
    grad->add_option("--x", x_text);
    grad->add_option("--paths", mc.n_paths);
    grad->add_option("--steps", mc.n_steps);
    grad->add_option("--seed", mc.seed);

    // ---- solve -------------------------------------------------------------
    auto* solve = app.add_subcommand("solve", "finite-difference Cauchy-Dirichlet solve");
    add_problem_opts(solve);
    std::string box_text = "-6:6:241";
    double theta = 0.5;
    std::int64_t boundary_paths = 20000;
    int boundary_steps = 100, anchors = 13;
    solve->add_option("--box", box_text, "space box lo:hi:n[,...]")->capture_default_str();
    solve->add_option("--t1", grid_t1)->capture_default_str();
    solve->add_option("--t2", grid_t2)->capture_default_str();
    solve->add_option("--nt", grid_nt, "time steps")->capture_default_str();
    solve->add_option("--theta", theta, "scheme parameter in [1/2, 1]")->capture_default_str();
    solve->add_option("--boundary-paths", boundary_paths)->capture_default_str();
    solve->add_option("--boundary-steps", boundary_steps)->capture_default_str();
    solve->add_option("--anchors", anchors, "boundary anchor times")->capture_default_str();
    solve->add_option("--seed", mc.seed);
    solve->add_option("--out", out_path, "CSV output path");

    // ---- norms -------------------------------------------------------------
    auto* norms = app.add_subcommand("norms", "weighted Hoelder norms of problem data");
    add_problem_opts(norms);
    std::string target = "terminal", variant = "standard";
    int norm_q = -1, norm_p = 0, per_axis = 41, fill = 96;
    double beta = 0.5, norm_t = 0.0;
    double cloud_lo = -8.0, cloud_hi = 8.0;
    bool no_beta = false;
    norms->add_option("--target", target, "terminal | source | potential");
    norms->add_option("--q", norm_q, "weight exponent (default: problem q)");
    norms->add_option("--p", norm_p)->capture_default_str();
    norms->add_option("--beta", beta)->capture_default_str();
    norms->add_flag("--no-beta", no_beta, "omit the Hoelder seminorm terms");
    norms->add_option("--variant", variant, "standard | triple_bar");
    norms->add_option("--t", norm_t, "time at which to sample t-dependent data");
    norms->add_option("--cloud-lo", cloud_lo)->capture_default_str();
    norms->add_option("--cloud-hi", cloud_hi)->capture_default_str();
    norms->add_option("--per-axis", per_axis)->capture_default_str();
    norms->add_option("--fill", fill)->capture_default_str();

    // ---- verify ------------------------------------------------------------
    auto* verify = app.add_subcommand("verify", "run a verification suite config");
    std::string config_path;
    verify->add_option("config", config_path, "suite config JSON")->required();
    verify->add_option("--out", out_path, "report JSON path (overrides config)");

    // ---- convergence -------------------------------------------------------
    auto* conv = app.add_subcommand("convergence", "strong-error ladder study");
    add_problem_opts(conv);
    std::string ladder_text = "8,16,32,64,128,256,512,1024";
    std::int64_t conv_paths = 20000;
    double x0 = 1.0;
    conv->add_option("--ladder", ladder_text)->capture_default_str();
    conv->add_option("--paths", conv_paths)->capture_default_str();
    conv->add_option("--seed", mc.seed);
    conv->add_option("--x0", x0)->capture_default_str();

    // ---- show-problem ------------------------------------------------------
    auto* show = app.add_subcommand("show-problem", "print a problem in file format");
    add_problem_opts(show);

    CLI11_PARSE(app, argc, argv);

    try {
        if (workers > 0) sde::set_default_workers(workers);
        mc.n_workers = workers;

        if (est->parsed()) {
            const auto spec = load_problem(problem_file, builtin);
            if (grid_text.empty()) {
                const auto x = parse_point(x_text, spec.d);
                const auto e = fk::estimate_value(spec, t, x, mc);
                std::printf("value %.10g stderr %.3g (paths %lld, steps %d, seed %llu)\n",
                            e.scalar(), e.scalar_se(), static_cast<long long>(e.n_paths),
                            e.n_steps, static_cast<unsigned long long>(e.seed));
            } else {
                const auto box = parse_box(grid_text, grid_t1, grid_t2, grid_nt);
                auto [value, se] = fk::estimate_on_grid(spec, box, mc);
                if (out_path.empty()) out_path = "estimate.csv";
                value.write_csv(out_path, &se);
                std::printf("wrote %s\n", out_path.c_str());
            }
        } else if (grad->parsed()) {
            const auto spec = load_problem(problem_file, builtin);
            const auto x = parse_point(x_text, spec.d);
            const auto e = fk::estimate_gradient(spec, t, x, mc);
            std::printf("gradient");
            for (std::size_t i = 0; i < e.mean.size(); ++i)
                std::printf(" %.10g (se %.3g)", e.mean[i], e.se[i]);
            std::printf("\n");
        } else if (solve->parsed()) {
            const auto spec = load_problem(problem_file, builtin);
            auto box = parse_box(box_text, grid_t1, grid_t2, grid_nt);
            sde::McParams bmc;
            bmc.n_paths = boundary_paths;
            bmc.n_steps = boundary_steps;
            bmc.seed = mc.seed;
            bmc.n_workers = workers;
            const auto terminal = fd::mc_terminal(spec, box, bmc);
            const auto boundary = fd::mc_boundary(spec, box, {bmc, anchors});
            fd::SolveOptions opts;
            opts.theta = theta;
            fd::SolveDiagnostics diag;
            const auto u = fd::solve_dirichlet(spec, box, terminal, boundary, opts, &diag);
            for (const auto& w : diag.warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());
            if (out_path.empty()) out_path = "solution.csv";
            u.write_csv(out_path);
            std::printf("wrote %s (peclet %.3g)\n", out_path.c_str(), diag.peclet_max);
        } else if (norms->parsed()) {
            const auto spec = load_problem(problem_file, builtin);
            if (norm_q < 0) norm_q = spec.q;
            const problem::CoefficientField& fieldref =
                target == "source" ? spec.source
                                   : (target == "potential" ? spec.potential : spec.terminal);
            std::vector<double> lo(static_cast<std::size_t>(spec.d), cloud_lo);
            std::vector<double> hi(static_cast<std::size_t>(spec.d), cloud_hi);
            const auto pts = spaces::norm_cloud(lo, hi, per_axis, fill);
            char desc[128];
            std::snprintf(desc, sizeof desc, "tensor(%d)+weyl(%d) on [%g,%g]^%d", per_axis, fill,
                          cloud_lo, cloud_hi, spec.d);
            const double sample_t = target == "terminal" ? spec.T : norm_t;
            const auto cloud =
                spaces::DerivCloud::from_function(fieldref, sample_t, pts, norm_p, desc);
            const auto result = spaces::weighted_norm(
                cloud, norm_q, norm_p, no_beta ? std::nullopt : std::optional<double>(beta),
                variant == "triple_bar" ? spaces::NormVariant::TripleBar
                                        : spaces::NormVariant::Standard);
            std::cout << result.to_json().dump(2) << "\n";
        } else if (verify->parsed()) {
            std::ifstream in(config_path);
            if (!in) throw Error("cannot open suite config '" + config_path + "'");
            nlohmann::json config = nlohmann::json::parse(in);
            if (!out_path.empty()) config["output"] = out_path;
            const auto result = harness::run_suite(config);
            std::cout << result.summary();
            return result.all_pass() ? 0 : 1;
        } else if (conv->parsed()) {
            const auto spec = load_problem(problem_file, builtin);
            std::vector<int> ladder;
            std::size_t pos = 0;
            while (pos < ladder_text.size()) {
                auto comma = ladder_text.find(',', pos);
                if (comma == std::string::npos) comma = ladder_text.size();
                ladder.push_back(std::atoi(ladder_text.substr(pos, comma - pos).c_str()));
                pos = comma + 1;
            }
            std::vector<double> x(static_cast<std::size_t>(spec.d), x0);
            const auto rep = sde::strong_error(spec, spec.t0, x, ladder, conv_paths, mc.seed,
                                               workers);
            std::printf("steps     dt          error        half-width\n");
            for (std::size_t i = 0; i < rep.errors.size(); ++i)
                std::printf("%-9d %-11.4g %-12.6g %-12.6g\n", rep.ladder[i], rep.step_sizes[i],
                            rep.errors[i], rep.half_widths[i]);
            std::printf("fitted strong order: %.3f\n", rep.slope);
        } else if (show->parsed()) {
            const auto spec = load_problem(problem_file, builtin);
            std::cout << problem::write_problem(spec);
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 0;
}
