// SPDX-License-Identifier: Apache-2.0
#include "kolmo/fk.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <thread>

#include "kolmo/error.hpp"
#include "kolmo/rng.hpp"

namespace kolmo::fk {

namespace {

// Fixed streaming block so the summation order never depends on worker count.
constexpr std::int64_t kBlockPaths = 8192;

struct RunningStats {
    double sum = 0, sumsq = 0;
    std::int64_t n = 0;
    void add(double v) {
        sum += v;
        sumsq += v * v;
        ++n;
    }
    double mean() const { return n ? sum / n : 0.0; }
    double se() const {
        if (n < 2) return 0.0;
        const double m = mean();
        const double var = std::max(0.0, (sumsq - n * m * m) / (n - 1));
        return std::sqrt(var / n);
    }
};

void run_partitioned(std::int64_t n, int n_workers,
                     const std::function<void(std::int64_t, std::int64_t)>& body) {
    if (n_workers <= 1 || n < 2 * n_workers) {
        body(0, n);
        return;
    }
    std::vector<std::thread> threads;
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(n_workers));
    const std::int64_t chunk = (n + n_workers - 1) / n_workers;
    for (int w = 0; w < n_workers; ++w) {
        const std::int64_t lo = w * chunk;
        const std::int64_t hi = std::min<std::int64_t>(n, lo + chunk);
        if (lo >= hi) break;
        threads.emplace_back([&, w, lo, hi] {
            try {
                body(lo, hi);
            } catch (...) {
                errors[static_cast<std::size_t>(w)] = std::current_exception();
            }
        });
    }
    for (auto& th : threads) th.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

std::vector<double> trapezoid_weights(const std::vector<double>& t_grid) {
    const std::size_t n = t_grid.size();
    std::vector<double> w(n, 0.0);
    for (std::size_t k = 0; k + 1 < n; ++k) {
        const double half = 0.5 * (t_grid[k + 1] - t_grid[k]);
        w[k] += half;
        w[k + 1] += half;
    }
    return w;
}

}  // namespace

std::vector<double> discounted_payoff(const sde::PathBatch& batch,
                                      const problem::ProblemSpec& spec, int n_workers) {
    spec.validate_shape();
    if (batch.d != spec.d) throw Error("batch dimension does not match the spec");
    const auto w = trapezoid_weights(batch.t_grid);
    std::vector<double> payoff(static_cast<std::size_t>(batch.n_paths));

    run_partitioned(batch.n_paths, sde::resolve_workers(n_workers),
                    [&](std::int64_t lo, std::int64_t hi) {
                        problem::CoeffEval eval(spec);
                        for (std::int64_t p = lo; p < hi; ++p) {
                            double acc = eval.terminal(batch.state(p, batch.n_steps)) *
                                         std::exp(-batch.discount_at(p, batch.n_steps));
                            for (int k = 0; k <= batch.n_steps; ++k) {
                                const double fk = eval.source(batch.t_grid[static_cast<std::size_t>(k)],
                                                              batch.state(p, k));
                                if (fk != 0.0)
                                    acc += w[static_cast<std::size_t>(k)] * fk *
                                           std::exp(-batch.discount_at(p, k));
                            }
                            payoff[static_cast<std::size_t>(p)] = acc;
                        }
                    });
    return payoff;
}

Estimate estimate_value(const problem::ProblemSpec& spec, double t, std::span<const double> x,
                        const sde::McParams& mc) {
    spec.validate_shape();
    if (mc.antithetic && mc.n_paths % 2 != 0)
        throw Error("antithetic sampling needs an even n_paths");
    RunningStats stats;
    std::int64_t done = 0;
    while (done < mc.n_paths) {
        const std::int64_t block = std::min<std::int64_t>(kBlockPaths, mc.n_paths - done);
        sde::McParams sub = mc;
        sub.n_paths = block;
        const sde::PathBatch batch = sde::simulate_paths_offset(spec, t, x, sub, done);
        const auto payoff = discounted_payoff(batch, spec, mc.n_workers);
        if (mc.antithetic) {
            for (std::int64_t i = 0; i + 1 < block; i += 2)
                stats.add(0.5 * (payoff[static_cast<std::size_t>(i)] +
                                 payoff[static_cast<std::size_t>(i + 1)]));
        } else {
            for (double v : payoff) stats.add(v);
        }
        done += block;
    }
    Estimate est;
    est.mean = {stats.mean()};
    est.se = {stats.se()};
    est.n_paths = mc.n_paths;
    est.n_steps = mc.n_steps;
    est.seed = mc.seed;
    est.kind = "value";
    return est;
}

Estimate estimate_gradient(const problem::ProblemSpec& spec, double t, std::span<const double> x,
                           const sde::McParams& mc) {
    spec.validate_shape();
    const int d = spec.d;
    const auto dd = static_cast<std::size_t>(d);
    std::vector<RunningStats> stats(dd);

    std::int64_t done = 0;
    while (done < mc.n_paths) {
        const std::int64_t block = std::min<std::int64_t>(kBlockPaths, mc.n_paths - done);
        sde::McParams sub = mc;
        sub.n_paths = block;
        sub.antithetic = false;  // the pathwise formula is estimated on raw paths
        const sde::PathBatch batch = sde::simulate_with_variation_offset(spec, t, x, sub, done);
        const auto& t_grid = batch.t_grid;
        const auto w = trapezoid_weights(t_grid);
        const int n_steps = batch.n_steps;

        std::vector<double> per_path(static_cast<std::size_t>(block) * dd);
        run_partitioned(block, sde::resolve_workers(mc.n_workers), [&](std::int64_t lo,
                                                                       std::int64_t hi) {
            problem::CoeffEval eval(spec);
            std::vector<double> grad(dd), G(dd), G_prev_term(dd), term(dd), acc(dd);
            for (std::int64_t p = lo; p < hi; ++p) {
                std::fill(acc.begin(), acc.end(), 0.0);
                std::fill(G.begin(), G.end(), 0.0);          // int grad c^T J dr, trapezoid
                std::fill(G_prev_term.begin(), G_prev_term.end(), 0.0);
                for (int k = 0; k <= n_steps; ++k) {
                    const double tk = t_grid[static_cast<std::size_t>(k)];
                    const auto Xk = batch.state(p, k);
                    const auto Jk = batch.variation_at(p, k);
                    // row vector grad c^T J
                    eval.potential_gradient(tk, Xk, grad);
                    for (std::size_t j = 0; j < dd; ++j) {
                        double s = 0;
                        for (std::size_t i = 0; i < dd; ++i) s += grad[i] * Jk[i * dd + j];
                        term[j] = s;
                    }
                    if (k > 0) {
                        const double half = 0.5 * (tk - t_grid[static_cast<std::size_t>(k - 1)]);
                        for (std::size_t j = 0; j < dd; ++j)
                            G[j] += half * (G_prev_term[j] + term[j]);
                    }
                    G_prev_term = term;

                    const double disc = std::exp(-batch.discount_at(p, k));
                    const double fk = eval.source(tk, Xk);
                    if (fk != 0.0) {
                        // term (iv)
                        for (std::size_t j = 0; j < dd; ++j)
                            acc[j] -= w[static_cast<std::size_t>(k)] * fk * disc * G[j];
                    }
                    eval.source_gradient(tk, Xk, grad);
                    bool nonzero = false;
                    for (std::size_t i = 0; i < dd; ++i)
                        if (grad[i] != 0.0) nonzero = true;
                    if (nonzero) {
                        // term (iii)
                        for (std::size_t j = 0; j < dd; ++j) {
                            double s = 0;
                            for (std::size_t i = 0; i < dd; ++i) s += grad[i] * Jk[i * dd + j];
                            acc[j] += w[static_cast<std::size_t>(k)] * disc * s;
                        }
                    }
                }
                // terminal terms (i) and (ii)
                const auto XT = batch.state(p, n_steps);
                const auto JT = batch.variation_at(p, n_steps);
                const double discT = std::exp(-batch.discount_at(p, n_steps));
                eval.terminal_gradient(XT, grad);
                for (std::size_t j = 0; j < dd; ++j) {
                    double s = 0;
                    for (std::size_t i = 0; i < dd; ++i) s += grad[i] * JT[i * dd + j];
                    acc[j] += discT * s;
                }
                const double hT = eval.terminal(XT);
                if (hT != 0.0)
                    for (std::size_t j = 0; j < dd; ++j) acc[j] -= hT * discT * G[j];

                std::copy(acc.begin(), acc.end(),
                          per_path.begin() + static_cast<std::ptrdiff_t>((p)*static_cast<std::int64_t>(dd)));
            }
        });

        for (std::int64_t p = 0; p < block; ++p)
            for (std::size_t j = 0; j < dd; ++j)
                stats[j].add(per_path[static_cast<std::size_t>(p) * dd + j]);
        done += block;
    }

    Estimate est;
    est.mean.resize(dd);
    est.se.resize(dd);
    for (std::size_t j = 0; j < dd; ++j) {
        est.mean[j] = stats[j].mean();
        est.se[j] = stats[j].se();
    }
    est.n_paths = mc.n_paths;
    est.n_steps = mc.n_steps;
    est.seed = mc.seed;
    est.kind = "gradient";
    return est;
}

std::pair<field::Field, field::Field> estimate_on_grid(const problem::ProblemSpec& spec,
                                                       const field::Box& grid,
                                                       const sde::McParams& mc) {
    spec.validate_shape();
    grid.validate();
    if (grid.dim() != spec.d) throw Error("grid dimension does not match the spec");
    field::Field value = field::Field::zeros(grid, "MC");
    field::Field se = field::Field::zeros(grid, "MC");
    std::vector<double> pt(static_cast<std::size_t>(grid.dim()));
    const std::int64_t per_slice = grid.slice_size();
    for (int k = 0; k <= grid.n_time; ++k) {
        const double t = grid.time(k);
        for (std::int64_t s = 0; s < per_slice; ++s) {
            grid.spatial_point(s, pt);
            const std::int64_t node = k * per_slice + s;
            if (t >= spec.T - 1e-14 * std::max(1.0, std::fabs(spec.T))) {
                value.at(k, s) = problem::evaluate_terminal(spec, pt);
                se.at(k, s) = 0.0;
                continue;
            }
            sde::McParams node_mc = mc;
            node_mc.seed = rng::derive_seed(mc.seed, static_cast<std::uint64_t>(node));
            const Estimate est = estimate_value(spec, t, pt, node_mc);
            value.at(k, s) = est.scalar();
            se.at(k, s) = est.scalar_se();
        }
    }
    return {std::move(value), std::move(se)};
}

}  // namespace kolmo::fk
