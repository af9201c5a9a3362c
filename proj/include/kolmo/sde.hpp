// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "kolmo/problem.hpp"

namespace kolmo::sde {

/// Monte-Carlo budget. `n_workers = 0` uses the process-wide default. Results
/// are bit-identical for any worker count: every noise increment is a pure
/// function of (seed, path, step), workers write disjoint slices, and all
/// reductions run in path order.
struct McParams {
    std::int64_t n_paths = 10000;
    int n_steps = 100;
    std::uint64_t seed = 1;
    bool antithetic = false;
    int n_workers = 0;
};

int default_workers();
void set_default_workers(int n);
int resolve_workers(int requested);

/// Euler-Maruyama trajectories of dX = b ds + sigma dW on a uniform grid over
/// [t, T], with the running discount integral int_t^s c(r, X(r)) dr
/// accumulated by the trapezoidal rule, and optionally the first-variation
/// matrices J(s) = dX^{t,x}(s)/dx.
struct PathBatch {
    int d = 0;
    std::int64_t n_paths = 0;
    int n_steps = 0;
    std::uint64_t seed = 0;
    bool antithetic = false;
    std::string scheme = "euler-maruyama";
    std::vector<double> t_grid;    // n_steps + 1
    std::vector<double> states;    // [path][step][i]
    std::vector<double> discount;  // [path][step]
    std::vector<double> variation; // [path][step][i][j] or empty

    bool has_variation() const { return !variation.empty(); }
    double t_start() const { return t_grid.front(); }
    double t_end() const { return t_grid.back(); }

    std::span<const double> state(std::int64_t p, int k) const {
        return {states.data() + (p * (n_steps + 1) + k) * d, static_cast<std::size_t>(d)};
    }
    double discount_at(std::int64_t p, int k) const {
        return discount[static_cast<std::size_t>(p * (n_steps + 1) + k)];
    }
    std::span<const double> variation_at(std::int64_t p, int k) const {
        return {variation.data() + (p * (n_steps + 1) + k) * d * d,
                static_cast<std::size_t>(d) * static_cast<std::size_t>(d)};
    }

    /// One row per (path, step): path,step,s,x1..xd,discount. Documented header.
    void write_csv(const std::string& path) const;
};

PathBatch simulate_paths(const problem::ProblemSpec& spec, double t, std::span<const double> x,
                         const McParams& mc);

/// Also fills `variation` by the coupled recursion
///   J_{k+1} = J_k + grad_b J_k dt + sum_k' grad_sigma_{.k'} J_k dW^{k'},
/// J_0 = I, reusing the state noise. Requires spatial gradients of b and sigma
/// (analytic or finite-difference).
PathBatch simulate_with_variation(const problem::ProblemSpec& spec, double t,
                                  std::span<const double> x, const McParams& mc);

/// Same simulations with noise keyed by the global path index
/// `path_offset + p`. Streaming estimators use this to decompose one logical
/// batch into fixed-size blocks without changing any drawn increment.
/// `path_offset` must be even when antithetic.
PathBatch simulate_paths_offset(const problem::ProblemSpec& spec, double t,
                                std::span<const double> x, const McParams& mc,
                                std::int64_t path_offset);
PathBatch simulate_with_variation_offset(const problem::ProblemSpec& spec, double t,
                                         std::span<const double> x, const McParams& mc,
                                         std::int64_t path_offset);

/// Strong-error ladder against the finest level as reference.
struct ConvergenceReport {
    std::vector<int> ladder;            // ascending step counts, each divides the next
    std::vector<double> step_sizes;     // (T - t)/n for every non-reference level
    std::vector<double> errors;         // estimated E|X_n(T) - X_ref(T)|
    std::vector<double> half_widths;    // 1.96 * stderr of each error estimate
    double slope = 0.0;                 // log-log least-squares fit
    std::int64_t n_paths = 0;
    std::uint64_t seed = 0;
};

ConvergenceReport strong_error(const problem::ProblemSpec& spec, double t,
                               std::span<const double> x, const std::vector<int>& ladder,
                               std::int64_t n_paths, std::uint64_t seed, int n_workers = 0);

}  // namespace kolmo::sde
