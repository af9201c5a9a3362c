// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <utility>

#include "kolmo/field.hpp"
#include "kolmo/sde.hpp"

namespace kolmo::fk {

/// Monte-Carlo estimate: scalar (kind "value") or d-vector (kind "gradient"),
/// with componentwise standard errors.
struct Estimate {
    std::vector<double> mean;
    std::vector<double> se;
    std::int64_t n_paths = 0;
    int n_steps = 0;
    std::uint64_t seed = 0;
    std::string kind = "value";

    double scalar() const { return mean.at(0); }
    double scalar_se() const { return se.at(0); }
};

/// Per-path discounted payoff
///   h(X_T) e^{-I_T} + sum_k w_k f(t_k, X_k) e^{-I_k}
/// with trapezoidal time weights w_k and I_k the stored running discount.
std::vector<double> discounted_payoff(const sde::PathBatch& batch,
                                      const problem::ProblemSpec& spec, int n_workers = 0);

/// Feynman-Kac value estimate at (t, x). Streams path blocks, so memory stays
/// bounded for large path counts; means and standard errors are accumulated in
/// path order (bit-identical for any worker count). With antithetic sampling
/// the statistical unit is the pair mean.
Estimate estimate_value(const problem::ProblemSpec& spec, double t, std::span<const double> x,
                        const sde::McParams& mc);

/// Pathwise gradient estimate: per path the four terms
///   grad h(X_T)^T J_T e^{-I_T}
///   - h(X_T) e^{-I_T} int_t^T grad c(r,X_r)^T J_r dr
///   + int_t^T grad f(s,X_s)^T J_s e^{-I_s} ds
///   - int_t^T f(s,X_s) e^{-I_s} (int_t^s grad c(r,X_r)^T J_r dr) ds
/// with all time integrals by the trapezoidal rule on the Euler skeleton.
Estimate estimate_gradient(const problem::ProblemSpec& spec, double t, std::span<const double> x,
                           const sde::McParams& mc);

/// Nodewise estimate_value over a space-time grid with per-node derived seeds;
/// returns (values, standard errors). Nodes at t = T evaluate the terminal
/// datum exactly (stderr 0).
std::pair<field::Field, field::Field> estimate_on_grid(const problem::ProblemSpec& spec,
                                                       const field::Box& grid,
                                                       const sde::McParams& mc);

}  // namespace kolmo::fk
