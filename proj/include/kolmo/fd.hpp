// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>

#include "kolmo/field.hpp"
#include "kolmo/fk.hpp"
#include "kolmo/report.hpp"

namespace kolmo::fd {

/// Lateral boundary values g(t, x) for x on the spatial boundary of a box.
using BoundaryFn = std::function<double(double t, std::span<const double> x)>;

struct SolveOptions {
    double theta = 0.5;  // 1/2 = Crank-Nicolson .. 1 = implicit Euler
};

struct SolveDiagnostics {
    double peclet_max = 0.0;  // max over sampled nodes of dx |b| / (2 lambda_min(a))
    bool peclet_ok = true;
    std::vector<std::string> warnings;
};

/// Backward theta-scheme for the Cauchy-Dirichlet problem on `box`:
/// second-order central differences for D^i and D^ii, the symmetric 4-point
/// average for cross terms, boundary rows pinned to `boundary`, the banded
/// system solved per step (Thomas in d=1, sparse LU in d=2,3).
///
/// `terminal` holds u(t2, .) on the full slice. Requires theta in [1/2, 1],
/// d <= 3, and uniform ellipticity of a on the box (validated on a node
/// sample; refuses to solve otherwise).
field::Field solve_dirichlet(const problem::ProblemSpec& spec, const field::Box& box,
                             std::span<const double> terminal, const BoundaryFn& boundary,
                             const SolveOptions& options = {},
                             SolveDiagnostics* diagnostics = nullptr);

/// Applies the parabolic operator to a stored field:
///   D_t u + sum a_ij D^ij u + sum b_i D^i u - c u + f
/// with central differences in space and central (one-sided at the ends)
/// differences in time. Returned on the spatially shrunk box (interior nodes).
field::Field residual(const problem::ProblemSpec& spec, const field::Field& field);

/// Lateral boundary data estimated by Monte Carlo at `anchor_times` per
/// boundary node and interpolated in time by a natural cubic spline.
struct McBoundaryParams {
    sde::McParams mc;
    int anchor_times = 13;
};
BoundaryFn mc_boundary(const problem::ProblemSpec& spec, const field::Box& box,
                       const McBoundaryParams& params);

/// Terminal slice u(t2, .) for a localized solve: the exact datum h when
/// t2 == T, otherwise nodewise MC estimates.
std::vector<double> mc_terminal(const problem::ProblemSpec& spec, const field::Box& box,
                                const sde::McParams& mc);

struct CrossCheckParams {
    sde::McParams interior_mc;   // fresh estimates at the probe nodes
    sde::McParams boundary_mc;   // boundary anchors and terminal slice
    int anchor_times = 13;
    int n_probes = 9;
    double allowance = 5e-3;     // scheme-error allowance
    double theta = 0.5;
    double corrupt_potential = 0.0;  // negative-control knob: FD solves with c + this
};

/// Solves the localized Dirichlet problem with MC terminal/lateral data and
/// compares FD interior values against independent MC estimates at probe
/// nodes. lhs = max over probes of (|fd - mc| - 3 stderr), rhs = allowance.
report::BoundCheck localized_cross_check(const problem::ProblemSpec& spec, const field::Box& box,
                                         const CrossCheckParams& params);

}  // namespace kolmo::fd
