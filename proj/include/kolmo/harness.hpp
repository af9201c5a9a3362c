// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <utility>

#include "kolmo/fd.hpp"
#include "kolmo/report.hpp"
#include "kolmo/spaces.hpp"

namespace kolmo::harness {

// ---------------------------------------------------------------------------
// maximum principle (homogeneous problem)

struct MaxPrincipleParams {
    double h_sup = 1.0;       // sup over R^d of |h|
    double allowance = 0.0;   // scheme-error allowance added to 3 stderr
    double c0_inflation = 0.0;  // negative control: the bound is evaluated with c0 + this
};

/// Per slice k: lhs_k = max |u(t_k, .)|, rhs_k = e^{-c0 (T - t_k)} h_sup.
/// Passes when every slice satisfies lhs_k <= rhs_k + 3 stderr_k + allowance.
/// The returned check has lhs = worst slice deficit, rhs = 0; slicewise values
/// land in inputs. Rejects specs whose source is not identically zero.
report::BoundCheck check_max_principle(const problem::ProblemSpec& spec,
                                       const field::Field& values, const field::Field* stderrs,
                                       const MaxPrincipleParams& params);

// ---------------------------------------------------------------------------
// growth exponents

struct GrowthParams {
    std::vector<double> radii;
    double t = 0.0;
    int alpha_order = 0;  // 0: sup |u| per radius, 1: sup |grad u|
    sde::McParams mc;
    int sphere_samples = 2;  // points per radius (d = 1 always uses {-r, +r})
    double slack = 0.3;
};

/// Fits the log-log slope of the measured sup values against the radius and
/// compares with the theoretical exponent 2q (values) or 2q(1+|alpha|)
/// (derivatives; the sharper 2q bound for bounded grad c is recorded in the
/// note). Radii must span at least a decade.
report::GrowthReport check_growth(const problem::ProblemSpec& spec, const GrowthParams& params);

// ---------------------------------------------------------------------------
// Schauder ratio

enum class SchauderMode { Interior, Optimal };

struct SchauderParams {
    SchauderMode mode = SchauderMode::Interior;
    field::Box box;             // FD box, t2 = T
    double beta = 0.5;
    sde::McParams boundary_mc;
    int anchor_times = 13;
    double theta = 0.5;
    int n_norm_slices = 5;      // time slices at which solution norms are taken
    int extra_margin = 4;       // nodes trimmed near the lateral boundary
    double data_scale = 1.0;    // scales h and f before solving
    double frozen_constant = 1.0;  // calibration constant
    double stability_factor = 2.0;
};

/// ratio = solution-side norm / data-side norm per the selected estimate.
/// lhs = |log2(ratio / frozen_constant)|, rhs = log2(stability_factor): the
/// check passes when the ratio stays within the stability factor of the
/// frozen calibration constant. The measured ratio is stored in inputs.
report::BoundCheck check_schauder_ratio(const problem::ProblemSpec& spec,
                                        const SchauderParams& params);

// ---------------------------------------------------------------------------
// semigroup smoothing

struct SmoothingParams {
    std::vector<double> times;  // ladder approaching T
    int p2 = 1;                 // target BC^{p2}, p1 = 0
    field::Box box;             // spatial extent; t1/t2/n_time are derived
    int n_time = 400;
    sde::McParams boundary_mc;
    int anchor_times = 13;
    double inner_fraction = 0.5;  // norms measured on the inner part of the box
    double slack = 0.15;
};

/// Measures ||G(t,T)h||_{BC^{p2}} from FD derivatives of the solution field at
/// each ladder time and fits the blow-up exponent in (T - t). lhs = fitted
/// exponent, rhs = (p2 - p1)/2 + slack. Solves with theta = 1 (monotone).
report::BoundCheck check_smoothing(const problem::ProblemSpec& spec,
                                   const SmoothingParams& params);

// ---------------------------------------------------------------------------
// Bernstein functional

struct BernsteinParams {
    double a = 0.01;
    double radius = 4.0;  // cutoff: 1 on |x| <= radius/2, 0 outside |x| >= radius
    double h_sup = 1.0;
    double frozen_constant = 2.0;  // sup v_R <= C sup|h|^2
};

/// C^3 radial bump used for the Bernstein field's terminal datum.
double bernstein_cutoff(double r, double radius);

/// Assembles v_R = |u|^2 + a(T-t) eta^2 sum |D^i u|^2 + a^2 (T-t)^2 eta^4
/// sum |D^ij u|^2 + a^3 (T-t)^3 eta^6 sum |D^ijk u|^2 nodewise from an FD
/// field (terminal eta h, zero lateral data), checks
/// sup v_R <= frozen_constant * h_sup^2 and that sup v_R is non-increasing as
/// a halves twice. Returns v_R for the primary a.
std::pair<field::Field, report::BoundCheck> bernstein_functional(
    const problem::ProblemSpec& spec, const field::Field& u_field, const BernsteinParams& params);

// ---------------------------------------------------------------------------
// weight-transform cross check

struct TransformCrossParams {
    int transform_q = 1;
    int multiply_q = 1;  // != transform_q is the planted negative control
    field::Box box;
    sde::McParams interior_mc;
    sde::McParams boundary_mc;
    int anchor_times = 13;
    int n_probes = 9;
    double allowance = 5e-3;
    double theta = 0.5;
};

/// FD-solves the transformed (bounded-data) problem with MC boundary data from
/// the original divided by the weight, multiplies the interior by
/// weight(multiply_q) and compares against fresh MC estimates of the original.
/// lhs = max over probes of |P v_fd - mc| - 3 stderr, rhs = allowance.
report::BoundCheck transform_cross_check(const problem::ProblemSpec& spec,
                                         const TransformCrossParams& params);

// ---------------------------------------------------------------------------
// suite

struct SuiteRecord {
    std::string name;
    bool pass = false;
    nlohmann::json record;  // BoundCheck / GrowthReport json, or an error note
};

struct SuiteResult {
    std::vector<SuiteRecord> records;
    bool all_pass() const;
    std::vector<std::string> failures() const;
    nlohmann::json to_json() const;
    std::string summary() const;  // one line per check
};

/// Executes the checks named in a JSON config (see configs/ for the schema by
/// example). Per-check failures are recorded, never abort the suite. Exit
/// status convention: 0 iff all pass.
SuiteResult run_suite(const nlohmann::json& config);
SuiteResult run_suite_file(const std::string& path);

}  // namespace kolmo::harness
