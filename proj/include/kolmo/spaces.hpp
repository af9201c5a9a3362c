// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "kolmo/field.hpp"
#include "kolmo/problem.hpp"
#include "kolmo/weight.hpp"

namespace kolmo::spaces {

/// One sample for the Hoelder seminorm.
struct Sample {
    std::vector<double> x;
    double value = 0.0;
};

/// [f]_beta = max over distinct pairs of |f(x)-f(x')| / |x-x'|^beta.
/// Exhaustive for up to 10^4 samples; larger clouds are thinned to 10^4 points
/// by a deterministic fixed-stride pick (documented in the result's note).
/// Throws on duplicate points or fewer than 2 samples.
double holder_seminorm(std::span<const Sample> samples, double beta);

/// Multi-index over d axes, |alpha| = sum of entries.
using MultiIndex = std::vector<int>;
std::vector<MultiIndex> multi_indices_up_to(int d, int p);
int multi_index_order(const MultiIndex& alpha);
std::string multi_index_name(const MultiIndex& alpha);

/// A finite sample cloud carrying derivative values D^alpha f for |alpha| <= p.
struct DerivCloud {
    int d = 0;
    int p = 0;  // highest derivative order stored
    std::vector<MultiIndex> alphas;           // all |alpha| <= p, fixed order
    std::vector<std::vector<double>> points;  // cloud points
    std::vector<std::vector<double>> derivs;  // [point][alpha slot]
    std::string descriptor;

    int slot(const MultiIndex& alpha) const;

    /// Cloud from analytic callables. `fn(t, x)` is sampled at fixed `t`;
    /// derivatives up to order p by the same central-difference steps the
    /// coefficient machinery uses (1e-4..5e-3 scaled by 1+|x|), or by the
    /// field's analytic gradient where it exists and p == 1.
    static DerivCloud from_function(const problem::CoefficientField& fn, double t,
                                    std::span<const std::vector<double>> pts, int p,
                                    std::string descriptor);

    /// Cloud from one time slice of a Field; points are the grid nodes at
    /// least margin(p) nodes inside the boundary, derivatives by the field's
    /// central stencils.
    static DerivCloud from_field_slice(const field::Field& field, int k, int p,
                                       int extra_margin = 0);
};

/// Tensor grid + Weyl low-discrepancy fill, the documented cloud for norms
/// over a box.
std::vector<std::vector<double>> norm_cloud(std::span<const double> lo,
                                            std::span<const double> hi, int per_axis,
                                            int fill_points, std::uint64_t seed = 7u);

enum class NormVariant { Standard, TripleBar };

/// Weighted norm of the cloud:
///   Standard:  sum_{|a|<=p} sup |D^a (f/P)| (+ sum_{|a|=p} [D^a (f/P)]_beta)
///   TripleBar: sum_{|a|<=p} sup |D^a f / P| (+ sum_{|a|=p} [D^a f / P]_beta)
/// The beta terms appear when `beta` is set. D^a(f/P) is assembled exactly
/// from D^a f and the analytic derivatives of P (p <= 2).
struct WeightedNormResult {
    double value = 0.0;
    std::map<std::string, double> terms;  // per-term breakdown
    int q = 0;
    int p = 0;
    std::optional<double> beta;
    NormVariant variant = NormVariant::Standard;
    std::string cloud;

    nlohmann::json to_json() const;
};

WeightedNormResult weighted_norm(const DerivCloud& cloud, int q, int p,
                                 std::optional<double> beta, NormVariant variant);

/// Unbounded -> bounded transform of Theorem-type u = v P: returns the spec of
/// the v-problem, with
///   b~_i = b_i + 2 P^{-1} sum_j a_ij D^j P
///   c~   = c - P^{-1} sum a_ij D^ij P - P^{-1} sum b_i D^i P
///   f~   = f / P,  h~ = h / P,  sigma unchanged,
/// carried as spec state so it composes exactly with the zeroth-order shift.
/// The returned c0 is the sampled lower bound of c~ over `sample_box`
/// (dimension-d corners; defaults to [-8, 8]^d). Requires q >= 1 and a spec
/// not already transformed.
problem::ProblemSpec transform_to_bounded(const problem::ProblemSpec& spec, int q,
                                          std::span<const double> sample_lo = {},
                                          std::span<const double> sample_hi = {});

}  // namespace kolmo::spaces
