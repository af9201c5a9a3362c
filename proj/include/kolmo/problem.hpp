// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "kolmo/coefficient.hpp"

namespace kolmo::problem {

/// One Cauchy problem
///   D_t u + sum a_ij D^ij u + sum b_i D^i u - c u + f = 0,  u(T,.) = h,
/// with a = (1/2) sigma sigma^T, driven by the SDE dX = b ds + sigma dW.
///
/// `gamma` and `transform_q` carry the zeroth-order shift and the weight
/// transform as state; the effective coefficients are produced in one
/// canonical order by CoeffEval, so composing the two operations in either
/// order yields bit-identical evaluations.
struct ProblemSpec {
    std::string name = "problem";
    int d = 1;  // state dimension
    int m = 1;  // driving noise dimension
    double t0 = 0.0;
    double T = 1.0;
    std::vector<CoefficientField> drift;      // size d
    std::vector<CoefficientField> diffusion;  // size d*m, row-major sigma[i*m+k]
    CoefficientField potential;               // c(t,x)
    CoefficientField source;                  // f(t,x)
    CoefficientField terminal;                // h(x)
    double c0 = 0.0;  // declared lower bound of the effective potential
    int q = 0;        // weight exponent of the data growth class
    std::optional<double> delta;  // declared ellipticity constant, if known

    double gamma = 0.0;  // accumulated zeroth-order shift
    int transform_q = 0; // 0 = no weight transform applied

    /// Checks the structural invariants (0 <= t0 < T, q >= 0, coefficient
    /// shapes); throws Error on violation.
    void validate_shape() const;
};

/// Snapshot of every coefficient at one (t, x).
struct Coeffs {
    std::vector<double> b;      // d
    std::vector<double> sigma;  // d*m
    std::vector<double> a;      // d*d, symmetric, = (1/2) sigma sigma^T
    double c = 0;
    double f = 0;
};

/// Evaluates the *effective* coefficients of a spec (decorations applied).
/// Instances hold scratch buffers: cheap to copy, not safe to share across
/// threads; give each worker its own copy.
class CoeffEval {
public:
    explicit CoeffEval(const ProblemSpec& spec);

    int d() const { return d_; }
    int m() const { return m_; }

    void drift(double t, std::span<const double> x, std::span<double> out);      // d
    void sigma(double t, std::span<const double> x, std::span<double> out);      // d*m
    void diffusion_a(double t, std::span<const double> x, std::span<double> out); // d*d
    double potential(double t, std::span<const double> x);
    double source(double t, std::span<const double> x);
    double terminal(std::span<const double> x);

    // Spatial gradients of the effective coefficients; analytic where the raw
    // field provides one and no transform is active, else central differences
    // of the effective value.
    void drift_jacobian(double t, std::span<const double> x, std::span<double> out);  // d*d, [i*d+j] = d b_i / d x_j
    void sigma_jacobian(double t, std::span<const double> x, std::span<double> out);  // d*m*d, [(i*m+k)*d + j]
    void potential_gradient(double t, std::span<const double> x, std::span<double> out);
    void source_gradient(double t, std::span<const double> x, std::span<double> out);
    void terminal_gradient(std::span<const double> x, std::span<double> out);

private:
    void raw_drift(double t, std::span<const double> x, std::span<double> out);
    void raw_sigma(double t, std::span<const double> x, std::span<double> out);
    void transform_terms(double t, std::span<const double> x, double& c_add,
                         std::span<double> b_add);

    const ProblemSpec* spec_;
    int d_, m_;
    std::vector<double> buf_sigma_, buf_a_, buf_b_, buf_p1_, buf_p2_, buf_point_;
};

/// Convenience wrapper returning a full snapshot (allocates; not for hot loops).
Coeffs evaluate_coefficients(const ProblemSpec& spec, double t, std::span<const double> x);

/// Terminal datum with decorations applied.
double evaluate_terminal(const ProblemSpec& spec, std::span<const double> x);

// ---------------------------------------------------------------------------
// Assumption validation

enum class Profile { Basic, Strict };

struct AssumptionEntry {
    std::string name;
    double constant = 0.0;  // sampled estimate of the assumption's constant
    bool pass = true;
    std::optional<double> worst_t;
    std::vector<double> worst_x;  // empty when no violating point was found
    std::string note;
};

struct AssumptionReport {
    Profile profile = Profile::Basic;
    std::int64_t n_samples = 0;
    std::uint64_t seed = 0;
    std::vector<AssumptionEntry> entries;

    bool all_pass() const;
    const AssumptionEntry* find(const std::string& name) const;
};

/// Samples the coefficients over `box` (lower/upper corners, size d) at
/// `n_samples` quasi-random space-time points and reports the sampled
/// assumption constants. Deterministic given (spec, box, n_samples, seed).
///
/// BASIC: A1 Lipschitz quotient, A2 linear-growth quotient, K1 smallest
/// eigenvalue of a, c - c0 lower bound. STRICT adds derivative bounds of b and
/// sigma to order 3, the diffusion singular-value band, and |D^alpha c| bounds.
AssumptionReport validate_assumptions(const ProblemSpec& spec,
                                      std::span<const double> box_lo,
                                      std::span<const double> box_hi,
                                      std::int64_t n_samples, Profile profile,
                                      std::uint64_t seed = 20240901ull);

/// Zeroth-order shift: potential c - gamma, source e^{-gamma t} f, terminal
/// e^{-gamma T} h, declared bound c0 - gamma. The solution v of the shifted
/// problem satisfies v(t,x) = e^{-gamma t} u(t,x); multiply by e^{+gamma t}
/// to recover u.
ProblemSpec shift_zeroth_order(const ProblemSpec& spec, double gamma);

}  // namespace kolmo::problem
