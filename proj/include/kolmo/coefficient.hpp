// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <memory>
#include <span>
#include <string>

#include "kolmo/expression.hpp"

namespace kolmo::problem {

/// Declared growth class of a coefficient. `Polynomial` carries the degree
/// (the paper's data growth is degree 2q).
struct GrowthClass {
    enum Kind { Bounded, Linear, Polynomial } kind = Bounded;
    int degree = 0;  // meaningful for Polynomial

    std::string to_string() const;
    static GrowthClass parse(const std::string& text);
};

/// One scalar coefficient b_i, sigma_ik, c, f or h: either a parsed expression
/// over (t, x1..xd) or a member of the built-in family registry. Families ship
/// analytic spatial gradients; expressions fall back to central differences
/// with step 1e-4 * (1 + |x|).
///
/// Evaluators are pure and reentrant; copies share the immutable implementation.
class CoefficientField {
public:
    CoefficientField() = default;

    static CoefficientField expression(const std::string& src, int d);
    /// `spec` is "name(arg,...)", e.g. "const(2)", "linear(0,-1)", "quad(1)",
    /// "weight(2)", "linear_growth(1,1)", "tanh_coord(5,1)", "exp_time(-2,1)".
    static CoefficientField family(const std::string& spec, int d);
    /// Ad-hoc evaluator (optionally with an analytic gradient). Not
    /// serializable to problem files; `label` only names it in diagnostics.
    static CoefficientField from_function(
        std::string label, int d,
        std::function<double(double, std::span<const double>)> fn,
        std::function<void(double, std::span<const double>, std::span<double>)> grad = {},
        GrowthClass growth = {GrowthClass::Polynomial, 2});

    double operator()(double t, std::span<const double> x) const;

    bool has_analytic_gradient() const;
    /// Spatial gradient into `out` (size d); analytic when available, else
    /// central differences of the evaluator.
    void gradient(double t, std::span<const double> x, std::span<double> out) const;
    /// Central-difference gradient regardless of analytic availability.
    void fd_gradient(double t, std::span<const double> x, std::span<double> out) const;

    GrowthClass growth() const;
    void set_growth(GrowthClass g);

    /// Printable form ("expr: ..." or "family: ..."); problem files store this
    /// verbatim, so round-trips are lossless.
    const std::string& source() const;

    int dimension() const;
    bool valid() const { return impl_ != nullptr; }

private:
    struct Impl;
    std::shared_ptr<const Impl> impl_;
};

/// Names of all registered families, for diagnostics.
std::vector<std::string> family_names();

}  // namespace kolmo::problem
