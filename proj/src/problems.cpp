// SPDX-License-Identifier: Apache-2.0
#include "kolmo/problems.hpp"

#include <cmath>

#include "kolmo/error.hpp"

namespace kolmo::problems {

using problem::CoefficientField;
using problem::ProblemSpec;

namespace {

ProblemSpec base_1d(const std::string& name) {
    ProblemSpec spec;
    spec.name = name;
    spec.d = 1;
    spec.m = 1;
    spec.t0 = 0.0;
    spec.T = 1.0;
    spec.drift = {CoefficientField::family("const(0)", 1)};
    spec.diffusion = {CoefficientField::family("const(1.4142135623730951)", 1)};  // a = 1
    spec.potential = CoefficientField::family("const(1)", 1);
    spec.source = CoefficientField::family("const(0)", 1);
    spec.terminal = CoefficientField::family("quad(1)", 1);
    spec.c0 = 1.0;
    spec.q = 1;
    spec.delta = 1.0;
    return spec;
}

}  // namespace

ProblemSpec make_builtin_problem(const std::string& name) {
    if (name == "heat") return base_1d(name);
    if (name == "constant") {
        ProblemSpec spec = base_1d(name);
        spec.diffusion = {CoefficientField::family("const(1)", 1)};
        spec.terminal = CoefficientField::family("const(2.5)", 1);
        spec.q = 0;
        spec.delta = 0.5;
        return spec;
    }
    if (name == "growth_q1") {
        ProblemSpec spec = base_1d(name);
        // f(t,x) = -2 e^{t-T} makes u = e^{-(T-t)} x^2 exactly
        spec.source = CoefficientField::family("exp_time(" + std::to_string(-2.0 * std::exp(-spec.T)) + ",1)", 1);
        return spec;
    }
    if (name == "bounded_h") {
        ProblemSpec spec = base_1d(name);
        spec.terminal = CoefficientField::family("tanh_coord(1,1)", 1);
        spec.q = 0;
        return spec;
    }
    if (name == "smoothing") {
        ProblemSpec spec = base_1d(name);
        spec.terminal = CoefficientField::family("tanh_coord(5,1)", 1);
        spec.q = 0;
        return spec;
    }
    if (name == "ou_additive") {
        ProblemSpec spec = base_1d(name);
        spec.drift = {CoefficientField::family("linear(0,-1)", 1)};
        spec.diffusion = {CoefficientField::family("const(1)", 1)};
        spec.delta = 0.5;
        return spec;
    }
    if (name == "gbm_mult") {
        ProblemSpec spec = base_1d(name);
        spec.drift = {CoefficientField::family("linear(0,0.1)", 1)};
        spec.diffusion = {CoefficientField::family("linear(0,0.2)", 1)};
        spec.delta.reset();  // degenerate at the origin; SDE-layer use only
        return spec;
    }
    if (name == "heat_drift") {
        ProblemSpec spec = base_1d(name);
        spec.drift = {CoefficientField::family("const(0.3)", 1)};
        return spec;
    }
    if (name == "heat_c2") {
        ProblemSpec spec = base_1d(name);
        spec.potential = CoefficientField::family("const(2)", 1);
        spec.c0 = 2.0;
        return spec;
    }
    if (name == "heat_sigma") {
        ProblemSpec spec = base_1d(name);
        spec.diffusion = {CoefficientField::family("const(1.7)", 1)};
        spec.delta = 0.5 * 1.7 * 1.7;
        return spec;
    }
    if (name == "heat_poly") {
        ProblemSpec spec = base_1d(name);
        spec.terminal = CoefficientField::expression("x1^2 + x1", 1);
        return spec;
    }
    throw Error("unknown built-in problem '" + name + "'");
}

std::vector<std::string> builtin_problem_names() {
    return {"heat",      "constant",  "growth_q1", "bounded_h", "smoothing", "ou_additive",
            "gbm_mult",  "heat_drift", "heat_c2",  "heat_sigma", "heat_poly"};
}

std::vector<std::string> schauder_sweep_names() {
    return {"heat", "heat_drift", "heat_c2", "heat_sigma", "heat_poly"};
}

}  // namespace kolmo::problems
