// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

#include "kolmo/problem.hpp"

namespace kolmo::problems {

/// Built-in problem families used by the verification suite and the tests.
///
///   heat          b=0, sigma=sqrt(2), c=1, f=0, h=x^2        (closed form)
///   constant      b=0, sigma=1, c=1, f=0, h=2.5              (path-independent)
///   growth_q1     heat with f=-2 e^{t-T}: u = e^{-(T-t)} x^2 (pure quadratic)
///   bounded_h     heat data replaced by h=tanh(x1)
///   smoothing     heat data replaced by h=tanh(5 x1)
///   ou_additive   b=-x, sigma=1 (additive noise)
///   gbm_mult      b=0.1x, sigma=0.2x (multiplicative noise)
///   heat_drift    heat with b=0.3
///   heat_c2       heat with c=2
///   heat_sigma    heat with sigma=1.7
///   heat_poly     heat with h=x1^2+x1
problem::ProblemSpec make_builtin_problem(const std::string& name);

std::vector<std::string> builtin_problem_names();

/// The five-member sweep used by the Schauder-ratio stability check.
std::vector<std::string> schauder_sweep_names();

}  // namespace kolmo::problems
