// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>

#include "kolmo/problem.hpp"

namespace kolmo::problem {

/// Problem file format: a nested key-value text format with three sections.
///
///   # comment
///   [dimensions]
///   d = 1
///   m = 1
///   [coefficients]
///   drift.1     = family: const(0)        # or  expr: -x1 + sin(t)
///   sigma.1.1   = family: const(1.4142135623730951)
///   potential   = family: const(1)
///   source      = family: const(0)
///   terminal    = family: quad(1)
///   terminal.growth = poly:2              # optional growth annotation
///   [constants]
///   T = 1
///   t0 = 0
///   c0 = 1
///   q = 1
///   delta = 1                             # optional
///
/// Coefficient sources are stored verbatim, so write(parse(text)) == text up
/// to comments and blank lines. Shift/transform decorations are derived state
/// and are not part of the format.
ProblemSpec read_problem(const std::string& text);
ProblemSpec read_problem_file(const std::string& path);
std::string write_problem(const ProblemSpec& spec);
void write_problem_file(const ProblemSpec& spec, const std::string& path);

}  // namespace kolmo::problem
