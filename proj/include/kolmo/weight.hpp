// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <span>

namespace kolmo::spaces {

/// Polynomial weight P(x) = 1 + |x|^{2q} for q >= 1; the q = 0 case is the
/// unweighted convention P == 1.
double weight(int q, std::span<const double> x);

/// Analytic first derivatives D^i P, written to `grad` (size d).
void weight_gradient(int q, std::span<const double> x, std::span<double> grad);

/// Analytic second derivatives D^{ij} P, written row-major to `hess` (size d*d).
void weight_hessian(int q, std::span<const double> x, std::span<double> hess);

}  // namespace kolmo::spaces
