// SPDX-License-Identifier: Apache-2.0
#include "kolmo/weight.hpp"

#include "kolmo/error.hpp"

namespace kolmo::spaces {

namespace {

// s^k for integer k >= 0 with the 0^0 = 1 convention.
double pow_int(double s, int k) {
    double r = 1.0;
    while (k-- > 0) r *= s;
    return r;
}

double sumsq(std::span<const double> x) {
    double s = 0;
    for (double v : x) s += v * v;
    return s;
}

}  // namespace

double weight(int q, std::span<const double> x) {
    if (q < 0) throw Error("weight exponent q must be >= 0");
    if (q == 0) return 1.0;
    return 1.0 + pow_int(sumsq(x), q);
}

void weight_gradient(int q, std::span<const double> x, std::span<double> grad) {
    if (q < 0) throw Error("weight exponent q must be >= 0");
    if (q == 0) {
        for (auto& g : grad) g = 0.0;
        return;
    }
    const double s = sumsq(x);
    const double factor = 2.0 * q * pow_int(s, q - 1);
    for (std::size_t i = 0; i < x.size(); ++i) grad[i] = factor * x[i];
}

void weight_hessian(int q, std::span<const double> x, std::span<double> hess) {
    if (q < 0) throw Error("weight exponent q must be >= 0");
    const std::size_t d = x.size();
    for (auto& h : hess) h = 0.0;
    if (q == 0) return;
    const double s = sumsq(x);
    const double diag = 2.0 * q * pow_int(s, q - 1);
    const double cross = (q >= 2) ? 4.0 * q * (q - 1) * pow_int(s, q - 2) : 0.0;
    for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t j = 0; j < d; ++j)
            hess[i * d + j] = cross * x[i] * x[j] + (i == j ? diag : 0.0);
    }
}

}  // namespace kolmo::spaces
