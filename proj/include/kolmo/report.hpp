// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

#include <json.hpp>

namespace kolmo::report {

/// One verified inequality: pass <=> rhs - lhs >= -tolerance. `inputs` is the
/// descriptor (spec id, grids, budgets, seeds) that makes the check
/// reproducible bit-for-bit.
struct BoundCheck {
    std::string theorem;
    double lhs = 0.0;
    double rhs = 0.0;
    double tolerance = 0.0;
    bool pass = false;
    nlohmann::json inputs;
    std::string note;

    double margin() const { return rhs - lhs; }
    nlohmann::json to_json() const;
};

BoundCheck make_check(std::string theorem, double lhs, double rhs, double tolerance,
                      nlohmann::json inputs, std::string note = "");

/// Measured sup values over spheres of increasing radius and the fitted
/// log-log slope against a theoretical exponent (one-sided, with slack).
struct GrowthReport {
    std::string theorem;
    std::vector<double> radii;
    std::vector<double> sup_values;
    double slope = 0.0;
    double exponent = 0.0;  // theoretical
    double slack = 0.0;
    bool pass = false;
    nlohmann::json inputs;
    std::string note;

    nlohmann::json to_json() const;
};

/// Least-squares slope of log(y) against log(x); pairs with y <= 0 are
/// skipped, fewer than two usable pairs give slope 0.
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace kolmo::report
