// SPDX-License-Identifier: Apache-2.0
#include "kolmo/report.hpp"

#include <cmath>

namespace kolmo::report {

nlohmann::json BoundCheck::to_json() const {
    return {{"kind", "bound"},   {"theorem", theorem}, {"lhs", lhs},
            {"rhs", rhs},        {"margin", margin()}, {"tolerance", tolerance},
            {"pass", pass},      {"inputs", inputs},   {"note", note}};
}

BoundCheck make_check(std::string theorem, double lhs, double rhs, double tolerance,
                      nlohmann::json inputs, std::string note) {
    BoundCheck c;
    c.theorem = std::move(theorem);
    c.lhs = lhs;
    c.rhs = rhs;
    c.tolerance = tolerance;
    c.pass = (rhs - lhs) >= -tolerance;
    c.inputs = std::move(inputs);
    c.note = std::move(note);
    return c;
}

nlohmann::json GrowthReport::to_json() const {
    return {{"kind", "growth"},     {"theorem", theorem}, {"radii", radii},
            {"sup_values", sup_values}, {"slope", slope}, {"exponent", exponent},
            {"slack", slack},       {"pass", pass},       {"inputs", inputs},
            {"note", note}};
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int n = 0;
    for (std::size_t i = 0; i < x.size() && i < y.size(); ++i) {
        if (!(y[i] > 0.0) || !(x[i] > 0.0)) continue;
        const double lx = std::log(x[i]);
        const double ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
        ++n;
    }
    if (n < 2) return 0.0;
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace kolmo::report
