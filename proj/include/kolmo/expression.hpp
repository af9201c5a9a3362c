// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <span>
#include <string>
#include <vector>

namespace kolmo::problem {

/// Arithmetic expression over `t`, `x1..xd`, numeric literals, the binary
/// operators + - * / ^, unary minus, the functions exp, log, sqrt, abs, sin,
/// cos, tanh, and the two-argument functions min, max.
///
/// Trees are immutable after parsing; evaluation is pure and reentrant.
class ExpressionTree {
public:
    /// Parses `src` for a problem in dimension `d`. Throws ParseError with the
    /// offending position on malformed input, unknown identifiers, or a
    /// variable index exceeding `d`.
    static ExpressionTree parse(const std::string& src, int d);

    /// Evaluates at time `t`, point `x` (size d). Throws EvalError on domain
    /// violations (log/sqrt out of domain, division by zero, invalid powers).
    double eval(double t, std::span<const double> x) const;

    /// Canonical fully parenthesized rendering; reparsing it yields a tree
    /// with identical evaluations.
    std::string to_string() const;

    int dimension() const { return d_; }

private:
    enum class Kind : unsigned char {
        Constant, VarT, VarX,      // VarX carries the 0-based coordinate in `index`
        Add, Sub, Mul, Div, Pow, Neg,
        Fn1,                       // unary function call, `index` = function id
        Fn2                        // min/max, `index` = function id
    };

    struct Node {
        Kind kind;
        int index = 0;    // coordinate or function id
        double value = 0; // Kind::Constant
        int a = -1, b = -1;
    };

    double eval_node(int node, double t, std::span<const double> x) const;
    void print_node(int node, std::string& out) const;

    std::vector<Node> nodes_;
    int root_ = -1;
    int d_ = 0;

    friend class ExpressionParser;
};

}  // namespace kolmo::problem
