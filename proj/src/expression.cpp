// SPDX-License-Identifier: Apache-2.0
#include "kolmo/expression.hpp"

#include <array>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>

#include "kolmo/error.hpp"

namespace kolmo::problem {

namespace {

enum Fn1Id { kExp, kLog, kSqrt, kAbs, kSin, kCos, kTanh, kFn1Count };
enum Fn2Id { kMin, kMax, kFn2Count };

constexpr std::array<const char*, kFn1Count> kFn1Names = {"exp", "log",  "sqrt", "abs",
                                                          "sin", "cos", "tanh"};
constexpr std::array<const char*, kFn2Count> kFn2Names = {"min", "max"};

int fn1_lookup(const std::string& name) {
    for (int i = 0; i < kFn1Count; ++i)
        if (name == kFn1Names[i]) return i;
    return -1;
}

int fn2_lookup(const std::string& name) {
    for (int i = 0; i < kFn2Count; ++i)
        if (name == kFn2Names[i]) return i;
    return -1;
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

/// Recursive-descent parser with precedence climbing.
/// Grammar:
///   expr    := term (('+'|'-') term)*
///   term    := unary (('*'|'/') unary)*
///   unary   := '-' unary | power
///   power   := primary ('^' unary)?          (right associative)
///   primary := number | ident | ident '(' expr (',' expr)? ')' | '(' expr ')'
class ExpressionParser {
public:
    ExpressionParser(const std::string& src, int d, ExpressionTree& tree)
        : src_(src), d_(d), tree_(tree) {}

    void run() {
        tree_.d_ = d_;
        tree_.root_ = parse_expr(0);
        skip_ws();
        if (pos_ != src_.size())
            throw ParseError("unexpected trailing input '" + std::string(1, src_[pos_]) + "'",
                             pos_);
        if (tree_.root_ < 0) throw ParseError("empty expression", 0);
    }

private:
    using Node = ExpressionTree::Node;
    using Kind = ExpressionTree::Kind;

    int add(Node n) {
        tree_.nodes_.push_back(n);
        return static_cast<int>(tree_.nodes_.size()) - 1;
    }

    void skip_ws() {
        while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    }

    bool accept(char c) {
        skip_ws();
        if (pos_ < src_.size() && src_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    void expect(char c, const char* what) {
        if (!accept(c)) throw ParseError(std::string("expected ") + what, pos_);
    }

    int parse_expr(int depth) {
        guard(depth);
        int lhs = parse_term(depth + 1);
        for (;;) {
            if (accept('+'))
                lhs = add({Kind::Add, 0, 0, lhs, parse_term(depth + 1)});
            else if (accept('-'))
                lhs = add({Kind::Sub, 0, 0, lhs, parse_term(depth + 1)});
            else
                return lhs;
        }
    }

    int parse_term(int depth) {
        guard(depth);
        int lhs = parse_unary(depth + 1);
        for (;;) {
            if (accept('*'))
                lhs = add({Kind::Mul, 0, 0, lhs, parse_unary(depth + 1)});
            else if (accept('/'))
                lhs = add({Kind::Div, 0, 0, lhs, parse_unary(depth + 1)});
            else
                return lhs;
        }
    }

    int parse_unary(int depth) {
        guard(depth);
        if (accept('-')) return add({Kind::Neg, 0, 0, parse_unary(depth + 1), -1});
        return parse_power(depth + 1);
    }

    int parse_power(int depth) {
        guard(depth);
        int base = parse_primary(depth + 1);
        if (accept('^')) {
            // right associative, binds tighter than unary minus on the right
            int expo = parse_unary(depth + 1);
            return add({Kind::Pow, 0, 0, base, expo});
        }
        return base;
    }

    int parse_primary(int depth) {
        guard(depth);
        skip_ws();
        if (pos_ >= src_.size()) throw ParseError("unexpected end of expression", pos_);
        const char c = src_[pos_];
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return parse_ident(depth);
        if (c == '(') {
            const std::size_t open = pos_;
            ++pos_;
            int inner = parse_expr(depth + 1);
            if (!accept(')')) throw ParseError("unbalanced parenthesis", open);
            return inner;
        }
        throw ParseError(std::string("unexpected character '") + c + "'", pos_);
    }

    int parse_number() {
        const char* begin = src_.c_str() + pos_;
        char* end = nullptr;
        const double v = std::strtod(begin, &end);
        if (end == begin) throw ParseError("malformed number", pos_);
        pos_ += static_cast<std::size_t>(end - begin);
        return add({Kind::Constant, 0, v, -1, -1});
    }

    int parse_ident(int depth) {
        const std::size_t start = pos_;
        while (pos_ < src_.size() &&
               (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
            ++pos_;
        const std::string name = src_.substr(start, pos_ - start);

        if (accept('(')) {
            if (int id = fn1_lookup(name); id >= 0) {
                int arg = parse_expr(depth + 1);
                expect(')', "')' after function argument");
                return add({Kind::Fn1, id, 0, arg, -1});
            }
            if (int id = fn2_lookup(name); id >= 0) {
                int a = parse_expr(depth + 1);
                expect(',', "',' between arguments");
                int b = parse_expr(depth + 1);
                expect(')', "')' after function arguments");
                return add({Kind::Fn2, id, 0, a, b});
            }
            throw ParseError("unknown function '" + name + "'", start);
        }

        if (name == "t") return add({Kind::VarT, 0, 0, -1, -1});
        if (name.size() >= 2 && name[0] == 'x') {
            bool digits = true;
            for (std::size_t i = 1; i < name.size(); ++i)
                if (!std::isdigit(static_cast<unsigned char>(name[i]))) digits = false;
            if (digits) {
                const long idx = std::strtol(name.c_str() + 1, nullptr, 10);
                if (idx < 1 || idx > d_)
                    throw ParseError("variable index " + std::to_string(idx) +
                                         " out of range for dimension " + std::to_string(d_),
                                     start);
                return add({Kind::VarX, static_cast<int>(idx - 1), 0, -1, -1});
            }
        }
        throw ParseError("unknown identifier '" + name + "'", start);
    }

    void guard(int depth) const {
        if (depth > 200) throw ParseError("expression nested too deeply", pos_);
    }

    const std::string& src_;
    int d_;
    ExpressionTree& tree_;
    std::size_t pos_ = 0;
};

ExpressionTree ExpressionTree::parse(const std::string& src, int d) {
    ExpressionTree tree;
    ExpressionParser(src, d, tree).run();
    return tree;
}

double ExpressionTree::eval(double t, std::span<const double> x) const {
    return eval_node(root_, t, x);
}

double ExpressionTree::eval_node(int node, double t, std::span<const double> x) const {
    const Node& n = nodes_[static_cast<std::size_t>(node)];
    switch (n.kind) {
        case Kind::Constant: return n.value;
        case Kind::VarT: return t;
        case Kind::VarX:
            if (static_cast<std::size_t>(n.index) >= x.size())
                throw EvalError("point dimension smaller than expression dimension");
            return x[static_cast<std::size_t>(n.index)];
        case Kind::Add: return eval_node(n.a, t, x) + eval_node(n.b, t, x);
        case Kind::Sub: return eval_node(n.a, t, x) - eval_node(n.b, t, x);
        case Kind::Mul: return eval_node(n.a, t, x) * eval_node(n.b, t, x);
        case Kind::Div: {
            const double denom = eval_node(n.b, t, x);
            if (denom == 0.0) throw EvalError("division by zero");
            return eval_node(n.a, t, x) / denom;
        }
        case Kind::Pow: {
            const double base = eval_node(n.a, t, x);
            const double expo = eval_node(n.b, t, x);
            if (base < 0.0 && expo != std::floor(expo))
                throw EvalError("negative base raised to non-integer power");
            if (base == 0.0 && expo < 0.0) throw EvalError("zero raised to negative power");
            return std::pow(base, expo);
        }
        case Kind::Neg: return -eval_node(n.a, t, x);
        case Kind::Fn1: {
            const double v = eval_node(n.a, t, x);
            switch (n.index) {
                case kExp: return std::exp(v);
                case kLog:
                    if (v <= 0.0) throw EvalError("log of non-positive value " + format_double(v));
                    return std::log(v);
                case kSqrt:
                    if (v < 0.0) throw EvalError("sqrt of negative value " + format_double(v));
                    return std::sqrt(v);
                case kAbs: return std::fabs(v);
                case kSin: return std::sin(v);
                case kCos: return std::cos(v);
                case kTanh: return std::tanh(v);
                default: break;
            }
            throw EvalError("corrupt function id");
        }
        case Kind::Fn2: {
            const double a = eval_node(n.a, t, x);
            const double b = eval_node(n.b, t, x);
            return n.index == kMin ? std::fmin(a, b) : std::fmax(a, b);
        }
    }
    throw EvalError("corrupt expression node");
}

std::string ExpressionTree::to_string() const {
    std::string out;
    print_node(root_, out);
    return out;
}

void ExpressionTree::print_node(int node, std::string& out) const {
    const Node& n = nodes_[static_cast<std::size_t>(node)];
    auto binary = [&](const char* op) {
        out += '(';
        print_node(n.a, out);
        out += op;
        print_node(n.b, out);
        out += ')';
    };
    switch (n.kind) {
        case Kind::Constant: out += format_double(n.value); return;
        case Kind::VarT: out += 't'; return;
        case Kind::VarX: out += "x" + std::to_string(n.index + 1); return;
        case Kind::Add: binary(" + "); return;
        case Kind::Sub: binary(" - "); return;
        case Kind::Mul: binary("*"); return;
        case Kind::Div: binary("/"); return;
        case Kind::Pow: binary("^"); return;
        case Kind::Neg:
            out += "(-";
            print_node(n.a, out);
            out += ')';
            return;
        case Kind::Fn1:
            out += kFn1Names[static_cast<std::size_t>(n.index)];
            out += '(';
            print_node(n.a, out);
            out += ')';
            return;
        case Kind::Fn2:
            out += kFn2Names[static_cast<std::size_t>(n.index)];
            out += '(';
            print_node(n.a, out);
            out += ", ";
            print_node(n.b, out);
            out += ')';
            return;
    }
}

}  // namespace kolmo::problem
