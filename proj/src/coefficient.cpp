// SPDX-License-Identifier: Apache-2.0
#include "kolmo/coefficient.hpp"

#include <cmath>
#include <cstdio>
#include <vector>

#include "kolmo/error.hpp"
#include "kolmo/weight.hpp"

namespace kolmo::problem {

namespace {

double norm2(std::span<const double> x) {
    double s = 0;
    for (double v : x) s += v * v;
    return std::sqrt(s);
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

std::string GrowthClass::to_string() const {
    switch (kind) {
        case Bounded: return "bounded";
        case Linear: return "linear";
        case Polynomial: return "poly:" + std::to_string(degree);
    }
    return "bounded";
}

GrowthClass GrowthClass::parse(const std::string& text) {
    if (text == "bounded") return {Bounded, 0};
    if (text == "linear") return {Linear, 1};
    if (text.rfind("poly:", 0) == 0) return {Polynomial, std::atoi(text.c_str() + 5)};
    throw Error("unknown growth class '" + text + "'");
}

struct CoefficientField::Impl {
    // exactly one of expr / fn is active
    std::unique_ptr<ExpressionTree> expr;
    std::function<double(double, std::span<const double>)> fn;
    std::function<void(double, std::span<const double>, std::span<double>)> grad;
    GrowthClass growth;
    std::string source;
    int d = 0;
};

CoefficientField CoefficientField::expression(const std::string& src, int d) {
    auto impl = std::make_shared<Impl>();
    impl->expr = std::make_unique<ExpressionTree>(ExpressionTree::parse(src, d));
    impl->growth = {GrowthClass::Polynomial, 2};
    impl->source = "expr: " + src;
    impl->d = d;
    CoefficientField f;
    f.impl_ = std::move(impl);
    return f;
}

namespace {

struct FamilySpec {
    std::string name;
    std::vector<double> args;
};

FamilySpec parse_family_spec(const std::string& text) {
    const auto open = text.find('(');
    if (open == std::string::npos || text.back() != ')')
        throw Error("malformed family spec '" + text + "', expected name(arg,...)");
    FamilySpec out;
    out.name = text.substr(0, open);
    std::string args = text.substr(open + 1, text.size() - open - 2);
    std::size_t pos = 0;
    while (pos < args.size()) {
        auto comma = args.find(',', pos);
        if (comma == std::string::npos) comma = args.size();
        const std::string piece = args.substr(pos, comma - pos);
        char* end = nullptr;
        const double v = std::strtod(piece.c_str(), &end);
        if (end == piece.c_str()) throw Error("malformed family argument '" + piece + "'");
        out.args.push_back(v);
        pos = comma + 1;
    }
    return out;
}

void require_args(const FamilySpec& fs, std::size_t lo, std::size_t hi) {
    if (fs.args.size() < lo || fs.args.size() > hi)
        throw Error("family '" + fs.name + "' takes " + std::to_string(lo) +
                    (hi > lo ? ".." + std::to_string(hi) : "") + " arguments, got " +
                    std::to_string(fs.args.size()));
}

}  // namespace

CoefficientField CoefficientField::family(const std::string& spec, int d) {
    const FamilySpec fs = parse_family_spec(spec);
    auto impl = std::make_shared<Impl>();
    impl->d = d;
    impl->source = "family: " + fs.name + "(";
    for (std::size_t i = 0; i < fs.args.size(); ++i) {
        if (i) impl->source += ", ";
        impl->source += format_double(fs.args[i]);
    }
    impl->source += ")";

    const auto& a = fs.args;
    if (fs.name == "const") {
        require_args(fs, 1, 1);
        const double v = a[0];
        impl->fn = [v](double, std::span<const double>) { return v; };
        impl->grad = [](double, std::span<const double>, std::span<double> g) {
            for (auto& gi : g) gi = 0.0;
        };
        impl->growth = {GrowthClass::Bounded, 0};
    } else if (fs.name == "linear") {
        // a0 + sum_i c_i x_i
        require_args(fs, 1, static_cast<std::size_t>(d) + 1);
        std::vector<double> coef(a.begin() + 1, a.end());
        coef.resize(static_cast<std::size_t>(d), 0.0);
        const double a0 = a[0];
        impl->fn = [a0, coef](double, std::span<const double> x) {
            double s = a0;
            for (std::size_t i = 0; i < coef.size(); ++i) s += coef[i] * x[i];
            return s;
        };
        impl->grad = [coef](double, std::span<const double>, std::span<double> g) {
            for (std::size_t i = 0; i < coef.size(); ++i) g[i] = coef[i];
        };
        impl->growth = {GrowthClass::Linear, 1};
    } else if (fs.name == "quad") {
        // k * |x|^2
        require_args(fs, 1, 1);
        const double k = a[0];
        impl->fn = [k](double, std::span<const double> x) {
            double s = 0;
            for (double v : x) s += v * v;
            return k * s;
        };
        impl->grad = [k](double, std::span<const double> x, std::span<double> g) {
            for (std::size_t i = 0; i < x.size(); ++i) g[i] = 2.0 * k * x[i];
        };
        impl->growth = {GrowthClass::Polynomial, 2};
    } else if (fs.name == "weight") {
        // 1 + |x|^{2q} (q = 0 convention: identically 1)
        require_args(fs, 1, 1);
        const int q = static_cast<int>(a[0]);
        if (q < 0) throw Error("weight(q) requires q >= 0");
        impl->fn = [q](double, std::span<const double> x) { return spaces::weight(q, x); };
        impl->grad = [q](double, std::span<const double> x, std::span<double> g) {
            spaces::weight_gradient(q, x, g);
        };
        impl->growth = {GrowthClass::Polynomial, 2 * q};
    } else if (fs.name == "linear_growth") {
        // s0 + s1 |x|
        require_args(fs, 2, 2);
        const double s0 = a[0], s1 = a[1];
        impl->fn = [s0, s1](double, std::span<const double> x) { return s0 + s1 * norm2(x); };
        impl->grad = [s1](double, std::span<const double> x, std::span<double> g) {
            const double r = norm2(x);
            for (std::size_t i = 0; i < x.size(); ++i) g[i] = r > 0 ? s1 * x[i] / r : 0.0;
        };
        impl->growth = {GrowthClass::Linear, 1};
    } else if (fs.name == "tanh_coord") {
        // tanh(k * x_i), i 1-based
        require_args(fs, 2, 2);
        const double k = a[0];
        const int i = static_cast<int>(a[1]) - 1;
        if (i < 0 || i >= d) throw Error("tanh_coord coordinate out of range");
        impl->fn = [k, i](double, std::span<const double> x) { return std::tanh(k * x[i]); };
        impl->grad = [k, i](double, std::span<const double> x, std::span<double> g) {
            for (auto& gi : g) gi = 0.0;
            const double th = std::tanh(k * x[i]);
            g[static_cast<std::size_t>(i)] = k * (1.0 - th * th);
        };
        impl->growth = {GrowthClass::Bounded, 0};
    } else if (fs.name == "exp_time") {
        // A * exp(k * t); x-independent
        require_args(fs, 2, 2);
        const double A = a[0], k = a[1];
        impl->fn = [A, k](double t, std::span<const double>) { return A * std::exp(k * t); };
        impl->grad = [](double, std::span<const double>, std::span<double> g) {
            for (auto& gi : g) gi = 0.0;
        };
        impl->growth = {GrowthClass::Bounded, 0};
    } else {
        throw Error("unknown coefficient family '" + fs.name + "'");
    }

    CoefficientField f;
    f.impl_ = std::move(impl);
    return f;
}

CoefficientField CoefficientField::from_function(
    std::string label, int d, std::function<double(double, std::span<const double>)> fn,
    std::function<void(double, std::span<const double>, std::span<double>)> grad,
    GrowthClass growth) {
    auto impl = std::make_shared<Impl>();
    impl->fn = std::move(fn);
    impl->grad = std::move(grad);
    impl->growth = growth;
    impl->source = "fn: " + label;
    impl->d = d;
    CoefficientField f;
    f.impl_ = std::move(impl);
    return f;
}

std::vector<std::string> family_names() {
    return {"const", "linear", "quad", "weight", "linear_growth", "tanh_coord", "exp_time"};
}

double CoefficientField::operator()(double t, std::span<const double> x) const {
    if (!impl_) throw Error("evaluating an empty CoefficientField");
    return impl_->expr ? impl_->expr->eval(t, x) : impl_->fn(t, x);
}

bool CoefficientField::has_analytic_gradient() const {
    return impl_ && static_cast<bool>(impl_->grad);
}

void CoefficientField::fd_gradient(double t, std::span<const double> x,
                                   std::span<double> out) const {
    const double h = 1e-4 * (1.0 + norm2(x));
    std::vector<double> p(x.begin(), x.end());
    for (std::size_t i = 0; i < x.size(); ++i) {
        p[i] = x[i] + h;
        const double up = (*this)(t, p);
        p[i] = x[i] - h;
        const double dn = (*this)(t, p);
        p[i] = x[i];
        out[i] = (up - dn) / (2.0 * h);
    }
}

void CoefficientField::gradient(double t, std::span<const double> x,
                                std::span<double> out) const {
    if (has_analytic_gradient())
        impl_->grad(t, x, out);
    else
        fd_gradient(t, x, out);
}

GrowthClass CoefficientField::growth() const {
    return impl_ ? impl_->growth : GrowthClass{};
}

void CoefficientField::set_growth(GrowthClass g) {
    if (!impl_) throw Error("set_growth on empty CoefficientField");
    // copy-on-write: implementations are shared
    auto copy = std::make_shared<Impl>();
    copy->fn = impl_->fn;
    copy->grad = impl_->grad;
    copy->growth = g;
    copy->source = impl_->source;
    copy->d = impl_->d;
    if (impl_->expr) copy->expr = std::make_unique<ExpressionTree>(*impl_->expr);
    impl_ = std::move(copy);
}

const std::string& CoefficientField::source() const {
    static const std::string empty;
    return impl_ ? impl_->source : empty;
}

int CoefficientField::dimension() const { return impl_ ? impl_->d : 0; }

}  // namespace kolmo::problem
