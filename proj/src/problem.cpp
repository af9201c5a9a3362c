// SPDX-License-Identifier: Apache-2.0
#include "kolmo/problem.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>

#include "kolmo/error.hpp"
#include "kolmo/rng.hpp"
#include "kolmo/weight.hpp"

namespace kolmo::problem {

namespace {

double norm2(std::span<const double> x) {
    double s = 0;
    for (double v : x) s += v * v;
    return std::sqrt(s);
}

double frobenius(std::span<const double> m) {
    double s = 0;
    for (double v : m) s += v * v;
    return std::sqrt(s);
}

// Eigenvalues of a symmetric d x d matrix by cyclic Jacobi; adequate for the
// small dimensions handled here.
std::vector<double> symmetric_eigenvalues(std::vector<double> a, int d) {
    auto at = [&](int i, int j) -> double& { return a[static_cast<std::size_t>(i * d + j)]; };
    for (int sweep = 0; sweep < 64; ++sweep) {
        double off = 0;
        for (int i = 0; i < d; ++i)
            for (int j = i + 1; j < d; ++j) off += at(i, j) * at(i, j);
        if (off < 1e-28) break;
        for (int p = 0; p < d; ++p) {
            for (int q = p + 1; q < d; ++q) {
                if (std::fabs(at(p, q)) < 1e-300) continue;
                const double theta = (at(q, q) - at(p, p)) / (2.0 * at(p, q));
                const double t = (theta >= 0 ? 1.0 : -1.0) /
                                 (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (int k = 0; k < d; ++k) {
                    const double akp = at(k, p), akq = at(k, q);
                    at(k, p) = c * akp - s * akq;
                    at(k, q) = s * akp + c * akq;
                }
                for (int k = 0; k < d; ++k) {
                    const double apk = at(p, k), aqk = at(q, k);
                    at(p, k) = c * apk - s * aqk;
                    at(q, k) = s * apk + c * aqk;
                }
            }
        }
    }
    std::vector<double> eig(static_cast<std::size_t>(d));
    for (int i = 0; i < d; ++i) eig[static_cast<std::size_t>(i)] = at(i, i);
    return eig;
}

}  // namespace

void ProblemSpec::validate_shape() const {
    if (d < 1 || m < 1) throw Error("dimensions must be positive");
    if (!(t0 >= 0.0) || !(t0 < T)) throw Error("time interval must satisfy 0 <= t0 < T");
    if (!std::isfinite(T)) throw Error("horizon T must be finite");
    if (q < 0) throw Error("weight exponent q must be a nonnegative integer");
    if (drift.size() != static_cast<std::size_t>(d)) throw Error("drift must have d entries");
    if (diffusion.size() != static_cast<std::size_t>(d) * static_cast<std::size_t>(m))
        throw Error("diffusion must have d*m entries");
    if (!potential.valid() || !source.valid() || !terminal.valid())
        throw Error("potential, source, and terminal coefficients are required");
}

// ---------------------------------------------------------------------------
// CoeffEval

CoeffEval::CoeffEval(const ProblemSpec& spec)
    : spec_(&spec), d_(spec.d), m_(spec.m) {
    const auto dd = static_cast<std::size_t>(d_);
    buf_sigma_.resize(dd * static_cast<std::size_t>(m_));
    buf_a_.resize(dd * dd);
    buf_b_.resize(dd);
    buf_p1_.resize(dd);
    buf_p2_.resize(dd * dd);
    buf_point_.resize(dd);
}

void CoeffEval::raw_drift(double t, std::span<const double> x, std::span<double> out) {
    for (int i = 0; i < d_; ++i) out[static_cast<std::size_t>(i)] = spec_->drift[static_cast<std::size_t>(i)](t, x);
}

void CoeffEval::raw_sigma(double t, std::span<const double> x, std::span<double> out) {
    const std::size_t n = static_cast<std::size_t>(d_) * static_cast<std::size_t>(m_);
    for (std::size_t i = 0; i < n; ++i) out[i] = spec_->diffusion[i](t, x);
}

void CoeffEval::sigma(double t, std::span<const double> x, std::span<double> out) {
    raw_sigma(t, x, out);  // the weight transform keeps sigma
}

void CoeffEval::diffusion_a(double t, std::span<const double> x, std::span<double> out) {
    raw_sigma(t, x, buf_sigma_);
    const std::size_t d = static_cast<std::size_t>(d_), m = static_cast<std::size_t>(m_);
    for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t j = i; j < d; ++j) {
            double s = 0;
            for (std::size_t k = 0; k < m; ++k) s += buf_sigma_[i * m + k] * buf_sigma_[j * m + k];
            out[i * d + j] = 0.5 * s;
            out[j * d + i] = out[i * d + j];  // symmetric by construction
        }
    }
}

// c_add = (sum a_ij D^ij P + sum b_i D^i P) / P
// b_add_i = 2 (sum_j a_ij D^j P) / P
void CoeffEval::transform_terms(double t, std::span<const double> x, double& c_add,
                                std::span<double> b_add) {
    const int q = spec_->transform_q;
    const std::size_t d = static_cast<std::size_t>(d_);
    const double P = spaces::weight(q, x);
    spaces::weight_gradient(q, x, buf_p1_);
    spaces::weight_hessian(q, x, buf_p2_);
    diffusion_a(t, x, buf_a_);
    raw_drift(t, x, buf_b_);
    double acc = 0;
    for (std::size_t i = 0; i < d; ++i) {
        double row = 0;
        for (std::size_t j = 0; j < d; ++j) {
            acc += buf_a_[i * d + j] * buf_p2_[i * d + j];
            row += buf_a_[i * d + j] * buf_p1_[j];
        }
        acc += buf_b_[i] * buf_p1_[i];
        if (!b_add.empty()) b_add[i] = 2.0 * row / P;
    }
    c_add = acc / P;
}

void CoeffEval::drift(double t, std::span<const double> x, std::span<double> out) {
    raw_drift(t, x, out);
    if (spec_->transform_q > 0) {
        double c_add;
        std::vector<double> b_add(static_cast<std::size_t>(d_));
        transform_terms(t, x, c_add, b_add);
        for (int i = 0; i < d_; ++i) out[static_cast<std::size_t>(i)] += b_add[static_cast<std::size_t>(i)];
    }
}

double CoeffEval::potential(double t, std::span<const double> x) {
    double c = spec_->potential(t, x);
    if (spec_->transform_q > 0) {
        double c_add;
        transform_terms(t, x, c_add, {});
        c -= c_add;
    }
    if (spec_->gamma != 0.0) c -= spec_->gamma;
    return c;
}

double CoeffEval::source(double t, std::span<const double> x) {
    double f = spec_->source(t, x);
    if (spec_->transform_q > 0) f /= spaces::weight(spec_->transform_q, x);
    if (spec_->gamma != 0.0) f *= std::exp(-spec_->gamma * t);
    return f;
}

double CoeffEval::terminal(std::span<const double> x) {
    double h = spec_->terminal(spec_->T, x);
    if (spec_->transform_q > 0) h /= spaces::weight(spec_->transform_q, x);
    if (spec_->gamma != 0.0) h *= std::exp(-spec_->gamma * spec_->T);
    return h;
}

namespace {

// Central differences of an effective scalar closure, step 1e-4 (1 + |x|).
template <typename F>
void fd_gradient_of(F&& f, std::span<const double> x, std::span<double> out,
                    std::vector<double>& scratch) {
    const double h = 1e-4 * (1.0 + norm2(x));
    scratch.assign(x.begin(), x.end());
    for (std::size_t i = 0; i < x.size(); ++i) {
        scratch[i] = x[i] + h;
        const double up = f(std::span<const double>(scratch));
        scratch[i] = x[i] - h;
        const double dn = f(std::span<const double>(scratch));
        scratch[i] = x[i];
        out[i] = (up - dn) / (2.0 * h);
    }
}

}  // namespace

void CoeffEval::drift_jacobian(double t, std::span<const double> x, std::span<double> out) {
    const std::size_t d = static_cast<std::size_t>(d_);
    if (spec_->transform_q > 0) {
        std::vector<double> scratch, row(d);
        for (std::size_t i = 0; i < d; ++i) {
            fd_gradient_of(
                [&](std::span<const double> p) {
                    std::vector<double> b(d);
                    drift(t, p, b);
                    return b[i];
                },
                x, row, scratch);
            for (std::size_t j = 0; j < d; ++j) out[i * d + j] = row[j];
        }
        return;
    }
    std::vector<double> row(d);
    for (std::size_t i = 0; i < d; ++i) {
        spec_->drift[i].gradient(t, x, row);
        for (std::size_t j = 0; j < d; ++j) out[i * d + j] = row[j];
    }
}

void CoeffEval::sigma_jacobian(double t, std::span<const double> x, std::span<double> out) {
    const std::size_t d = static_cast<std::size_t>(d_), m = static_cast<std::size_t>(m_);
    std::vector<double> row(d);
    for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t k = 0; k < m; ++k) {
            spec_->diffusion[i * m + k].gradient(t, x, row);
            for (std::size_t j = 0; j < d; ++j) out[(i * m + k) * d + j] = row[j];
        }
    }
}

void CoeffEval::potential_gradient(double t, std::span<const double> x, std::span<double> out) {
    if (spec_->transform_q > 0) {
        std::vector<double> scratch;
        fd_gradient_of([&](std::span<const double> p) { return potential(t, p); }, x, out,
                       scratch);
        return;
    }
    spec_->potential.gradient(t, x, out);  // the shift is constant in x
}

void CoeffEval::source_gradient(double t, std::span<const double> x, std::span<double> out) {
    if (spec_->transform_q > 0) {
        std::vector<double> scratch;
        fd_gradient_of([&](std::span<const double> p) { return source(t, p); }, x, out, scratch);
        return;
    }
    spec_->source.gradient(t, x, out);
    if (spec_->gamma != 0.0) {
        const double factor = std::exp(-spec_->gamma * t);
        for (auto& g : out) g *= factor;
    }
}

void CoeffEval::terminal_gradient(std::span<const double> x, std::span<double> out) {
    if (spec_->transform_q > 0) {
        std::vector<double> scratch;
        fd_gradient_of([&](std::span<const double> p) { return terminal(p); }, x, out, scratch);
        return;
    }
    spec_->terminal.gradient(spec_->T, x, out);
    if (spec_->gamma != 0.0) {
        const double factor = std::exp(-spec_->gamma * spec_->T);
        for (auto& g : out) g *= factor;
    }
}

Coeffs evaluate_coefficients(const ProblemSpec& spec, double t, std::span<const double> x) {
    spec.validate_shape();
    CoeffEval eval(spec);
    Coeffs out;
    out.b.resize(static_cast<std::size_t>(spec.d));
    out.sigma.resize(static_cast<std::size_t>(spec.d) * static_cast<std::size_t>(spec.m));
    out.a.resize(static_cast<std::size_t>(spec.d) * static_cast<std::size_t>(spec.d));
    eval.drift(t, x, out.b);
    eval.sigma(t, x, out.sigma);
    eval.diffusion_a(t, x, out.a);
    out.c = eval.potential(t, x);
    out.f = eval.source(t, x);
    return out;
}

double evaluate_terminal(const ProblemSpec& spec, std::span<const double> x) {
    CoeffEval eval(spec);
    return eval.terminal(x);
}

ProblemSpec shift_zeroth_order(const ProblemSpec& spec, double gamma) {
    ProblemSpec out = spec;
    out.gamma += gamma;
    out.c0 -= gamma;
    return out;
}

// ---------------------------------------------------------------------------
// Assumption validation

namespace {

struct SamplePoint {
    double t;
    std::vector<double> x;
    double radius;
};

// fail iff the quotient blows up towards the box boundary: max over the outer
// decile of |x| exceeds twice the max over the inner half.
bool diverges_outward(const std::vector<double>& radius, const std::vector<double>& quotient) {
    if (radius.size() < 20) return false;
    std::vector<std::size_t> idx(radius.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(),
              [&](std::size_t a, std::size_t b) { return radius[a] < radius[b]; });
    const std::size_t half = idx.size() / 2;
    const std::size_t decile = idx.size() - std::max<std::size_t>(1, idx.size() / 10);
    double inner = 0, outer = 0;
    for (std::size_t r = 0; r < half; ++r) inner = std::max(inner, quotient[idx[r]]);
    for (std::size_t r = decile; r < idx.size(); ++r) outer = std::max(outer, quotient[idx[r]]);
    return inner > 0 && outer > 2.0 * inner;
}

AssumptionEntry quotient_entry(std::string name, const std::vector<SamplePoint>& pts,
                               const std::vector<double>& quotient, const std::string& note) {
    AssumptionEntry e;
    e.name = std::move(name);
    e.note = note;
    std::vector<double> radius(pts.size());
    std::size_t worst = 0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        radius[i] = pts[i].radius;
        if (quotient[i] > quotient[worst]) worst = i;
    }
    e.constant = quotient.empty() ? 0.0 : quotient[worst];
    e.pass = !diverges_outward(radius, quotient);
    if (!e.pass) {
        e.worst_t = pts[worst].t;
        e.worst_x = pts[worst].x;
    }
    return e;
}

}  // namespace

bool AssumptionReport::all_pass() const {
    return std::all_of(entries.begin(), entries.end(),
                       [](const AssumptionEntry& e) { return e.pass; });
}

const AssumptionEntry* AssumptionReport::find(const std::string& name) const {
    for (const auto& e : entries)
        if (e.name == name) return &e;
    return nullptr;
}

AssumptionReport validate_assumptions(const ProblemSpec& spec, std::span<const double> box_lo,
                                      std::span<const double> box_hi, std::int64_t n_samples,
                                      Profile profile, std::uint64_t seed) {
    spec.validate_shape();
    if (box_lo.size() != static_cast<std::size_t>(spec.d) || box_hi.size() != box_lo.size())
        throw Error("box corners must have dimension d");
    for (std::size_t i = 0; i < box_lo.size(); ++i)
        if (!(box_lo[i] < box_hi[i])) throw Error("box must be nonempty");
    if (n_samples < 2) throw Error("n_samples must be >= 2");

    const std::size_t d = static_cast<std::size_t>(spec.d);
    const std::size_t m = static_cast<std::size_t>(spec.m);
    const auto n = static_cast<std::size_t>(n_samples);
    CoeffEval eval(spec);

    std::vector<SamplePoint> pts(n);
    std::vector<SamplePoint> mates(n);  // A1 pair partners
    for (std::size_t k = 0; k < n; ++k) {
        pts[k].t = spec.t0 + rng::uniform01(seed, 0, k) * (spec.T - spec.t0);
        pts[k].x.resize(d);
        mates[k].t = pts[k].t;
        mates[k].x.resize(d);
        for (std::size_t i = 0; i < d; ++i) {
            pts[k].x[i] = box_lo[i] + rng::uniform01(seed, i + 1, k) * (box_hi[i] - box_lo[i]);
            mates[k].x[i] =
                box_lo[i] + rng::uniform01(seed, d + i + 1, k) * (box_hi[i] - box_lo[i]);
        }
        pts[k].radius = norm2(pts[k].x);
        mates[k].radius = norm2(mates[k].x);
    }

    AssumptionReport report;
    report.profile = profile;
    report.n_samples = n_samples;
    report.seed = seed;

    std::vector<double> b1(d), b2(d), s1(d * m), s2(d * m), a(d * d);

    // A1: Lipschitz quotient over sampled pairs
    {
        std::vector<double> quot(n, 0.0), sep(n, 0.0);
        for (std::size_t k = 0; k < n; ++k) {
            eval.drift(pts[k].t, pts[k].x, b1);
            eval.drift(mates[k].t, mates[k].x, b2);
            eval.sigma(pts[k].t, pts[k].x, s1);
            eval.sigma(mates[k].t, mates[k].x, s2);
            double dist2 = 0;
            for (std::size_t i = 0; i < d; ++i) {
                const double dv = pts[k].x[i] - mates[k].x[i];
                dist2 += dv * dv;
            }
            const double dist = std::sqrt(dist2);
            sep[k] = dist;
            if (dist < 1e-12) continue;
            double num = 0;
            for (std::size_t i = 0; i < d; ++i) {
                const double dv = b1[i] - b2[i];
                num += dv * dv;
            }
            num = std::sqrt(num);
            double ns = 0;
            for (std::size_t i = 0; i < d * m; ++i) {
                const double dv = s1[i] - s2[i];
                ns += dv * dv;
            }
            quot[k] = (num + std::sqrt(ns)) / dist;
        }
        AssumptionEntry e;
        e.name = "A1-lipschitz";
        e.note = "max pairwise (|b(y)-b(y')|+|sigma(y)-sigma(y')|)/|y-y'|";
        // diverging quotient at shrinking separations flags a non-Lipschitz kink
        std::vector<double> inv_sep(n);
        for (std::size_t k = 0; k < n; ++k) inv_sep[k] = sep[k] > 0 ? 1.0 / sep[k] : 0.0;
        std::size_t worst = 0;
        for (std::size_t k = 0; k < n; ++k)
            if (quot[k] > quot[worst]) worst = k;
        e.constant = quot[worst];
        e.pass = !diverges_outward(inv_sep, quot);
        if (!e.pass) {
            e.worst_t = pts[worst].t;
            e.worst_x = pts[worst].x;
        }
        report.entries.push_back(std::move(e));
    }

    // A2: linear growth quotient
    {
        std::vector<double> quot(n);
        for (std::size_t k = 0; k < n; ++k) {
            eval.drift(pts[k].t, pts[k].x, b1);
            eval.sigma(pts[k].t, pts[k].x, s1);
            quot[k] = (norm2(b1) + frobenius(s1)) / (1.0 + pts[k].radius);
        }
        report.entries.push_back(
            quotient_entry("A2-linear-growth", pts, quot, "max (|b|+|sigma|)/(1+|x|)"));
    }

    // K1: uniform ellipticity of a = sigma sigma^T / 2
    {
        AssumptionEntry e;
        e.name = "K1-ellipticity";
        e.note = "min over samples of the smallest eigenvalue of a(t,x)";
        double worst_val = std::numeric_limits<double>::infinity();
        std::size_t worst = 0;
        for (std::size_t k = 0; k < n; ++k) {
            eval.diffusion_a(pts[k].t, pts[k].x, a);
            const auto eig = symmetric_eigenvalues(a, spec.d);
            const double lam = *std::min_element(eig.begin(), eig.end());
            if (lam < worst_val) {
                worst_val = lam;
                worst = k;
            }
        }
        e.constant = worst_val;
        e.pass = worst_val > 0.0;
        if (!e.pass) {
            e.worst_t = pts[worst].t;
            e.worst_x = pts[worst].x;
        }
        report.entries.push_back(std::move(e));
    }

    // c >= c0
    {
        AssumptionEntry e;
        e.name = "c-lower-bound";
        e.note = "min over samples of c(t,x) - c0";
        double worst_val = std::numeric_limits<double>::infinity();
        std::size_t worst = 0;
        for (std::size_t k = 0; k < n; ++k) {
            const double margin = eval.potential(pts[k].t, pts[k].x) - spec.c0;
            if (margin < worst_val) {
                worst_val = margin;
                worst = k;
            }
        }
        e.constant = worst_val;
        e.pass = worst_val >= -1e-12 * std::max(1.0, std::fabs(spec.c0));
        if (!e.pass) {
            e.worst_t = pts[worst].t;
            e.worst_x = pts[worst].x;
        }
        report.entries.push_back(std::move(e));
    }

    if (profile == Profile::Strict) {
        // pure-axis derivative probes of order 1..3; steps widen with order
        auto axis_derivative = [&](const CoefficientField& field, const SamplePoint& p, int order,
                                   std::size_t axis) {
            const double h = (order == 1 ? 1e-4 : order == 2 ? 1e-3 : 5e-3) * (1.0 + p.radius);
            std::vector<double> y = p.x;
            auto at = [&](double offset) {
                y[axis] = p.x[axis] + offset;
                const double v = field(p.t, y);
                y[axis] = p.x[axis];
                return v;
            };
            switch (order) {
                case 1: return (at(h) - at(-h)) / (2 * h);
                case 2: return (at(h) - 2 * at(0) + at(-h)) / (h * h);
                default: return (at(2 * h) - 2 * at(h) + 2 * at(-h) - at(-2 * h)) / (2 * h * h * h);
            }
        };

        auto derivative_entry = [&](const std::string& label,
                                    std::span<const CoefficientField> fields, int order) {
            std::vector<double> quot(n, 0.0);
            for (std::size_t k = 0; k < n; ++k) {
                double mx = 0;
                for (const auto& field : fields)
                    for (std::size_t axis = 0; axis < d; ++axis)
                        mx = std::max(mx, std::fabs(axis_derivative(field, pts[k], order, axis)));
                quot[k] = mx;
            }
            return quotient_entry(label + "-deriv-bound-" + std::to_string(order), pts, quot,
                                  "max |D^alpha " + label + "|, pure-axis probe");
        };

        for (int order = 1; order <= 3; ++order) {
            report.entries.push_back(derivative_entry("b", spec.drift, order));
            report.entries.push_back(derivative_entry("sigma", spec.diffusion, order));
            std::array<CoefficientField, 1> cfield = {spec.potential};
            report.entries.push_back(derivative_entry("c", cfield, order));
        }

        // diffusion band: C1 (1+|x|)^{1/2} <= s_min(sigma) and s_max(sigma) <= C2 (1+|x|)
        {
            AssumptionEntry e;
            e.name = "sigma-band";
            double c1 = std::numeric_limits<double>::infinity();
            double c2 = 0;
            std::vector<double> upper_quot(n);
            std::size_t worst = 0;
            for (std::size_t k = 0; k < n; ++k) {
                eval.sigma(pts[k].t, pts[k].x, s1);
                // eigenvalues of sigma sigma^T
                std::vector<double> gram(d * d, 0.0);
                for (std::size_t i = 0; i < d; ++i)
                    for (std::size_t j = 0; j < d; ++j) {
                        double s = 0;
                        for (std::size_t kk = 0; kk < m; ++kk)
                            s += s1[i * m + kk] * s1[j * m + kk];
                        gram[i * d + j] = s;
                    }
                const auto eig = symmetric_eigenvalues(gram, spec.d);
                const double smin = std::sqrt(std::max(0.0, *std::min_element(eig.begin(), eig.end())));
                const double smax = std::sqrt(std::max(0.0, *std::max_element(eig.begin(), eig.end())));
                const double lo_q = smin / std::sqrt(1.0 + pts[k].radius);
                upper_quot[k] = smax / (1.0 + pts[k].radius);
                if (lo_q < c1) {
                    c1 = lo_q;
                    worst = k;
                }
                c2 = std::max(c2, upper_quot[k]);
            }
            e.constant = c1;
            e.note = "band on singular values of sigma; C1=" + std::to_string(c1) +
                     " C2=" + std::to_string(c2);
            std::vector<double> radius(n);
            for (std::size_t k = 0; k < n; ++k) radius[k] = pts[k].radius;
            e.pass = c1 > 0.0 && !diverges_outward(radius, upper_quot);
            if (!e.pass) {
                e.worst_t = pts[worst].t;
                e.worst_x = pts[worst].x;
            }
            report.entries.push_back(std::move(e));
        }
    }

    return report;
}

}  // namespace kolmo::problem
