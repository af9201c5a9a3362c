// SPDX-License-Identifier: Apache-2.0
#include "kolmo/spaces.hpp"

#include <algorithm>
#include <cmath>

#include "kolmo/error.hpp"
#include "kolmo/rng.hpp"

namespace kolmo::spaces {

namespace {

constexpr std::size_t kExhaustiveLimit = 10000;

double dist(std::span<const double> a, std::span<const double> b) {
    double s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double dv = a[i] - b[i];
        s += dv * dv;
    }
    return std::sqrt(s);
}

}  // namespace

double holder_seminorm(std::span<const Sample> samples, double beta) {
    if (samples.size() < 2) throw Error("holder_seminorm needs at least 2 samples");
    if (!(beta > 0.0 && beta < 1.0)) throw Error("beta must lie in (0,1)");

    std::vector<const Sample*> pts;
    pts.reserve(std::min(samples.size(), kExhaustiveLimit));
    if (samples.size() <= kExhaustiveLimit) {
        for (const auto& s : samples) pts.push_back(&s);
    } else {
        // fixed-stride thinning keeps the computation exhaustive on a
        // deterministic subset
        const double stride = static_cast<double>(samples.size()) / kExhaustiveLimit;
        for (std::size_t i = 0; i < kExhaustiveLimit; ++i)
            pts.push_back(&samples[static_cast<std::size_t>(i * stride)]);
    }

    double best = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        for (std::size_t j = i + 1; j < pts.size(); ++j) {
            const double r = dist(pts[i]->x, pts[j]->x);
            if (r == 0.0) throw Error("holder_seminorm: duplicate points in the cloud");
            best = std::max(best, std::fabs(pts[i]->value - pts[j]->value) / std::pow(r, beta));
        }
    }
    return best;
}

// ---------------------------------------------------------------------------
// multi-indices

std::vector<MultiIndex> multi_indices_up_to(int d, int p) {
    std::vector<MultiIndex> out;
    MultiIndex cur(static_cast<std::size_t>(d), 0);
    // enumerate by total order for a stable, readable slot layout
    std::function<void(int, int)> rec = [&](int axis, int remaining) {
        if (axis == d - 1) {
            cur[static_cast<std::size_t>(axis)] = remaining;
            out.push_back(cur);
            return;
        }
        for (int k = remaining; k >= 0; --k) {
            cur[static_cast<std::size_t>(axis)] = k;
            rec(axis + 1, remaining - k);
        }
    };
    for (int order = 0; order <= p; ++order) rec(0, order);
    return out;
}

int multi_index_order(const MultiIndex& alpha) {
    int s = 0;
    for (int v : alpha) s += v;
    return s;
}

std::string multi_index_name(const MultiIndex& alpha) {
    std::string s = "D(";
    for (std::size_t i = 0; i < alpha.size(); ++i) {
        if (i) s += ',';
        s += std::to_string(alpha[i]);
    }
    return s + ")";
}

int DerivCloud::slot(const MultiIndex& alpha) const {
    for (std::size_t i = 0; i < alphas.size(); ++i)
        if (alphas[i] == alpha) return static_cast<int>(i);
    throw Error("derivative multi-index not stored in the cloud");
}

DerivCloud DerivCloud::from_function(const problem::CoefficientField& fn, double t,
                                     std::span<const std::vector<double>> pts, int p,
                                     std::string descriptor) {
    if (pts.empty()) throw Error("empty cloud");
    DerivCloud cloud;
    cloud.d = static_cast<int>(pts.front().size());
    cloud.p = p;
    cloud.alphas = multi_indices_up_to(cloud.d, p);
    cloud.descriptor = std::move(descriptor);
    cloud.points.assign(pts.begin(), pts.end());
    cloud.derivs.resize(pts.size());

    // nested central differences per axis order; matches the coefficient
    // machinery's relative steps
    std::function<double(const problem::CoefficientField&, std::vector<double>&, const MultiIndex&,
                         int)>
        deriv = [&](const problem::CoefficientField& f, std::vector<double>& x,
                    const MultiIndex& alpha, int axis) -> double {
        while (axis < cloud.d && alpha[static_cast<std::size_t>(axis)] == 0) ++axis;
        if (axis == cloud.d) return f(t, x);
        MultiIndex rest = alpha;
        rest[static_cast<std::size_t>(axis)] = 0;
        double r = 0;
        for (double v : x) r += v * v;
        const int order = alpha[static_cast<std::size_t>(axis)];
        const double h = (order == 1 ? 1e-4 : order == 2 ? 5e-4 : 2e-3) * (1.0 + std::sqrt(r));
        const double x0 = x[static_cast<std::size_t>(axis)];
        auto at = [&](double off) {
            x[static_cast<std::size_t>(axis)] = x0 + off;
            const double v = deriv(f, x, rest, axis + 1);
            x[static_cast<std::size_t>(axis)] = x0;
            return v;
        };
        switch (order) {
            case 1: return (at(h) - at(-h)) / (2 * h);
            case 2: return (at(h) - 2 * at(0) + at(-h)) / (h * h);
            case 3: return (at(2 * h) - 2 * at(h) + 2 * at(-h) - at(-2 * h)) / (2 * h * h * h);
            default: throw Error("cloud derivatives support order <= 3");
        }
    };

    std::vector<double> x;
    for (std::size_t n = 0; n < cloud.points.size(); ++n) {
        cloud.derivs[n].resize(cloud.alphas.size());
        for (std::size_t s = 0; s < cloud.alphas.size(); ++s) {
            const auto& alpha = cloud.alphas[s];
            const int order = multi_index_order(alpha);
            x = cloud.points[n];
            if (order == 0) {
                cloud.derivs[n][s] = fn(t, x);
            } else if (order == 1 && fn.has_analytic_gradient()) {
                std::vector<double> g(static_cast<std::size_t>(cloud.d));
                fn.gradient(t, x, g);
                int axis = 0;
                while (alpha[static_cast<std::size_t>(axis)] == 0) ++axis;
                cloud.derivs[n][s] = g[static_cast<std::size_t>(axis)];
            } else {
                cloud.derivs[n][s] = deriv(fn, x, alpha, 0);
            }
        }
    }
    return cloud;
}

DerivCloud DerivCloud::from_field_slice(const field::Field& field, int k, int p,
                                        int extra_margin) {
    const auto& box = field.box;
    DerivCloud cloud;
    cloud.d = box.dim();
    cloud.p = p;
    cloud.alphas = multi_indices_up_to(cloud.d, p);
    cloud.descriptor = "field-slice(k=" + std::to_string(k) + ", source=" + field.source + ")";

    const int margin = (p >= 3 ? 2 : 1) + extra_margin;
    std::vector<int> idx(static_cast<std::size_t>(cloud.d));
    std::vector<double> pt(static_cast<std::size_t>(cloud.d));
    for (std::int64_t s = 0; s < box.slice_size(); ++s) {
        box.unflatten(s, idx);
        bool inside = true;
        for (int a = 0; a < cloud.d; ++a) {
            const int n = box.nodes[static_cast<std::size_t>(a)];
            if (idx[static_cast<std::size_t>(a)] < margin || idx[static_cast<std::size_t>(a)] >= n - margin)
                inside = false;
        }
        if (!inside) continue;
        box.spatial_point(s, pt);
        cloud.points.push_back(pt);
        std::vector<double> row(cloud.alphas.size());
        for (std::size_t slot = 0; slot < cloud.alphas.size(); ++slot)
            row[slot] = field.derivative(k, idx, cloud.alphas[slot]);
        cloud.derivs.push_back(std::move(row));
    }
    if (cloud.points.empty()) throw Error("field slice too small for the requested derivatives");
    return cloud;
}

std::vector<std::vector<double>> norm_cloud(std::span<const double> lo,
                                            std::span<const double> hi, int per_axis,
                                            int fill_points, std::uint64_t seed) {
    const int d = static_cast<int>(lo.size());
    std::vector<std::vector<double>> pts;
    // tensor grid
    std::vector<int> idx(static_cast<std::size_t>(d), 0);
    for (;;) {
        std::vector<double> p(static_cast<std::size_t>(d));
        for (int a = 0; a < d; ++a)
            p[static_cast<std::size_t>(a)] =
                lo[static_cast<std::size_t>(a)] +
                (per_axis == 1 ? 0.5 : static_cast<double>(idx[static_cast<std::size_t>(a)]) / (per_axis - 1)) *
                    (hi[static_cast<std::size_t>(a)] - lo[static_cast<std::size_t>(a)]);
        pts.push_back(std::move(p));
        int a = 0;
        while (a < d && ++idx[static_cast<std::size_t>(a)] == per_axis) idx[static_cast<std::size_t>(a++)] = 0;
        if (a == d) break;
    }
    // low-discrepancy fill
    for (int n = 0; n < fill_points; ++n) {
        std::vector<double> p(static_cast<std::size_t>(d));
        for (int a = 0; a < d; ++a) {
            const double u = rng::uniform01(seed, static_cast<std::uint64_t>(a),
                                            static_cast<std::uint64_t>(n));
            p[static_cast<std::size_t>(a)] = lo[static_cast<std::size_t>(a)] +
                                             u * (hi[static_cast<std::size_t>(a)] -
                                                  lo[static_cast<std::size_t>(a)]);
        }
        pts.push_back(std::move(p));
    }
    return pts;
}

// ---------------------------------------------------------------------------
// weighted norms

namespace {

// D^alpha (f/P) for |alpha| <= 2, assembled from D^alpha f and analytic P
// derivatives via the quotient rule.
struct WeightedSlice {
    double g;                    // f/P
    std::vector<double> g1;      // first derivatives
    std::vector<double> g2;      // second derivatives, row-major
};

WeightedSlice quotient_derivatives(std::span<const double> x, int q, double f,
                                   std::span<const double> f1, std::span<const double> f2,
                                   int p) {
    const int d = static_cast<int>(x.size());
    const auto dd = static_cast<std::size_t>(d);
    const double P = weight(q, x);
    WeightedSlice out;
    out.g = f / P;
    if (p >= 1) {
        std::vector<double> P1(dd);
        weight_gradient(q, x, P1);
        out.g1.resize(dd);
        for (std::size_t i = 0; i < dd; ++i) out.g1[i] = (f1[i] - out.g * P1[i]) / P;
        if (p >= 2) {
            std::vector<double> P2(dd * dd);
            weight_hessian(q, x, P2);
            out.g2.resize(dd * dd);
            for (std::size_t i = 0; i < dd; ++i)
                for (std::size_t j = 0; j < dd; ++j)
                    out.g2[i * dd + j] = (f2[i * dd + j] - out.g1[i] * P1[j] - out.g1[j] * P1[i] -
                                          out.g * P2[i * dd + j]) /
                                         P;
        }
    }
    return out;
}

}  // namespace

nlohmann::json WeightedNormResult::to_json() const {
    nlohmann::json j = {{"variant", variant == NormVariant::Standard ? "standard" : "triple_bar"},
                        {"q", q},
                        {"p", p},
                        {"value", value},
                        {"terms", terms},
                        {"cloud", cloud}};
    if (beta) j["beta"] = *beta;
    return j;
}

WeightedNormResult weighted_norm(const DerivCloud& cloud, int q, int p,
                                 std::optional<double> beta, NormVariant variant) {
    if (p > 2) throw Error("weighted_norm supports p <= 2");
    if (cloud.p < p) throw Error("cloud does not carry derivatives up to order p");
    const int d = cloud.d;
    const auto dd = static_cast<std::size_t>(d);
    const std::size_t n = cloud.points.size();

    const auto alphas = multi_indices_up_to(d, p);
    // per-alpha transformed values at every point
    std::vector<std::vector<double>> vals(alphas.size(), std::vector<double>(n));

    std::vector<double> f1(dd), f2(dd * dd);
    for (std::size_t k = 0; k < n; ++k) {
        const auto& x = cloud.points[k];
        const double f = cloud.derivs[k][static_cast<std::size_t>(cloud.slot(MultiIndex(dd, 0)))];
        if (variant == NormVariant::Standard) {
            if (p >= 1) {
                for (int i = 0; i < d; ++i) {
                    MultiIndex a(dd, 0);
                    a[static_cast<std::size_t>(i)] = 1;
                    f1[static_cast<std::size_t>(i)] = cloud.derivs[k][static_cast<std::size_t>(cloud.slot(a))];
                }
            }
            if (p >= 2) {
                for (int i = 0; i < d; ++i)
                    for (int j = 0; j < d; ++j) {
                        MultiIndex a(dd, 0);
                        a[static_cast<std::size_t>(i)] += 1;
                        a[static_cast<std::size_t>(j)] += 1;
                        f2[static_cast<std::size_t>(i) * dd + static_cast<std::size_t>(j)] =
                            cloud.derivs[k][static_cast<std::size_t>(cloud.slot(a))];
                    }
            }
            const WeightedSlice ws = quotient_derivatives(x, q, f, f1, f2, p);
            for (std::size_t s = 0; s < alphas.size(); ++s) {
                const auto& alpha = alphas[s];
                const int order = multi_index_order(alpha);
                if (order == 0) {
                    vals[s][k] = ws.g;
                } else if (order == 1) {
                    int axis = 0;
                    while (alpha[static_cast<std::size_t>(axis)] == 0) ++axis;
                    vals[s][k] = ws.g1[static_cast<std::size_t>(axis)];
                } else {
                    int i = -1, j = -1;
                    for (int a = 0; a < d; ++a) {
                        for (int rep = 0; rep < alpha[static_cast<std::size_t>(a)]; ++rep) {
                            if (i < 0)
                                i = a;
                            else
                                j = a;
                        }
                    }
                    vals[s][k] = ws.g2[static_cast<std::size_t>(i) * dd + static_cast<std::size_t>(j)];
                }
            }
        } else {
            const double P = weight(q, x);
            for (std::size_t s = 0; s < alphas.size(); ++s)
                vals[s][k] = cloud.derivs[k][static_cast<std::size_t>(cloud.slot(alphas[s]))] / P;
        }
    }

    WeightedNormResult result;
    result.q = q;
    result.p = p;
    result.beta = beta;
    result.variant = variant;
    result.cloud = cloud.descriptor;

    double total = 0;
    for (std::size_t s = 0; s < alphas.size(); ++s) {
        double sup = 0;
        for (double v : vals[s]) sup = std::max(sup, std::fabs(v));
        result.terms["sup|" + multi_index_name(alphas[s]) + "|"] = sup;
        total += sup;
    }
    if (beta) {
        std::vector<Sample> samples(n);
        for (std::size_t k = 0; k < n; ++k) samples[k].x = cloud.points[k];
        for (std::size_t s = 0; s < alphas.size(); ++s) {
            if (multi_index_order(alphas[s]) != p) continue;
            for (std::size_t k = 0; k < n; ++k) samples[k].value = vals[s][k];
            const double semi = holder_seminorm(samples, *beta);
            result.terms["[" + multi_index_name(alphas[s]) + "]_beta"] = semi;
            total += semi;
        }
    }
    result.value = total;
    return result;
}

// ---------------------------------------------------------------------------
// weight transform

problem::ProblemSpec transform_to_bounded(const problem::ProblemSpec& spec, int q,
                                          std::span<const double> sample_lo,
                                          std::span<const double> sample_hi) {
    spec.validate_shape();
    if (q < 1) throw Error("transform_to_bounded requires q >= 1 (q = 0 is the identity)");
    if (spec.transform_q != 0)
        throw Error("spec already carries a weight transform; compose transforms explicitly");

    problem::ProblemSpec out = spec;
    out.transform_q = q;

    // sampled lower bound of the effective potential becomes the new c0
    std::vector<double> lo(sample_lo.begin(), sample_lo.end());
    std::vector<double> hi(sample_hi.begin(), sample_hi.end());
    if (lo.empty()) {
        lo.assign(static_cast<std::size_t>(spec.d), -8.0);
        hi.assign(static_cast<std::size_t>(spec.d), 8.0);
    }
    problem::CoeffEval eval(out);
    double cmin = std::numeric_limits<double>::infinity();
    std::vector<double> pt(static_cast<std::size_t>(spec.d));
    const int n_samples = 512;
    for (int k = 0; k < n_samples; ++k) {
        const double t = spec.t0 + rng::uniform01(11u, 0, static_cast<std::uint64_t>(k)) *
                                       (spec.T - spec.t0);
        for (int i = 0; i < spec.d; ++i)
            pt[static_cast<std::size_t>(i)] =
                lo[static_cast<std::size_t>(i)] +
                rng::uniform01(11u, static_cast<std::uint64_t>(i + 1), static_cast<std::uint64_t>(k)) *
                    (hi[static_cast<std::size_t>(i)] - lo[static_cast<std::size_t>(i)]);
        cmin = std::min(cmin, eval.potential(t, pt));
    }
    out.c0 = cmin;
    return out;
}

}  // namespace kolmo::spaces
