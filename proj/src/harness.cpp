// SPDX-License-Identifier: Apache-2.0
#include "kolmo/harness.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <thread>

#include "kolmo/error.hpp"
#include "kolmo/problem_io.hpp"
#include "kolmo/problems.hpp"
#include "kolmo/rng.hpp"

namespace kolmo::harness {

using nlohmann::json;

namespace {

json mc_to_json(const sde::McParams& mc) {
    return {{"n_paths", mc.n_paths}, {"n_steps", mc.n_steps}, {"seed", mc.seed},
            {"antithetic", mc.antithetic}};
}

json box_to_json(const field::Box& box) {
    return {{"lo", box.lo},     {"hi", box.hi}, {"nodes", box.nodes},
            {"t1", box.t1},     {"t2", box.t2}, {"n_time", box.n_time}};
}

// scales h and f (used by the Schauder homogeneity machinery)
problem::ProblemSpec scaled_data_spec(const problem::ProblemSpec& spec, double lambda) {
    if (lambda == 1.0) return spec;
    auto scaled = [&](const problem::CoefficientField& base, const char* label) {
        return problem::CoefficientField::from_function(
            std::string(label) + " scaled by " + std::to_string(lambda), spec.d,
            [base, lambda](double t, std::span<const double> x) { return lambda * base(t, x); },
            [base, lambda](double t, std::span<const double> x, std::span<double> g) {
                base.gradient(t, x, g);
                for (auto& v : g) v *= lambda;
            },
            base.growth());
    };
    problem::ProblemSpec out = spec;
    out.terminal = scaled(spec.terminal, "h");
    out.source = scaled(spec.source, "f");
    return out;
}

bool source_is_zero(const problem::ProblemSpec& spec) {
    problem::CoeffEval eval(spec);
    std::vector<double> pt(static_cast<std::size_t>(spec.d));
    for (int k = 0; k < 32; ++k) {
        const double t = spec.t0 + rng::uniform01(3u, 0, static_cast<std::uint64_t>(k)) *
                                       (spec.T - spec.t0);
        for (int i = 0; i < spec.d; ++i)
            pt[static_cast<std::size_t>(i)] =
                -8.0 + 16.0 * rng::uniform01(3u, static_cast<std::uint64_t>(i + 1),
                                             static_cast<std::uint64_t>(k));
        if (std::fabs(eval.source(t, pt)) > 1e-13) return false;
    }
    return true;
}

}  // namespace

// ---------------------------------------------------------------------------
// maximum principle

report::BoundCheck check_max_principle(const problem::ProblemSpec& spec,
                                       const field::Field& values, const field::Field* stderrs,
                                       const MaxPrincipleParams& params) {
    spec.validate_shape();
    if (!source_is_zero(spec))
        throw Error("check_max_principle requires a homogeneous problem (f == 0)");
    const auto& box = values.box;
    const double c0 = spec.c0 + params.c0_inflation;

    double worst = -std::numeric_limits<double>::infinity();
    json slices = json::array();
    for (int k = 0; k <= box.n_time; ++k) {
        double lhs = 0, se = 0;
        for (std::int64_t s = 0; s < box.slice_size(); ++s) {
            lhs = std::max(lhs, std::fabs(values.at(k, s)));
            if (stderrs) se = std::max(se, stderrs->at(k, s));
        }
        const double rhs = std::exp(-c0 * (spec.T - box.time(k))) * params.h_sup;
        const double deficit = lhs - rhs - (3.0 * se + params.allowance);
        worst = std::max(worst, deficit);
        slices.push_back({{"t", box.time(k)}, {"lhs", lhs}, {"rhs", rhs}, {"stderr", se}});
    }

    json inputs = {{"spec", spec.name},
                   {"grid", box_to_json(box)},
                   {"field_source", values.source},
                   {"h_sup", params.h_sup},
                   {"allowance", params.allowance},
                   {"c0_inflation", params.c0_inflation},
                   {"slices", slices}};
    return report::make_check("th_162-max-principle", worst, 0.0, 0.0, std::move(inputs),
                              "worst slice of max|u| - e^{-c0 (T-t)} sup|h| - 3 stderr - allowance");
}

// ---------------------------------------------------------------------------
// growth exponents

namespace {

// deterministic direction set on the unit sphere
std::vector<std::vector<double>> sphere_directions(int d, int n) {
    std::vector<std::vector<double>> dirs;
    if (d == 1) {
        dirs.push_back({1.0});
        dirs.push_back({-1.0});
        return dirs;
    }
    for (int k = 0; k < n; ++k) {
        std::vector<double> v(static_cast<std::size_t>(d));
        if (d == 2) {
            const double ang = 2.0 * M_PI * k / n;
            v = {std::cos(ang), std::sin(ang)};
        } else {
            // Fibonacci sphere
            const double z = 1.0 - 2.0 * (k + 0.5) / n;
            const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
            const double ang = k * 2.399963229728653;
            v[0] = r * std::cos(ang);
            v[1] = r * std::sin(ang);
            v[2] = z;
            for (int i = 3; i < d; ++i) v[static_cast<std::size_t>(i)] = 0.0;
        }
        dirs.push_back(std::move(v));
    }
    return dirs;
}

}  // namespace

report::GrowthReport check_growth(const problem::ProblemSpec& spec, const GrowthParams& params) {
    spec.validate_shape();
    if (params.radii.size() < 2) throw Error("check_growth needs at least two radii");
    for (std::size_t i = 0; i + 1 < params.radii.size(); ++i)
        if (!(params.radii[i] < params.radii[i + 1])) throw Error("radii must be increasing");
    if (params.radii.back() < 10.0 * params.radii.front() - 1e-12)
        throw Error("radii must span at least one decade");
    if (params.alpha_order < 0 || params.alpha_order > 1)
        throw Error("check_growth handles |alpha| <= 1");

    const auto dirs = sphere_directions(spec.d, std::max(2, params.sphere_samples));
    report::GrowthReport rep;
    rep.theorem = params.alpha_order == 0 ? "th_141-growth" : "eq_148a-gradient-growth";
    rep.radii = params.radii;
    rep.slack = params.slack;
    rep.exponent = params.alpha_order == 0 ? 2.0 * spec.q
                                           : 2.0 * spec.q * (1 + params.alpha_order);

    std::vector<double> x(static_cast<std::size_t>(spec.d));
    for (std::size_t ri = 0; ri < params.radii.size(); ++ri) {
        const double r = params.radii[ri];
        double sup = 0;
        for (std::size_t di = 0; di < dirs.size(); ++di) {
            for (int i = 0; i < spec.d; ++i)
                x[static_cast<std::size_t>(i)] = r * dirs[di][static_cast<std::size_t>(i)];
            sde::McParams mc = params.mc;
            mc.seed = rng::derive_seed(params.mc.seed,
                                       static_cast<std::uint64_t>(ri * 131 + di));
            if (params.alpha_order == 0) {
                sup = std::max(sup, std::fabs(fk::estimate_value(spec, params.t, x, mc).scalar()));
            } else {
                const auto est = fk::estimate_gradient(spec, params.t, x, mc);
                double norm = 0;
                for (double g : est.mean) norm += g * g;
                sup = std::max(sup, std::sqrt(norm));
            }
        }
        rep.sup_values.push_back(sup);
    }

    rep.slope = report::loglog_slope(rep.radii, rep.sup_values);
    rep.pass = rep.slope <= rep.exponent + rep.slack;
    rep.inputs = {{"spec", spec.name},
                  {"t", params.t},
                  {"alpha_order", params.alpha_order},
                  {"mc", mc_to_json(params.mc)},
                  {"directions", dirs.size()}};
    if (params.alpha_order == 1)
        rep.note = "paper exponent 2q(1+|alpha|) = " + std::to_string(rep.exponent) +
                   "; sharper weight-2q bound for bounded grad c: " + std::to_string(2.0 * spec.q);
    return rep;
}

// ---------------------------------------------------------------------------
// Schauder ratio

namespace {

struct SolvedField {
    field::Field u;
};

SolvedField solve_on_box(const problem::ProblemSpec& spec, const field::Box& box,
                         const sde::McParams& boundary_mc, int anchor_times, double theta) {
    fd::McBoundaryParams mcb{boundary_mc, anchor_times};
    const auto boundary = fd::mc_boundary(spec, box, mcb);
    const auto terminal = fd::mc_terminal(spec, box, boundary_mc);
    fd::SolveOptions opts;
    opts.theta = theta;
    return {fd::solve_dirichlet(spec, box, terminal, boundary, opts)};
}

}  // namespace

report::BoundCheck check_schauder_ratio(const problem::ProblemSpec& base,
                                        const SchauderParams& params) {
    base.validate_shape();
    const problem::ProblemSpec spec = scaled_data_spec(base, params.data_scale);
    field::Box box = params.box;
    box.t2 = spec.T;  // the estimate is stated up to the horizon
    box.validate();

    const SolvedField solved = solve_on_box(spec, box, params.boundary_mc, params.anchor_times,
                                            params.theta);
    const int q = spec.q;
    const double beta = params.beta;

    // solution-side norm over interior time slices
    double solution_norm = 0;
    json slices = json::array();
    const int n_slices = std::max(2, params.n_norm_slices);
    for (int j = 0; j < n_slices; ++j) {
        const int k = static_cast<int>(std::lround(
            static_cast<double>(j) * (box.n_time - 1) / (n_slices - 1)));
        const auto cloud = spaces::DerivCloud::from_field_slice(solved.u, k, 2,
                                                                params.extra_margin);
        const double tk = box.time(k);
        double value = 0;
        if (params.mode == SchauderMode::Interior) {
            const double bc = spaces::weighted_norm(cloud, q, 0, std::nullopt,
                                                    spaces::NormVariant::Standard)
                                  .value;
            const double h2b = spaces::weighted_norm(cloud, q, 2, beta,
                                                     spaces::NormVariant::Standard)
                                   .value;
            value = bc + std::pow(spec.T - tk, 1.0 + beta / 2.0) * h2b;
            slices.push_back({{"t", tk}, {"bc_p", bc}, {"h2beta_p", h2b}, {"value", value}});
        } else {
            value = spaces::weighted_norm(cloud, q, 2, beta, spaces::NormVariant::Standard).value;
            slices.push_back({{"t", tk}, {"h2beta_p", value}});
        }
        solution_norm = std::max(solution_norm, value);
    }

    // data-side norm on an analytic cloud over the trimmed box
    std::vector<double> lo = box.lo, hi = box.hi;
    for (int a = 0; a < box.dim(); ++a) {
        const double trim = params.extra_margin * box.step(a);
        lo[static_cast<std::size_t>(a)] += trim;
        hi[static_cast<std::size_t>(a)] -= trim;
    }
    const auto cloud_pts = spaces::norm_cloud(lo, hi, 41, 96);
    const auto h_cloud = spaces::DerivCloud::from_function(
        spec.terminal, spec.T, cloud_pts, 2, "analytic terminal cloud");
    double data_norm = 0;
    if (params.mode == SchauderMode::Interior) {
        data_norm += spaces::weighted_norm(h_cloud, q, 0, std::nullopt,
                                           spaces::NormVariant::Standard)
                         .value;
    } else {
        data_norm += spaces::weighted_norm(h_cloud, q, 2, beta, spaces::NormVariant::Standard)
                         .value;
    }
    double f_norm = 0;
    if (!source_is_zero(spec)) {
        for (int j = 0; j <= 4; ++j) {
            const double t = box.t1 + j * (spec.T - box.t1) / 4.0;
            const auto f_cloud = spaces::DerivCloud::from_function(spec.source, t, cloud_pts, 0,
                                                                   "analytic source cloud");
            f_norm = std::max(f_norm,
                              spaces::weighted_norm(f_cloud, q, 0, beta,
                                                    spaces::NormVariant::Standard)
                                  .value);
        }
    }
    data_norm += f_norm;

    json inputs = {{"spec", base.name},
                   {"mode", params.mode == SchauderMode::Interior ? "interior" : "optimal"},
                   {"box", box_to_json(box)},
                   {"beta", beta},
                   {"q", q},
                   {"data_scale", params.data_scale},
                   {"boundary_mc", mc_to_json(params.boundary_mc)},
                   {"solution_norm", solution_norm},
                   {"data_norm", data_norm},
                   {"slices", slices},
                   {"frozen_constant", params.frozen_constant}};

    if (data_norm == 0.0 && solution_norm == 0.0) {
        return report::make_check("schauder-ratio", 0.0, std::log2(params.stability_factor), 0.0,
                                  std::move(inputs), "zero data: vacuous pass");
    }
    const double ratio = solution_norm / data_norm;
    inputs["ratio"] = ratio;
    const double lhs = std::fabs(std::log2(ratio / params.frozen_constant));
    const char* theorem = params.mode == SchauderMode::Interior
                              ? "cor_161/th_166-interior-schauder"
                              : "th_165/th_166-optimal-schauder";
    return report::make_check(theorem, lhs, std::log2(params.stability_factor), 0.0,
                              std::move(inputs),
                              "|log2(ratio / frozen)| vs log2(stability factor)");
}

// ---------------------------------------------------------------------------
// smoothing

report::BoundCheck check_smoothing(const problem::ProblemSpec& spec,
                                   const SmoothingParams& params) {
    spec.validate_shape();
    if (params.times.size() < 2) throw Error("check_smoothing needs a ladder of times");
    if (params.p2 < 1 || params.p2 > 2) throw Error("check_smoothing targets p2 in {1, 2}");
    if (!source_is_zero(spec)) throw Error("check_smoothing requires f == 0");

    field::Box box = params.box;
    box.t1 = *std::min_element(params.times.begin(), params.times.end());
    box.t2 = spec.T;
    box.n_time = params.n_time;
    box.validate();
    const double t_max = *std::max_element(params.times.begin(), params.times.end());
    if (spec.T - t_max < 2.0 * box.dt())
        throw Error("smoothing ladder too close to T for the time resolution");

    // terminal data exactly, lateral data by MC anchors; theta = 1 keeps the
    // scheme monotone for kinked terminal data
    const SolvedField solved = solve_on_box(spec, box, params.boundary_mc, params.anchor_times,
                                            1.0);

    // inner-region margin in nodes
    int extra = 0;
    for (int a = 0; a < box.dim(); ++a) {
        const int n = box.nodes[static_cast<std::size_t>(a)];
        extra = std::max(extra, static_cast<int>(std::lround(
                                    (1.0 - params.inner_fraction) * 0.5 * (n - 1))));
    }

    std::vector<double> gaps, norms;
    json ladder = json::array();
    for (double t : params.times) {
        const int k = static_cast<int>(std::lround((t - box.t1) / box.dt()));
        const auto cloud = spaces::DerivCloud::from_field_slice(solved.u, k, params.p2, extra);
        const double norm = spaces::weighted_norm(cloud, 0, params.p2, std::nullopt,
                                                  spaces::NormVariant::Standard)
                                .value;
        gaps.push_back(spec.T - box.time(k));
        norms.push_back(norm);
        ladder.push_back({{"t", box.time(k)}, {"gap", spec.T - box.time(k)}, {"norm", norm}});
    }

    const double fitted = -report::loglog_slope(gaps, norms);
    json inputs = {{"spec", spec.name},       {"p2", params.p2},
                   {"box", box_to_json(box)}, {"boundary_mc", mc_to_json(params.boundary_mc)},
                   {"ladder", ladder},        {"fitted_exponent", fitted},
                   {"inner_fraction", params.inner_fraction}};
    return report::make_check("th_163-smoothing", fitted,
                              0.5 * params.p2 + params.slack, 0.0, std::move(inputs),
                              "fitted blow-up exponent of ||G(t,T)h||_{BC^p2} vs (p2-p1)/2 + slack");
}

// ---------------------------------------------------------------------------
// Bernstein functional

double bernstein_cutoff(double r, double radius) {
    const double half = 0.5 * radius;
    if (r <= half) return 1.0;
    if (r >= radius) return 0.0;
    const double s = (r - half) / half;
    // C^3 smoothstep
    const double s4 = s * s * s * s;
    return 1.0 - (35.0 * s4 - 84.0 * s4 * s + 70.0 * s4 * s * s - 20.0 * s4 * s * s * s);
}

std::pair<field::Field, report::BoundCheck> bernstein_functional(
    const problem::ProblemSpec& spec, const field::Field& u_field,
    const BernsteinParams& params) {
    spec.validate_shape();
    const auto& box = u_field.box;
    const int d = box.dim();
    for (int a = 0; a < d; ++a)
        if (box.nodes[static_cast<std::size_t>(a)] < 7)
            throw Error("bernstein_functional: grid too coarse for third derivatives");

    field::Box inner = box;
    for (int a = 0; a < d; ++a) {
        inner.lo[static_cast<std::size_t>(a)] += 2 * box.step(a);
        inner.hi[static_cast<std::size_t>(a)] -= 2 * box.step(a);
        inner.nodes[static_cast<std::size_t>(a)] -= 4;
    }
    field::Field v = field::Field::zeros(inner, "FD");

    const auto alphas1 = spaces::multi_indices_up_to(d, 1);
    std::vector<int> idx_in(static_cast<std::size_t>(d)), idx(static_cast<std::size_t>(d));
    std::vector<double> pt(static_cast<std::size_t>(d));

    const std::array<double, 3> a_ladder = {params.a, params.a / 2.0, params.a / 4.0};
    std::array<double, 3> sup_v{};

    for (int k = 0; k <= box.n_time; ++k) {
        const double tau = box.t2 - box.time(k);
        for (std::int64_t s = 0; s < inner.slice_size(); ++s) {
            inner.unflatten(s, idx_in);
            for (int a = 0; a < d; ++a)
                idx[static_cast<std::size_t>(a)] = idx_in[static_cast<std::size_t>(a)] + 2;
            box.spatial_point(box.flatten(idx), pt);
            double r = 0;
            for (double c : pt) r += c * c;
            const double eta = bernstein_cutoff(std::sqrt(r), params.radius);

            const double u0 = u_field.at(k, box.flatten(idx));
            double s1 = 0, s2 = 0, s3 = 0;
            std::vector<int> alpha(static_cast<std::size_t>(d), 0);
            for (int i = 0; i < d; ++i) {
                std::fill(alpha.begin(), alpha.end(), 0);
                alpha[static_cast<std::size_t>(i)] = 1;
                const double der = u_field.derivative(k, idx, alpha);
                s1 += der * der;
            }
            for (int i = 0; i < d; ++i)
                for (int j = 0; j < d; ++j) {
                    std::fill(alpha.begin(), alpha.end(), 0);
                    alpha[static_cast<std::size_t>(i)] += 1;
                    alpha[static_cast<std::size_t>(j)] += 1;
                    const double der = u_field.derivative(k, idx, alpha);
                    s2 += der * der;
                }
            for (int i = 0; i < d; ++i)
                for (int j = 0; j < d; ++j)
                    for (int l = 0; l < d; ++l) {
                        std::fill(alpha.begin(), alpha.end(), 0);
                        alpha[static_cast<std::size_t>(i)] += 1;
                        alpha[static_cast<std::size_t>(j)] += 1;
                        alpha[static_cast<std::size_t>(l)] += 1;
                        const double der = u_field.derivative(k, idx, alpha);
                        s3 += der * der;
                    }

            const double e2 = eta * eta;
            for (std::size_t ai = 0; ai < a_ladder.size(); ++ai) {
                const double a_val = a_ladder[ai];
                const double vr = u0 * u0 + a_val * tau * e2 * s1 +
                                  a_val * a_val * tau * tau * e2 * e2 * s2 +
                                  a_val * a_val * a_val * tau * tau * tau * e2 * e2 * e2 * s3;
                if (ai == 0) v.at(k, s) = vr;
                sup_v[ai] = std::max(sup_v[ai], vr);
            }
        }
    }

    const bool monotone = sup_v[0] >= sup_v[1] - 1e-12 * std::max(1.0, sup_v[0]) &&
                          sup_v[1] >= sup_v[2] - 1e-12 * std::max(1.0, sup_v[0]);
    json inputs = {{"spec", spec.name},
                   {"a_ladder", a_ladder},
                   {"sup_v", sup_v},
                   {"radius", params.radius},
                   {"h_sup", params.h_sup},
                   {"frozen_constant", params.frozen_constant},
                   {"monotone", monotone}};
    report::BoundCheck check = report::make_check(
        "th_163-bernstein", sup_v[0], params.frozen_constant * params.h_sup * params.h_sup, 0.0,
        std::move(inputs), "sup v_R vs frozen C sup|h|^2; also requires monotone sup as a halves");
    check.pass = check.pass && monotone;
    return {std::move(v), std::move(check)};
}

// ---------------------------------------------------------------------------
// transform cross check

report::BoundCheck transform_cross_check(const problem::ProblemSpec& spec,
                                         const TransformCrossParams& params) {
    spec.validate_shape();
    if (params.transform_q < 1) throw Error("transform_cross_check requires q >= 1");
    field::Box box = params.box;
    box.validate();

    const problem::ProblemSpec tspec = spaces::transform_to_bounded(spec, params.transform_q);

    // terminal of the transformed problem is exact at the horizon
    const auto terminal = fd::mc_terminal(tspec, box, params.boundary_mc);
    // lateral data: MC of the original divided by the transform weight
    fd::McBoundaryParams mcb{params.boundary_mc, params.anchor_times};
    const auto raw_boundary = fd::mc_boundary(spec, box, mcb);
    const int tq = params.transform_q;
    const fd::BoundaryFn boundary = [raw_boundary, tq](double t, std::span<const double> x) {
        return raw_boundary(t, x) / spaces::weight(tq, x);
    };

    fd::SolveOptions opts;
    opts.theta = params.theta;
    const field::Field v_field = fd::solve_dirichlet(tspec, box, terminal, boundary, opts);

    const int d = box.dim();
    std::vector<double> pt(static_cast<std::size_t>(d));
    double worst = -std::numeric_limits<double>::infinity();
    json probes = json::array();
    for (int pidx = 0; pidx < std::max(1, params.n_probes); ++pidx) {
        std::vector<int> idx(static_cast<std::size_t>(d));
        for (int a = 0; a < d; ++a) {
            const int n = box.nodes[static_cast<std::size_t>(a)];
            const double u = rng::uniform01(0x7F0A11ull, static_cast<std::uint64_t>(a),
                                            static_cast<std::uint64_t>(pidx));
            idx[static_cast<std::size_t>(a)] = std::min(1 + static_cast<int>(u * (n - 2)), n - 2);
        }
        const int kt = std::min(
            1 + static_cast<int>(rng::uniform01(0x7F0A11ull, 77, static_cast<std::uint64_t>(pidx)) *
                                 std::max(1, box.n_time - 1)),
            box.n_time - 1);
        const std::int64_t flat = box.flatten(idx);
        box.spatial_point(flat, pt);
        const double t = box.time(kt);

        sde::McParams imc = params.interior_mc;
        imc.seed = rng::derive_seed(params.interior_mc.seed,
                                    rng::derive_seed(0x7BA2ull, static_cast<std::uint64_t>(pidx)));
        const fk::Estimate est = fk::estimate_value(spec, t, pt, imc);
        const double recovered = v_field.at(kt, flat) * spaces::weight(params.multiply_q, pt);
        const double gap = std::fabs(recovered - est.scalar()) - 3.0 * est.scalar_se();
        worst = std::max(worst, gap);
        probes.push_back({{"t", t}, {"x", pt}, {"recovered", recovered}, {"mc", est.scalar()},
                          {"stderr", est.scalar_se()}});
    }

    json inputs = {{"spec", spec.name},
                   {"transform_q", params.transform_q},
                   {"multiply_q", params.multiply_q},
                   {"box", box_to_json(box)},
                   {"interior_mc", mc_to_json(params.interior_mc)},
                   {"boundary_mc", mc_to_json(params.boundary_mc)},
                   {"anchor_times", params.anchor_times},
                   {"transformed_c0", tspec.c0},
                   {"probes", probes}};
    return report::make_check("th_166-transform", worst, params.allowance, 0.0, std::move(inputs),
                              "max over probes of |P v_fd - mc| - 3 stderr vs allowance");
}

// ---------------------------------------------------------------------------
// suite

bool SuiteResult::all_pass() const {
    return std::all_of(records.begin(), records.end(),
                       [](const SuiteRecord& r) { return r.pass; });
}

std::vector<std::string> SuiteResult::failures() const {
    std::vector<std::string> out;
    for (const auto& r : records)
        if (!r.pass) out.push_back(r.name);
    return out;
}

json SuiteResult::to_json() const {
    json arr = json::array();
    for (const auto& r : records) {
        json entry = r.record;
        entry["name"] = r.name;
        arr.push_back(entry);
    }
    return arr;
}

std::string SuiteResult::summary() const {
    std::ostringstream out;
    for (const auto& r : records)
        out << (r.pass ? "[PASS] " : "[FAIL] ") << r.name << "\n";
    out << (all_pass() ? "suite: all checks passed" : "suite: FAILURES present") << "\n";
    return out.str();
}

namespace {

problem::ProblemSpec problem_from_json(const json& j) {
    if (j.is_string()) return problems::make_builtin_problem(j.get<std::string>());
    if (j.contains("file")) return problem::read_problem_file(j["file"].get<std::string>());
    throw Error("check config: 'problem' must be a builtin name or {\"file\": path}");
}

field::Box box_from_json(const json& j) {
    field::Box box;
    box.lo = j.at("lo").get<std::vector<double>>();
    box.hi = j.at("hi").get<std::vector<double>>();
    box.nodes = j.at("nodes").get<std::vector<int>>();
    box.t1 = j.value("t1", 0.0);
    box.t2 = j.value("t2", 1.0);
    box.n_time = j.value("n_time", 100);
    return box;
}

sde::McParams mc_from_json(const json& j, std::uint64_t default_seed, int workers) {
    sde::McParams mc;
    mc.n_paths = j.value("n_paths", static_cast<std::int64_t>(10000));
    mc.n_steps = j.value("n_steps", 100);
    mc.seed = j.value("seed", default_seed);
    mc.antithetic = j.value("antithetic", false);
    mc.n_workers = workers;
    return mc;
}

SuiteRecord run_one_check(const json& cfg, std::uint64_t suite_seed, int workers) {
    SuiteRecord rec;
    rec.name = cfg.value("name", cfg.value("type", "unnamed"));
    const std::uint64_t seed = rng::derive_seed(suite_seed, rec.name);
    try {
        const std::string type = cfg.at("type").get<std::string>();
        const auto spec = problem_from_json(cfg.at("problem"));

        if (type == "max_principle") {
            const field::Box grid = box_from_json(cfg.at("grid"));
            const auto mc = mc_from_json(cfg.value("mc", json::object()), seed, workers);
            auto [values, stderrs] = fk::estimate_on_grid(spec, grid, mc);
            MaxPrincipleParams p;
            p.h_sup = cfg.at("h_sup").get<double>();
            p.allowance = cfg.value("allowance", 0.0);
            p.c0_inflation = cfg.value("c0_inflation", 0.0);
            const auto check = check_max_principle(spec, values, &stderrs, p);
            rec.pass = check.pass;
            rec.record = check.to_json();
        } else if (type == "growth") {
            GrowthParams p;
            p.radii = cfg.at("radii").get<std::vector<double>>();
            p.t = cfg.value("t", spec.t0);
            p.alpha_order = cfg.value("alpha_order", 0);
            p.mc = mc_from_json(cfg.value("mc", json::object()), seed, workers);
            p.slack = cfg.value("slack", 0.3);
            const auto rep = check_growth(spec, p);
            rec.pass = rep.pass;
            rec.record = rep.to_json();
        } else if (type == "schauder") {
            SchauderParams p;
            p.mode = cfg.value("mode", std::string("interior")) == "optimal"
                         ? SchauderMode::Optimal
                         : SchauderMode::Interior;
            p.box = box_from_json(cfg.at("box"));
            p.beta = cfg.value("beta", 0.5);
            p.boundary_mc = mc_from_json(cfg.value("boundary_mc", json::object()), seed, workers);
            p.anchor_times = cfg.value("anchor_times", 13);
            p.n_norm_slices = cfg.value("n_norm_slices", 5);
            p.extra_margin = cfg.value("extra_margin", 4);
            p.data_scale = cfg.value("data_scale", 1.0);
            p.frozen_constant = cfg.at("frozen_constant").get<double>();
            p.stability_factor = cfg.value("stability_factor", 2.0);
            const auto check = check_schauder_ratio(spec, p);
            rec.pass = check.pass;
            rec.record = check.to_json();
        } else if (type == "smoothing") {
            SmoothingParams p;
            p.times = cfg.at("times").get<std::vector<double>>();
            p.p2 = cfg.value("p2", 1);
            p.box = box_from_json(cfg.at("box"));
            p.n_time = cfg.value("n_time", 400);
            p.boundary_mc = mc_from_json(cfg.value("boundary_mc", json::object()), seed, workers);
            p.anchor_times = cfg.value("anchor_times", 13);
            p.inner_fraction = cfg.value("inner_fraction", 0.5);
            p.slack = cfg.value("slack", 0.15);
            const auto check = check_smoothing(spec, p);
            rec.pass = check.pass;
            rec.record = check.to_json();
        } else if (type == "bernstein") {
            BernsteinParams p;
            p.a = cfg.value("a", 0.01);
            p.radius = cfg.value("radius", 4.0);
            p.h_sup = cfg.at("h_sup").get<double>();
            p.frozen_constant = cfg.at("frozen_constant").get<double>();
            field::Box box = box_from_json(cfg.at("box"));
            // terminal eta h, zero lateral data
            std::vector<double> terminal(static_cast<std::size_t>(box.slice_size()));
            std::vector<double> pt(static_cast<std::size_t>(box.dim()));
            for (std::int64_t s = 0; s < box.slice_size(); ++s) {
                box.spatial_point(s, pt);
                double r = 0;
                for (double c : pt) r += c * c;
                terminal[static_cast<std::size_t>(s)] =
                    bernstein_cutoff(std::sqrt(r), p.radius) *
                    problem::evaluate_terminal(spec, pt);
            }
            fd::SolveOptions opts;
            opts.theta = cfg.value("theta", 1.0);
            const auto u_field = fd::solve_dirichlet(
                spec, box, terminal, [](double, std::span<const double>) { return 0.0; }, opts);
            auto [v, check] = bernstein_functional(spec, u_field, p);
            rec.pass = check.pass;
            rec.record = check.to_json();
        } else if (type == "transform_cross") {
            TransformCrossParams p;
            p.transform_q = cfg.value("transform_q", 1);
            p.multiply_q = cfg.value("multiply_q", p.transform_q);
            p.box = box_from_json(cfg.at("box"));
            p.interior_mc = mc_from_json(cfg.value("interior_mc", json::object()), seed, workers);
            p.boundary_mc = mc_from_json(cfg.value("boundary_mc", json::object()),
                                         rng::derive_seed(seed, 2), workers);
            p.anchor_times = cfg.value("anchor_times", 13);
            p.n_probes = cfg.value("n_probes", 9);
            p.allowance = cfg.value("allowance", 5e-3);
            const auto check = transform_cross_check(spec, p);
            rec.pass = check.pass;
            rec.record = check.to_json();
        } else if (type == "localization") {
            fd::CrossCheckParams p;
            p.interior_mc = mc_from_json(cfg.value("interior_mc", json::object()), seed, workers);
            p.boundary_mc = mc_from_json(cfg.value("boundary_mc", json::object()),
                                         rng::derive_seed(seed, 2), workers);
            p.anchor_times = cfg.value("anchor_times", 13);
            p.n_probes = cfg.value("n_probes", 9);
            p.allowance = cfg.value("allowance", 5e-3);
            p.theta = cfg.value("theta", 0.5);
            p.corrupt_potential = cfg.value("corrupt_potential", 0.0);
            const auto box = box_from_json(cfg.at("box"));
            const auto check = fd::localized_cross_check(spec, box, p);
            rec.pass = check.pass;
            rec.record = check.to_json();
        } else if (type == "strong_order") {
            const auto ladder = cfg.at("ladder").get<std::vector<int>>();
            const auto n_paths = cfg.value("n_paths", static_cast<std::int64_t>(20000));
            const double x0 = cfg.value("x0", 1.0);
            std::vector<double> x(static_cast<std::size_t>(spec.d), x0);
            const auto rep =
                sde::strong_error(spec, spec.t0, x, ladder, n_paths, seed, workers);
            const double lo = cfg.at("slope_min").get<double>();
            const double hi = cfg.value("slope_max", 10.0);
            const bool pass = rep.slope >= lo && rep.slope <= hi;
            rec.pass = pass;
            rec.record = {{"kind", "strong_order"},
                          {"ladder", rep.ladder},
                          {"errors", rep.errors},
                          {"half_widths", rep.half_widths},
                          {"slope", rep.slope},
                          {"slope_min", lo},
                          {"slope_max", hi},
                          {"pass", pass},
                          {"n_paths", n_paths},
                          {"seed", seed}};
        } else {
            throw Error("unknown check type '" + type + "'");
        }
    } catch (const std::exception& e) {
        rec.pass = false;
        rec.record = {{"kind", "error"}, {"error", e.what()}, {"pass", false}};
    }
    return rec;
}

}  // namespace

SuiteResult run_suite(const json& config) {
    SuiteResult result;
    const std::uint64_t suite_seed = config.value("seed", 20250809ull);
    const int workers = config.value("workers", 0);
    const auto& checks = config.at("checks");
    result.records.resize(checks.size());

    if (config.value("parallel_checks", false)) {
        std::vector<std::thread> pool;
        std::size_t i = 0;
        for (const auto& cfg : checks) {
            pool.emplace_back([&result, cfg, suite_seed, workers, i] {
                result.records[i] = run_one_check(cfg, suite_seed, workers);
            });
            ++i;
        }
        for (auto& th : pool) th.join();
    } else {
        std::size_t i = 0;
        for (const auto& cfg : checks) result.records[i++] = run_one_check(cfg, suite_seed, workers);
    }

    if (config.contains("output")) {
        std::ofstream out(config["output"].get<std::string>());
        if (!out) throw Error("cannot write suite report");
        out << result.to_json().dump(2) << "\n";
    }
    return result;
}

SuiteResult run_suite_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open suite config '" + path + "'");
    json config = json::parse(in);
    return run_suite(config);
}

}  // namespace kolmo::harness
