// SPDX-License-Identifier: Apache-2.0
#include "kolmo/sde.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <thread>

#include "kolmo/error.hpp"
#include "kolmo/rng.hpp"

namespace kolmo::sde {

namespace {

std::atomic<int> g_default_workers{2};

void run_partitioned(std::int64_t n, int n_workers,
                     const std::function<void(std::int64_t, std::int64_t)>& body) {
    if (n_workers <= 1 || n < 2 * n_workers) {
        body(0, n);
        return;
    }
    std::vector<std::thread> threads;
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(n_workers));
    const std::int64_t chunk = (n + n_workers - 1) / n_workers;
    for (int w = 0; w < n_workers; ++w) {
        const std::int64_t lo = w * chunk;
        const std::int64_t hi = std::min<std::int64_t>(n, lo + chunk);
        if (lo >= hi) break;
        threads.emplace_back([&, w, lo, hi] {
            try {
                body(lo, hi);
            } catch (...) {
                errors[static_cast<std::size_t>(w)] = std::current_exception();
            }
        });
    }
    for (auto& th : threads) th.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

}  // namespace

int default_workers() { return g_default_workers.load(); }
void set_default_workers(int n) { g_default_workers.store(n < 1 ? 1 : n); }
int resolve_workers(int requested) { return requested > 0 ? requested : default_workers(); }

namespace {

struct EulerScratch {
    std::vector<double> x, x_new, b, sig, z;
    std::vector<double> jac_b, jac_sig, J, J_new;

    EulerScratch(int d, int m, bool variation) {
        const auto dd = static_cast<std::size_t>(d), mm = static_cast<std::size_t>(m);
        x.resize(dd);
        x_new.resize(dd);
        b.resize(dd);
        sig.resize(dd * mm);
        z.resize(mm);
        if (variation) {
            jac_b.resize(dd * dd);
            jac_sig.resize(dd * mm * dd);
            J.resize(dd * dd);
            J_new.resize(dd * dd);
        }
    }
};

[[noreturn]] void overflow_abort(std::int64_t path, int step, double t) {
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "non-finite state during Euler-Maruyama (path %lld, step %d, s=%.6g); "
                  "trajectory left the overflow-safe region",
                  static_cast<long long>(path), step, t);
    throw Error(buf);
}

}  // namespace

static PathBatch simulate_impl(const problem::ProblemSpec& spec, double t,
                               std::span<const double> x, const McParams& mc,
                               bool with_variation, std::int64_t path_offset) {
    if (path_offset < 0 || (mc.antithetic && path_offset % 2 != 0))
        throw Error("path_offset must be nonnegative (and even under antithetic sampling)");
    spec.validate_shape();
    if (mc.n_paths < 1) throw Error("n_paths must be >= 1");
    if (mc.n_steps < 1) throw Error("n_steps must be >= 1");
    if (!(t < spec.T)) throw Error("simulation requires t < T");
    if (x.size() != static_cast<std::size_t>(spec.d)) throw Error("start point must have dimension d");
    if (mc.antithetic && mc.n_paths % 2 != 0) throw Error("antithetic sampling needs an even n_paths");

    const int d = spec.d, m = spec.m, n_steps = mc.n_steps;
    const double dt = (spec.T - t) / n_steps;
    const double sqrt_dt = std::sqrt(dt);

    PathBatch batch;
    batch.d = d;
    batch.n_paths = mc.n_paths;
    batch.n_steps = n_steps;
    batch.seed = mc.seed;
    batch.antithetic = mc.antithetic;
    batch.t_grid.resize(static_cast<std::size_t>(n_steps) + 1);
    for (int k = 0; k <= n_steps; ++k) batch.t_grid[static_cast<std::size_t>(k)] = k == n_steps ? spec.T : t + k * dt;
    batch.states.resize(static_cast<std::size_t>(mc.n_paths) * (n_steps + 1) * d);
    batch.discount.resize(static_cast<std::size_t>(mc.n_paths) * (n_steps + 1));
    if (with_variation)
        batch.variation.resize(static_cast<std::size_t>(mc.n_paths) * (n_steps + 1) * d * d);

    const rng::NormalSource noise(mc.seed);
    const auto& t_grid = batch.t_grid;

    run_partitioned(mc.n_paths, resolve_workers(mc.n_workers), [&](std::int64_t lo, std::int64_t hi) {
        problem::CoeffEval eval(spec);  // per-worker scratch
        EulerScratch s(d, m, with_variation);
        const auto dd = static_cast<std::size_t>(d), mm = static_cast<std::size_t>(m);
        for (std::int64_t p = lo; p < hi; ++p) {
            const std::int64_t gp = path_offset + p;
            const std::uint64_t noise_path = mc.antithetic ? static_cast<std::uint64_t>(gp / 2)
                                                           : static_cast<std::uint64_t>(gp);
            const double sign = (mc.antithetic && (gp & 1)) ? -1.0 : 1.0;

            double* states = batch.states.data() + (p * (n_steps + 1)) * d;
            double* discount = batch.discount.data() + p * (n_steps + 1);
            double* variation =
                with_variation ? batch.variation.data() + (p * (n_steps + 1)) * d * d : nullptr;

            for (std::size_t i = 0; i < dd; ++i) s.x[i] = x[i];
            std::copy(s.x.begin(), s.x.end(), states);
            discount[0] = 0.0;
            if (with_variation) {
                for (std::size_t i = 0; i < dd * dd; ++i) s.J[i] = 0.0;
                for (std::size_t i = 0; i < dd; ++i) s.J[i * dd + i] = 1.0;
                std::copy(s.J.begin(), s.J.end(), variation);
            }

            double c_prev = eval.potential(t_grid[0], s.x);

            for (int k = 0; k < n_steps; ++k) {
                const double tk = t_grid[static_cast<std::size_t>(k)];
                noise.fill(noise_path, static_cast<std::uint32_t>(k), s.z);
                eval.drift(tk, s.x, s.b);
                eval.sigma(tk, s.x, s.sig);

                for (std::size_t i = 0; i < dd; ++i) {
                    double acc = s.x[i] + s.b[i] * dt;
                    for (std::size_t kk = 0; kk < mm; ++kk)
                        acc += s.sig[i * mm + kk] * (sign * s.z[kk] * sqrt_dt);
                    s.x_new[i] = acc;
                }

                if (with_variation) {
                    eval.drift_jacobian(tk, s.x, s.jac_b);
                    eval.sigma_jacobian(tk, s.x, s.jac_sig);
                    // J_new = J + dt * jac_b * J + sum_k' dW_k' * jac_sig_k' * J
                    for (std::size_t i = 0; i < dd; ++i) {
                        for (std::size_t j = 0; j < dd; ++j) {
                            double acc = s.J[i * dd + j];
                            for (std::size_t l = 0; l < dd; ++l) {
                                double coupling = dt * s.jac_b[i * dd + l];
                                for (std::size_t kk = 0; kk < mm; ++kk)
                                    coupling += (sign * s.z[kk] * sqrt_dt) *
                                                s.jac_sig[(i * mm + kk) * dd + l];
                                acc += coupling * s.J[l * dd + j];
                            }
                            s.J_new[i * dd + j] = acc;
                        }
                    }
                    s.J.swap(s.J_new);
                }

                for (std::size_t i = 0; i < dd; ++i)
                    if (!std::isfinite(s.x_new[i])) overflow_abort(gp, k + 1, t_grid[static_cast<std::size_t>(k + 1)]);

                const double t_next = t_grid[static_cast<std::size_t>(k + 1)];
                const double c_next = eval.potential(t_next, s.x_new);
                discount[k + 1] = discount[k] + 0.5 * dt * (c_prev + c_next);
                c_prev = c_next;

                s.x.swap(s.x_new);
                std::copy(s.x.begin(), s.x.end(), states + (k + 1) * d);
                if (with_variation)
                    std::copy(s.J.begin(), s.J.end(), variation + static_cast<std::size_t>(k + 1) * dd * dd);
            }
        }
    });

    return batch;
}

PathBatch simulate_paths(const problem::ProblemSpec& spec, double t, std::span<const double> x,
                         const McParams& mc) {
    return simulate_impl(spec, t, x, mc, false, 0);
}

PathBatch simulate_with_variation(const problem::ProblemSpec& spec, double t,
                                  std::span<const double> x, const McParams& mc) {
    return simulate_impl(spec, t, x, mc, true, 0);
}

PathBatch simulate_paths_offset(const problem::ProblemSpec& spec, double t,
                                std::span<const double> x, const McParams& mc,
                                std::int64_t path_offset) {
    return simulate_impl(spec, t, x, mc, false, path_offset);
}

PathBatch simulate_with_variation_offset(const problem::ProblemSpec& spec, double t,
                                         std::span<const double> x, const McParams& mc,
                                         std::int64_t path_offset) {
    return simulate_impl(spec, t, x, mc, true, path_offset);
}

void PathBatch::write_csv(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw Error("cannot write path CSV '" + path + "'");
    out << "path,step,s";
    for (int i = 1; i <= d; ++i) out << ",x" << i;
    out << ",discount\n";
    char buf[64];
    for (std::int64_t p = 0; p < n_paths; ++p) {
        for (int k = 0; k <= n_steps; ++k) {
            out << p << ',' << k;
            std::snprintf(buf, sizeof buf, "%.17g", t_grid[static_cast<std::size_t>(k)]);
            out << ',' << buf;
            for (double v : state(p, k)) {
                std::snprintf(buf, sizeof buf, "%.17g", v);
                out << ',' << buf;
            }
            std::snprintf(buf, sizeof buf, "%.17g", discount_at(p, k));
            out << ',' << buf << "\n";
        }
    }
}

ConvergenceReport strong_error(const problem::ProblemSpec& spec, double t,
                               std::span<const double> x, const std::vector<int>& ladder,
                               std::int64_t n_paths, std::uint64_t seed, int n_workers) {
    spec.validate_shape();
    if (ladder.size() < 2) throw Error("ladder needs at least two levels");
    for (std::size_t i = 0; i + 1 < ladder.size(); ++i) {
        if (ladder[i] < 1 || ladder[i + 1] <= ladder[i] || ladder[i + 1] % ladder[i] != 0)
            throw Error("ladder must be ascending with each entry dividing the next");
    }
    if (!(t < spec.T)) throw Error("strong_error requires t < T");

    const int d = spec.d, m = spec.m;
    const int finest = ladder.back();
    const int n_levels = static_cast<int>(ladder.size()) - 1;  // measured levels
    const double horizon = spec.T - t;

    // per-path endpoint errors per level, filled disjointly
    std::vector<double> errs(static_cast<std::size_t>(n_levels) * static_cast<std::size_t>(n_paths));

    const rng::NormalSource noise(seed);

    run_partitioned(n_paths, resolve_workers(n_workers), [&](std::int64_t lo, std::int64_t hi) {
        problem::CoeffEval eval(spec);
        const auto dd = static_cast<std::size_t>(d), mm = static_cast<std::size_t>(m);
        std::vector<double> fine_dw(static_cast<std::size_t>(finest) * mm);
        std::vector<double> z(mm), xk(dd), xn(dd), b(dd), sig(dd * mm), dw(mm);
        std::vector<double> x_ref(dd);

        auto euler_endpoint = [&](int n_steps, std::span<double> out) {
            const double dt = horizon / n_steps;
            const int ratio = finest / n_steps;
            for (std::size_t i = 0; i < dd; ++i) xk[i] = x[i];
            for (int k = 0; k < n_steps; ++k) {
                const double tk = t + k * dt;
                for (std::size_t kk = 0; kk < mm; ++kk) {
                    double acc = 0;
                    for (int j = 0; j < ratio; ++j)
                        acc += fine_dw[static_cast<std::size_t>(k * ratio + j) * mm + kk];
                    dw[kk] = acc;
                }
                eval.drift(tk, xk, b);
                eval.sigma(tk, xk, sig);
                for (std::size_t i = 0; i < dd; ++i) {
                    double acc = xk[i] + b[i] * dt;
                    for (std::size_t kk = 0; kk < mm; ++kk) acc += sig[i * mm + kk] * dw[kk];
                    xn[i] = acc;
                    if (!std::isfinite(xn[i])) overflow_abort(0, k + 1, tk + dt);
                }
                xk.swap(xn);
            }
            std::copy(xk.begin(), xk.end(), out.begin());
        };

        const double sqrt_fine = std::sqrt(horizon / finest);
        for (std::int64_t p = lo; p < hi; ++p) {
            for (int j = 0; j < finest; ++j) {
                noise.fill(static_cast<std::uint64_t>(p), static_cast<std::uint32_t>(j), z);
                for (std::size_t kk = 0; kk < mm; ++kk)
                    fine_dw[static_cast<std::size_t>(j) * mm + kk] = z[kk] * sqrt_fine;
            }
            euler_endpoint(finest, x_ref);
            for (int lvl = 0; lvl < n_levels; ++lvl) {
                euler_endpoint(ladder[static_cast<std::size_t>(lvl)], xn);
                double e = 0;
                for (std::size_t i = 0; i < dd; ++i) {
                    const double dv = xn[i] - x_ref[i];
                    e += dv * dv;
                }
                errs[static_cast<std::size_t>(lvl) * static_cast<std::size_t>(n_paths) +
                     static_cast<std::size_t>(p)] = std::sqrt(e);
            }
        }
    });

    ConvergenceReport report;
    report.ladder = ladder;
    report.n_paths = n_paths;
    report.seed = seed;
    for (int lvl = 0; lvl < n_levels; ++lvl) {
        report.step_sizes.push_back(horizon / ladder[static_cast<std::size_t>(lvl)]);
        double sum = 0, sumsq = 0;
        const double* e = errs.data() + static_cast<std::size_t>(lvl) * static_cast<std::size_t>(n_paths);
        for (std::int64_t p = 0; p < n_paths; ++p) {
            sum += e[p];
            sumsq += e[p] * e[p];
        }
        const double mean = sum / n_paths;
        const double var = n_paths > 1 ? std::max(0.0, (sumsq - n_paths * mean * mean) / (n_paths - 1)) : 0.0;
        report.errors.push_back(mean);
        report.half_widths.push_back(1.96 * std::sqrt(var / n_paths));
    }

    // log-log least squares; a ladder of exact zeros (deterministic dynamics)
    // reports slope 0
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int used = 0;
    for (int lvl = 0; lvl < n_levels; ++lvl) {
        if (report.errors[static_cast<std::size_t>(lvl)] <= 0) continue;
        const double lx = std::log(report.step_sizes[static_cast<std::size_t>(lvl)]);
        const double ly = std::log(report.errors[static_cast<std::size_t>(lvl)]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
        ++used;
    }
    report.slope = used >= 2 ? (used * sxy - sx * sy) / (used * sxx - sx * sx) : 0.0;
    return report;
}

}  // namespace kolmo::sde
