// SPDX-License-Identifier: Apache-2.0
#include "kolmo/fd.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <memory>
#include <unordered_map>

#include <Eigen/Sparse>

#include "kolmo/error.hpp"
#include "kolmo/rng.hpp"

namespace kolmo::fd {

namespace {

double min_eigenvalue_sym(std::span<const double> a, int d) {
    if (d == 1) return a[0];
    if (d == 2) {
        const double tr = a[0] + a[3];
        const double det = a[0] * a[3] - a[1] * a[2];
        const double disc = std::sqrt(std::max(0.0, tr * tr / 4.0 - det));
        return tr / 2.0 - disc;
    }
    // d == 3: bisection on the characteristic polynomial is overkill here;
    // use a few inverse-free Jacobi sweeps
    std::array<double, 9> m{};
    std::copy(a.begin(), a.end(), m.begin());
    auto at = [&](int i, int j) -> double& { return m[static_cast<std::size_t>(i * 3 + j)]; };
    for (int sweep = 0; sweep < 32; ++sweep) {
        for (int p = 0; p < 3; ++p)
            for (int q = p + 1; q < 3; ++q) {
                if (std::fabs(at(p, q)) < 1e-300) continue;
                const double theta = (at(q, q) - at(p, p)) / (2 * at(p, q));
                const double t = (theta >= 0 ? 1.0 : -1.0) /
                                 (std::fabs(theta) + std::sqrt(theta * theta + 1));
                const double c = 1 / std::sqrt(t * t + 1), s = t * c;
                for (int k = 0; k < 3; ++k) {
                    const double akp = at(k, p), akq = at(k, q);
                    at(k, p) = c * akp - s * akq;
                    at(k, q) = s * akp + c * akq;
                }
                for (int k = 0; k < 3; ++k) {
                    const double apk = at(p, k), aqk = at(q, k);
                    at(p, k) = c * apk - s * aqk;
                    at(q, k) = s * apk + c * aqk;
                }
            }
    }
    return std::min({at(0, 0), at(1, 1), at(2, 2)});
}

// Thomas algorithm for tridiagonal systems; diag/rhs are overwritten.
void solve_tridiagonal(std::vector<double>& sub, std::vector<double>& diag,
                       std::vector<double>& sup, std::vector<double>& rhs,
                       std::vector<double>& out) {
    const std::size_t n = diag.size();
    for (std::size_t i = 1; i < n; ++i) {
        if (diag[i - 1] == 0.0) throw Error("singular tridiagonal system in FD solve");
        const double w = sub[i] / diag[i - 1];
        diag[i] -= w * sup[i - 1];
        rhs[i] -= w * rhs[i - 1];
    }
    if (diag[n - 1] == 0.0) throw Error("singular tridiagonal system in FD solve");
    out.resize(n);
    out[n - 1] = rhs[n - 1] / diag[n - 1];
    for (std::size_t i = n - 1; i-- > 0;) out[i] = (rhs[i] - sup[i] * out[i + 1]) / diag[i];
}

struct NodeCoeffs {
    std::array<double, 9> a{};
    std::array<double, 3> b{};
    double c = 0;
    double f = 0;
};

// Applies M u = sum a_ij D^ij u + sum b_i D^i u - c u at an interior node.
double apply_operator(const field::Box& box, std::span<const double> slice,
                      std::span<const int> idx, const NodeCoeffs& nc) {
    const int d = box.dim();
    std::array<int, 3> shifted{};
    for (int i = 0; i < d; ++i) shifted[static_cast<std::size_t>(i)] = idx[static_cast<std::size_t>(i)];
    auto value = [&](int axis_a, int off_a, int axis_b, int off_b) {
        shifted[static_cast<std::size_t>(axis_a)] += off_a;
        if (axis_b >= 0) shifted[static_cast<std::size_t>(axis_b)] += off_b;
        const double v = slice[static_cast<std::size_t>(
            box.flatten(std::span<const int>(shifted.data(), static_cast<std::size_t>(d))))];
        shifted[static_cast<std::size_t>(axis_a)] -= off_a;
        if (axis_b >= 0) shifted[static_cast<std::size_t>(axis_b)] -= off_b;
        return v;
    };
    const double u0 = value(0, 0, -1, 0);
    double acc = -nc.c * u0;
    for (int i = 0; i < d; ++i) {
        const double h = box.step(i);
        const double up = value(i, +1, -1, 0), dn = value(i, -1, -1, 0);
        acc += nc.a[static_cast<std::size_t>(i * d + i)] * (up - 2 * u0 + dn) / (h * h);
        acc += nc.b[static_cast<std::size_t>(i)] * (up - dn) / (2 * h);
        for (int j = i + 1; j < d; ++j) {
            const double hj = box.step(j);
            const double cross = (value(i, +1, j, +1) - value(i, +1, j, -1) -
                                  value(i, -1, j, +1) + value(i, -1, j, -1)) /
                                 (4 * h * hj);
            acc += 2.0 * nc.a[static_cast<std::size_t>(i * d + j)] * cross;  // a symmetric
        }
    }
    return acc;
}

}  // namespace

field::Field solve_dirichlet(const problem::ProblemSpec& spec, const field::Box& box,
                             std::span<const double> terminal, const BoundaryFn& boundary,
                             const SolveOptions& options, SolveDiagnostics* diagnostics) {
    spec.validate_shape();
    box.validate();
    const int d = box.dim();
    if (d != spec.d) throw Error("box dimension does not match the spec");
    if (d > 3) throw Error("FD solver supports d <= 3");
    for (int a = 0; a < d; ++a)
        if (box.nodes[static_cast<std::size_t>(a)] < 3)
            throw Error("FD solver needs at least 3 nodes per axis");
    if (!(options.theta >= 0.5 && options.theta <= 1.0))
        throw Error("theta must lie in [1/2, 1]");
    const std::int64_t n_nodes = box.slice_size();
    if (terminal.size() != static_cast<std::size_t>(n_nodes))
        throw Error("terminal slice size does not match the box");

    problem::CoeffEval eval(spec);
    std::vector<double> pt(static_cast<std::size_t>(d));

    // ellipticity gate + Peclet diagnostic on a node subsample
    {
        double min_eig = std::numeric_limits<double>::infinity();
        double peclet = 0.0;
        std::vector<double> a_buf(static_cast<std::size_t>(d) * static_cast<std::size_t>(d));
        std::vector<double> b_buf(static_cast<std::size_t>(d));
        const std::int64_t stride = std::max<std::int64_t>(1, n_nodes / 64);
        for (int kt = 0; kt <= 2; ++kt) {
            const double t = box.t1 + kt * (box.t2 - box.t1) / 2.0;
            for (std::int64_t s = 0; s < n_nodes; s += stride) {
                box.spatial_point(s, pt);
                eval.diffusion_a(t, pt, a_buf);
                eval.drift(t, pt, b_buf);
                const double lam = min_eigenvalue_sym(a_buf, d);
                min_eig = std::min(min_eig, lam);
                if (lam > 0)
                    for (int axis = 0; axis < d; ++axis)
                        peclet = std::max(peclet, box.step(axis) *
                                                      std::fabs(b_buf[static_cast<std::size_t>(axis)]) /
                                                      (2.0 * lam));
            }
        }
        if (!(min_eig > 0.0))
            throw Error("ellipticity violation on box: min eigenvalue of a is " +
                        std::to_string(min_eig));
        if (diagnostics) {
            diagnostics->peclet_max = peclet;
            diagnostics->peclet_ok = peclet <= 1.0;
            if (!diagnostics->peclet_ok)
                diagnostics->warnings.push_back(
                    "mesh Peclet number " + std::to_string(peclet) +
                    " exceeds 1; the discrete maximum principle may fail");
        }
    }

    field::Field out = field::Field::zeros(box, "FD");
    std::copy(terminal.begin(), terminal.end(), out.slice(box.n_time).begin());

    const double dt = box.dt();
    const double theta = options.theta;

    // per-node coefficients at one time level
    std::vector<NodeCoeffs> coef(static_cast<std::size_t>(n_nodes));
    auto load_coeffs = [&](double t) {
        std::vector<double> a_buf(static_cast<std::size_t>(d) * static_cast<std::size_t>(d));
        std::vector<double> b_buf(static_cast<std::size_t>(d));
        for (std::int64_t s = 0; s < n_nodes; ++s) {
            box.spatial_point(s, pt);
            auto& nc = coef[static_cast<std::size_t>(s)];
            eval.diffusion_a(t, pt, a_buf);
            eval.drift(t, pt, b_buf);
            for (int i = 0; i < d * d; ++i) nc.a[static_cast<std::size_t>(i)] = a_buf[static_cast<std::size_t>(i)];
            for (int i = 0; i < d; ++i) nc.b[static_cast<std::size_t>(i)] = b_buf[static_cast<std::size_t>(i)];
            nc.c = eval.potential(t, pt);
            nc.f = eval.source(t, pt);
        }
    };

    std::vector<int> idx(static_cast<std::size_t>(d));
    std::vector<double> rhs(static_cast<std::size_t>(n_nodes));
    std::vector<double> explicit_part(static_cast<std::size_t>(n_nodes), 0.0);

    // marches backward: slice k from slice k+1
    load_coeffs(box.time(box.n_time));
    for (int k = box.n_time - 1; k >= 0; --k) {
        const double t_new = box.time(k);
        const auto u_next = out.slice(k + 1);

        // explicit contribution dt (1-theta) (M u_{k+1} + f_{k+1}); coef holds level k+1
        if (theta < 1.0) {
            for (std::int64_t s = 0; s < n_nodes; ++s) {
                if (box.is_spatial_boundary(s)) continue;
                box.unflatten(s, idx);
                explicit_part[static_cast<std::size_t>(s)] =
                    dt * (1.0 - theta) *
                    (apply_operator(box, u_next, idx, coef[static_cast<std::size_t>(s)]) +
                     coef[static_cast<std::size_t>(s)].f);
            }
        }

        load_coeffs(t_new);  // level k for the implicit part

        for (std::int64_t s = 0; s < n_nodes; ++s) {
            if (box.is_spatial_boundary(s)) {
                box.spatial_point(s, pt);
                rhs[static_cast<std::size_t>(s)] = boundary(t_new, pt);
            } else {
                rhs[static_cast<std::size_t>(s)] = u_next[static_cast<std::size_t>(s)] +
                                                   explicit_part[static_cast<std::size_t>(s)] +
                                                   dt * theta * coef[static_cast<std::size_t>(s)].f;
            }
        }

        auto u_new = out.slice(k);
        if (d == 1) {
            const int n = box.nodes[0];
            std::vector<double> sub(static_cast<std::size_t>(n), 0.0),
                diag(static_cast<std::size_t>(n), 1.0), sup(static_cast<std::size_t>(n), 0.0),
                b(rhs), sol;
            const double h = box.step(0);
            for (int i = 1; i + 1 < n; ++i) {
                const auto& nc = coef[static_cast<std::size_t>(i)];
                const double ad = nc.a[0] / (h * h);
                const double bd = nc.b[0] / (2 * h);
                sub[static_cast<std::size_t>(i)] = -dt * theta * (ad - bd);
                diag[static_cast<std::size_t>(i)] = 1.0 - dt * theta * (-2 * ad - nc.c);
                sup[static_cast<std::size_t>(i)] = -dt * theta * (ad + bd);
            }
            solve_tridiagonal(sub, diag, sup, b, sol);
            std::copy(sol.begin(), sol.end(), u_new.begin());
        } else {
            // sparse assembly of (I - dt theta M_k) with identity boundary rows
            std::vector<Eigen::Triplet<double>> trips;
            trips.reserve(static_cast<std::size_t>(n_nodes) * (d == 2 ? 9 : 27));
            std::vector<int> nb(static_cast<std::size_t>(d));
            for (std::int64_t s = 0; s < n_nodes; ++s) {
                const int row = static_cast<int>(s);
                if (box.is_spatial_boundary(s)) {
                    trips.emplace_back(row, row, 1.0);
                    continue;
                }
                box.unflatten(s, idx);
                const auto& nc = coef[static_cast<std::size_t>(s)];
                auto push = [&](std::span<const int> node, double w) {
                    if (w == 0.0) return;
                    trips.emplace_back(row, static_cast<int>(box.flatten(node)), -dt * theta * w);
                };
                double diag_m = -nc.c;
                for (int i = 0; i < d; ++i) {
                    const double h = box.step(i);
                    const double ad = nc.a[static_cast<std::size_t>(i * d + i)] / (h * h);
                    const double bd = nc.b[static_cast<std::size_t>(i)] / (2 * h);
                    diag_m += -2 * ad;
                    nb.assign(idx.begin(), idx.end());
                    nb[static_cast<std::size_t>(i)] += 1;
                    push(nb, ad + bd);
                    nb[static_cast<std::size_t>(i)] -= 2;
                    push(nb, ad - bd);
                    for (int j = i + 1; j < d; ++j) {
                        const double w =
                            2.0 * nc.a[static_cast<std::size_t>(i * d + j)] / (4 * h * box.step(j));
                        if (w == 0.0) continue;
                        for (int si : {+1, -1}) {
                            for (int sj : {+1, -1}) {
                                nb.assign(idx.begin(), idx.end());
                                nb[static_cast<std::size_t>(i)] += si;
                                nb[static_cast<std::size_t>(j)] += sj;
                                push(nb, (si == sj ? 1.0 : -1.0) * w);
                            }
                        }
                    }
                }
                trips.emplace_back(row, row, 1.0 - dt * theta * diag_m);
            }
            Eigen::SparseMatrix<double> A(static_cast<int>(n_nodes), static_cast<int>(n_nodes));
            A.setFromTriplets(trips.begin(), trips.end());
            Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
            lu.compute(A);
            if (lu.info() != Eigen::Success)
                throw Error("singular linear system in FD solve at step " + std::to_string(k));
            Eigen::VectorXd bvec = Eigen::Map<const Eigen::VectorXd>(rhs.data(), static_cast<long>(n_nodes));
            Eigen::VectorXd sol = lu.solve(bvec);
            if (lu.info() != Eigen::Success)
                throw Error("linear solve failed in FD solve at step " + std::to_string(k));
            for (std::int64_t s = 0; s < n_nodes; ++s)
                u_new[static_cast<std::size_t>(s)] = sol[static_cast<long>(s)];
        }
    }

    return out;
}

field::Field residual(const problem::ProblemSpec& spec, const field::Field& field) {
    spec.validate_shape();
    const auto& box = field.box;
    const int d = box.dim();
    if (box.n_time + 1 < 3) throw Error("residual needs at least 3 time slices");
    for (int a = 0; a < d; ++a)
        if (box.nodes[static_cast<std::size_t>(a)] < 3)
            throw Error("residual needs at least 3 nodes per axis");

    field::Box inner = box;
    for (int a = 0; a < d; ++a) {
        inner.lo[static_cast<std::size_t>(a)] += box.step(a);
        inner.hi[static_cast<std::size_t>(a)] -= box.step(a);
        inner.nodes[static_cast<std::size_t>(a)] -= 2;
    }
    field::Field out = field::Field::zeros(inner, "FD");

    problem::CoeffEval eval(spec);
    std::vector<double> pt(static_cast<std::size_t>(d));
    std::vector<int> idx_in(static_cast<std::size_t>(d)), idx(static_cast<std::size_t>(d));
    NodeCoeffs nc;
    std::vector<double> a_buf(static_cast<std::size_t>(d) * static_cast<std::size_t>(d));
    std::vector<double> b_buf(static_cast<std::size_t>(d));
    const double dt = box.dt();

    for (int k = 0; k <= box.n_time; ++k) {
        const double t = box.time(k);
        for (std::int64_t s = 0; s < inner.slice_size(); ++s) {
            inner.unflatten(s, idx_in);
            for (int a = 0; a < d; ++a) idx[static_cast<std::size_t>(a)] = idx_in[static_cast<std::size_t>(a)] + 1;
            const std::int64_t flat = box.flatten(idx);
            box.spatial_point(flat, pt);

            eval.diffusion_a(t, pt, a_buf);
            eval.drift(t, pt, b_buf);
            for (int i = 0; i < d * d; ++i) nc.a[static_cast<std::size_t>(i)] = a_buf[static_cast<std::size_t>(i)];
            for (int i = 0; i < d; ++i) nc.b[static_cast<std::size_t>(i)] = b_buf[static_cast<std::size_t>(i)];
            nc.c = eval.potential(t, pt);
            nc.f = eval.source(t, pt);

            double du_dt;
            if (k == 0)
                du_dt = (-3 * field.at(0, flat) + 4 * field.at(1, flat) - field.at(2, flat)) /
                        (2 * dt);
            else if (k == box.n_time)
                du_dt = (3 * field.at(k, flat) - 4 * field.at(k - 1, flat) +
                         field.at(k - 2, flat)) /
                        (2 * dt);
            else
                du_dt = (field.at(k + 1, flat) - field.at(k - 1, flat)) / (2 * dt);

            out.at(k, s) = du_dt + apply_operator(box, field.slice(k), idx, nc) + nc.f;
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// MC boundary and cross check

namespace {

// natural cubic spline through (t_i, y_i); returns second derivatives
std::vector<double> spline_second_derivatives(const std::vector<double>& t,
                                              const std::vector<double>& y) {
    const std::size_t n = t.size();
    std::vector<double> m(n, 0.0);
    if (n < 3) return m;
    std::vector<double> sub(n, 0.0), diag(n, 1.0), sup(n, 0.0), rhs(n, 0.0), sol;
    for (std::size_t i = 1; i + 1 < n; ++i) {
        const double hl = t[i] - t[i - 1], hr = t[i + 1] - t[i];
        sub[i] = hl / 6.0;
        diag[i] = (hl + hr) / 3.0;
        sup[i] = hr / 6.0;
        rhs[i] = (y[i + 1] - y[i]) / hr - (y[i] - y[i - 1]) / hl;
    }
    solve_tridiagonal(sub, diag, sup, rhs, sol);
    return sol;
}

double spline_eval(const std::vector<double>& t, const std::vector<double>& y,
                   const std::vector<double>& m, double at) {
    const std::size_t n = t.size();
    if (n == 1) return y[0];
    std::size_t i = 1;
    while (i + 1 < n && t[i] < at) ++i;
    const double h = t[i] - t[i - 1];
    const double A = (t[i] - at) / h, B = 1.0 - A;
    return A * y[i - 1] + B * y[i] +
           ((A * A * A - A) * m[i - 1] + (B * B * B - B) * m[i]) * h * h / 6.0;
}

}  // namespace

std::vector<double> mc_terminal(const problem::ProblemSpec& spec, const field::Box& box,
                                const sde::McParams& mc) {
    const std::int64_t n_nodes = box.slice_size();
    std::vector<double> terminal(static_cast<std::size_t>(n_nodes));
    std::vector<double> pt(static_cast<std::size_t>(box.dim()));
    const bool at_horizon = box.t2 >= spec.T - 1e-14 * std::max(1.0, std::fabs(spec.T));
    for (std::int64_t s = 0; s < n_nodes; ++s) {
        box.spatial_point(s, pt);
        if (at_horizon) {
            terminal[static_cast<std::size_t>(s)] = problem::evaluate_terminal(spec, pt);
        } else {
            sde::McParams node_mc = mc;
            node_mc.seed = rng::derive_seed(mc.seed, rng::derive_seed(0xFD7E12ull, static_cast<std::uint64_t>(s)));
            terminal[static_cast<std::size_t>(s)] = fk::estimate_value(spec, box.t2, pt, node_mc).scalar();
        }
    }
    return terminal;
}

BoundaryFn mc_boundary(const problem::ProblemSpec& spec, const field::Box& box,
                       const McBoundaryParams& params) {
    box.validate();
    const int d = box.dim();
    const int n_anchor = std::max(2, params.anchor_times);
    const std::int64_t n_nodes = box.slice_size();

    std::vector<double> anchor_t(static_cast<std::size_t>(n_anchor));
    for (int a = 0; a < n_anchor; ++a)
        anchor_t[static_cast<std::size_t>(a)] = box.t1 + a * (box.t2 - box.t1) / (n_anchor - 1);

    struct NodeSpline {
        std::vector<double> y, m;
    };
    auto table = std::make_shared<std::unordered_map<std::int64_t, NodeSpline>>();
    std::vector<double> pt(static_cast<std::size_t>(d));
    for (std::int64_t s = 0; s < n_nodes; ++s) {
        if (!box.is_spatial_boundary(s)) continue;
        box.spatial_point(s, pt);
        NodeSpline ns;
        ns.y.resize(static_cast<std::size_t>(n_anchor));
        for (int a = 0; a < n_anchor; ++a) {
            const double t = anchor_t[static_cast<std::size_t>(a)];
            if (t >= spec.T - 1e-14 * std::max(1.0, std::fabs(spec.T))) {
                ns.y[static_cast<std::size_t>(a)] = problem::evaluate_terminal(spec, pt);
            } else {
                sde::McParams node_mc = params.mc;
                node_mc.seed = rng::derive_seed(
                    params.mc.seed,
                    rng::derive_seed(0xB0DA11ull, static_cast<std::uint64_t>(s * 1024 + a)));
                ns.y[static_cast<std::size_t>(a)] = fk::estimate_value(spec, t, pt, node_mc).scalar();
            }
        }
        ns.m = spline_second_derivatives(anchor_t, ns.y);
        (*table)[s] = std::move(ns);
    }

    field::Box grid = box;
    return [table, grid, anchor_t](double t, std::span<const double> x) -> double {
        // recover the flat node index from the coordinates
        std::vector<int> idx(static_cast<std::size_t>(grid.dim()));
        for (int a = 0; a < grid.dim(); ++a) {
            const double h = grid.step(a);
            const double rel = (x[static_cast<std::size_t>(a)] - grid.lo[static_cast<std::size_t>(a)]) / h;
            idx[static_cast<std::size_t>(a)] = static_cast<int>(std::lround(rel));
        }
        const auto it = table->find(grid.flatten(idx));
        if (it == table->end()) throw Error("mc_boundary queried off the boundary node set");
        return spline_eval(anchor_t, it->second.y, it->second.m, t);
    };
}

report::BoundCheck localized_cross_check(const problem::ProblemSpec& spec, const field::Box& box,
                                         const CrossCheckParams& params) {
    spec.validate_shape();
    box.validate();

    problem::ProblemSpec fd_spec = spec;
    if (params.corrupt_potential != 0.0) {
        const auto base = spec.potential;
        const double bump = params.corrupt_potential;
        fd_spec.potential = problem::CoefficientField::from_function(
            "corrupted(c + " + std::to_string(bump) + ")", spec.d,
            [base, bump](double t, std::span<const double> x) { return base(t, x) + bump; },
            [base](double t, std::span<const double> x, std::span<double> g) {
                base.gradient(t, x, g);
            },
            base.growth());
    }

    sde::McParams bmc = params.boundary_mc;
    const auto terminal = mc_terminal(spec, box, bmc);
    McBoundaryParams mcb{bmc, params.anchor_times};
    const BoundaryFn boundary = mc_boundary(spec, box, mcb);
    SolveOptions opts;
    opts.theta = params.theta;
    const field::Field fd_field = solve_dirichlet(fd_spec, box, terminal, boundary, opts);

    // probe nodes: deterministic low-discrepancy interior picks
    const int d = box.dim();
    std::vector<double> pt(static_cast<std::size_t>(d));
    double worst = -std::numeric_limits<double>::infinity();
    nlohmann::json probes = nlohmann::json::array();
    const int n_probes = std::max(1, params.n_probes);
    for (int pidx = 0; pidx < n_probes; ++pidx) {
        std::vector<int> idx(static_cast<std::size_t>(d));
        for (int a = 0; a < d; ++a) {
            const int n = box.nodes[static_cast<std::size_t>(a)];
            const double u = rng::uniform01(0xC0FFEEull, static_cast<std::uint64_t>(a),
                                            static_cast<std::uint64_t>(pidx));
            idx[static_cast<std::size_t>(a)] = 1 + static_cast<int>(u * (n - 2));
            idx[static_cast<std::size_t>(a)] = std::min(idx[static_cast<std::size_t>(a)], n - 2);
        }
        const int kt = 1 + static_cast<int>(rng::uniform01(0xC0FFEEull, 99,
                                                           static_cast<std::uint64_t>(pidx)) *
                                            std::max(1, box.n_time - 1));
        const std::int64_t flat = box.flatten(idx);
        box.spatial_point(flat, pt);
        const double t = box.time(std::min(kt, box.n_time - 1));

        sde::McParams imc = params.interior_mc;
        imc.seed = rng::derive_seed(params.interior_mc.seed,
                                    rng::derive_seed(0x9B0BEull, static_cast<std::uint64_t>(pidx)));
        const fk::Estimate est = fk::estimate_value(spec, t, pt, imc);
        const double fd_val = fd_field.at(std::min(kt, box.n_time - 1), flat);
        const double gap = std::fabs(fd_val - est.scalar()) - 3.0 * est.scalar_se();
        worst = std::max(worst, gap);
        probes.push_back({{"t", t}, {"x", pt}, {"fd", fd_val}, {"mc", est.scalar()},
                          {"stderr", est.scalar_se()}});
    }

    nlohmann::json inputs = {{"spec", spec.name},
                             {"box", {{"lo", box.lo}, {"hi", box.hi}, {"nodes", box.nodes},
                                      {"t1", box.t1}, {"t2", box.t2}, {"n_time", box.n_time}}},
                             {"interior_mc", {{"n_paths", params.interior_mc.n_paths},
                                              {"n_steps", params.interior_mc.n_steps},
                                              {"seed", params.interior_mc.seed}}},
                             {"boundary_mc", {{"n_paths", params.boundary_mc.n_paths},
                                              {"n_steps", params.boundary_mc.n_steps},
                                              {"seed", params.boundary_mc.seed}}},
                             {"anchor_times", params.anchor_times},
                             {"theta", params.theta},
                             {"corrupt_potential", params.corrupt_potential},
                             {"probes", probes}};
    return report::make_check("th_142-localization", worst, params.allowance, 0.0,
                              std::move(inputs),
                              "max over probes of |fd - mc| - 3 stderr vs scheme allowance");
}

}  // namespace kolmo::fd
