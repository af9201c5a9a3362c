// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace kolmo::field {

/// Rectangular space-time grid: a box [lo, hi] in R^d with per-axis node
/// counts and a time interval (t1, t2) split into n_time uniform steps
/// (n_time + 1 slices).
struct Box {
    std::vector<double> lo, hi;  // size d
    std::vector<int> nodes;      // size d, >= 2 per axis
    double t1 = 0.0, t2 = 1.0;
    int n_time = 1;

    int dim() const { return static_cast<int>(lo.size()); }
    std::int64_t slice_size() const;
    double step(int axis) const;
    double coord(int axis, int i) const;
    double dt() const { return (t2 - t1) / n_time; }
    double time(int k) const { return k == n_time ? t2 : t1 + k * dt(); }

    std::int64_t flatten(std::span<const int> idx) const;
    void unflatten(std::int64_t flat, std::span<int> idx) const;
    void spatial_point(std::int64_t flat, std::span<double> out) const;
    bool is_spatial_boundary(std::int64_t flat) const;

    /// Throws Error unless lo < hi per axis, node counts >= 2, t1 < t2.
    void validate() const;
};

/// Values of a scalar function on a Box; indexed [time slice][flat node].
struct Field {
    Box box;
    std::string source = "analytic";  // FD | MC | analytic
    std::vector<double> values;

    static Field zeros(Box box, std::string source);

    double& at(int k, std::int64_t flat);
    double at(int k, std::int64_t flat) const;
    std::span<double> slice(int k);
    std::span<const double> slice(int k) const;

    /// True when every stored value is finite.
    bool all_finite() const;

    /// Central-difference derivative D^alpha at slice k, node `idx`;
    /// `alpha[axis]` is the per-axis derivative order (0..3). The node must be
    /// at least margin(alpha) nodes from each face (1 for orders <= 2, 2 for
    /// order 3).
    double derivative(int k, std::span<const int> idx, std::span<const int> alpha) const;
    static int margin(std::span<const int> alpha);

    /// CSV with metadata comment lines, one header line
    /// (t,x1..xd,value[,stderr]) and full double precision. `se` optionally
    /// supplies a matching stderr field.
    void write_csv(const std::string& path, const Field* se = nullptr) const;
    static Field read_csv(const std::string& path);
};

}  // namespace kolmo::field
