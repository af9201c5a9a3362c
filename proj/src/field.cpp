// SPDX-License-Identifier: Apache-2.0
#include "kolmo/field.hpp"

#include <array>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include "kolmo/error.hpp"

namespace kolmo::field {

std::int64_t Box::slice_size() const {
    std::int64_t n = 1;
    for (int c : nodes) n *= c;
    return n;
}

double Box::step(int axis) const {
    const auto a = static_cast<std::size_t>(axis);
    return nodes[a] > 1 ? (hi[a] - lo[a]) / (nodes[a] - 1) : hi[a] - lo[a];
}

double Box::coord(int axis, int i) const {
    const auto a = static_cast<std::size_t>(axis);
    if (nodes[a] == 1) return lo[a];
    return i == nodes[a] - 1 ? hi[a] : lo[a] + i * step(axis);
}

std::int64_t Box::flatten(std::span<const int> idx) const {
    std::int64_t flat = 0;
    for (int axis = 0; axis < dim(); ++axis)
        flat = flat * nodes[static_cast<std::size_t>(axis)] + idx[static_cast<std::size_t>(axis)];
    return flat;
}

void Box::unflatten(std::int64_t flat, std::span<int> idx) const {
    for (int axis = dim() - 1; axis >= 0; --axis) {
        const int n = nodes[static_cast<std::size_t>(axis)];
        idx[static_cast<std::size_t>(axis)] = static_cast<int>(flat % n);
        flat /= n;
    }
}

void Box::spatial_point(std::int64_t flat, std::span<double> out) const {
    std::array<int, 8> idx{};
    unflatten(flat, std::span<int>(idx.data(), static_cast<std::size_t>(dim())));
    for (int axis = 0; axis < dim(); ++axis)
        out[static_cast<std::size_t>(axis)] = coord(axis, idx[static_cast<std::size_t>(axis)]);
}

bool Box::is_spatial_boundary(std::int64_t flat) const {
    std::array<int, 8> idx{};
    unflatten(flat, std::span<int>(idx.data(), static_cast<std::size_t>(dim())));
    for (int axis = 0; axis < dim(); ++axis) {
        const int i = idx[static_cast<std::size_t>(axis)];
        if (i == 0 || i == nodes[static_cast<std::size_t>(axis)] - 1) return true;
    }
    return false;
}

void Box::validate() const {
    if (lo.empty() || lo.size() != hi.size() || lo.size() != nodes.size())
        throw Error("box corners and node counts must share a positive dimension");
    if (dim() > 8) throw Error("box dimension too large");
    for (std::size_t a = 0; a < lo.size(); ++a) {
        if (!(lo[a] < hi[a])) throw Error("box must satisfy lo < hi per axis");
        if (nodes[a] < 1) throw Error("box needs at least 1 node per axis");
    }
    if (!(t1 < t2)) throw Error("box time interval must satisfy t1 < t2");
    if (n_time < 1) throw Error("box needs at least 1 time step");
}

Field Field::zeros(Box box, std::string source) {
    box.validate();
    Field f;
    f.box = std::move(box);
    f.source = std::move(source);
    f.values.assign(static_cast<std::size_t>((f.box.n_time + 1) * f.box.slice_size()), 0.0);
    return f;
}

double& Field::at(int k, std::int64_t flat) {
    return values[static_cast<std::size_t>(k * box.slice_size() + flat)];
}

double Field::at(int k, std::int64_t flat) const {
    return values[static_cast<std::size_t>(k * box.slice_size() + flat)];
}

std::span<double> Field::slice(int k) {
    return {values.data() + k * box.slice_size(), static_cast<std::size_t>(box.slice_size())};
}

std::span<const double> Field::slice(int k) const {
    return {values.data() + k * box.slice_size(), static_cast<std::size_t>(box.slice_size())};
}

bool Field::all_finite() const {
    for (double v : values)
        if (!std::isfinite(v)) return false;
    return true;
}

namespace {

struct Stencil {
    int n;
    std::array<int, 5> offset;
    std::array<double, 5> coeff;
    int power;  // divide by h^power
};

const Stencil& axis_stencil(int order) {
    static const Stencil kOrder0 = {1, {0}, {1.0}, 0};
    static const Stencil kOrder1 = {2, {-1, 1}, {-0.5, 0.5}, 1};
    static const Stencil kOrder2 = {3, {-1, 0, 1}, {1.0, -2.0, 1.0}, 2};
    static const Stencil kOrder3 = {4, {-2, -1, 1, 2}, {-0.5, 1.0, -1.0, 0.5}, 3};
    switch (order) {
        case 0: return kOrder0;
        case 1: return kOrder1;
        case 2: return kOrder2;
        case 3: return kOrder3;
        default: throw Error("derivative order must be 0..3");
    }
}

}  // namespace

int Field::margin(std::span<const int> alpha) {
    int m = 0;
    for (int order : alpha) m = std::max(m, order >= 3 ? 2 : (order >= 1 ? 1 : 0));
    return m;
}

double Field::derivative(int k, std::span<const int> idx, std::span<const int> alpha) const {
    const int d = box.dim();
    std::array<int, 8> node{};
    for (int a = 0; a < d; ++a) node[static_cast<std::size_t>(a)] = idx[static_cast<std::size_t>(a)];

    // tensor composition of the per-axis stencils
    double scale = 1.0;
    for (int a = 0; a < d; ++a) {
        const int order = alpha[static_cast<std::size_t>(a)];
        if (order == 0) continue;
        const auto& st = axis_stencil(order);
        scale /= std::pow(box.step(a), st.power);
        const int n = box.nodes[static_cast<std::size_t>(a)];
        const int i = node[static_cast<std::size_t>(a)];
        const int need = order >= 3 ? 2 : 1;
        if (i - need < 0 || i + need >= n)
            throw Error("derivative stencil leaves the grid (node too close to the boundary)");
    }

    struct Frame {
        int axis;
        const Stencil* st;
    };
    std::array<Frame, 8> frames{};
    int n_frames = 0;
    for (int a = 0; a < d; ++a) {
        const int order = alpha[static_cast<std::size_t>(a)];
        if (order > 0) frames[static_cast<std::size_t>(n_frames++)] = {a, &axis_stencil(order)};
    }
    if (n_frames == 0) return at(k, box.flatten(std::span<const int>(node.data(), static_cast<std::size_t>(d))));

    // iterate the product of stencil taps
    std::array<int, 8> tap{};
    double acc = 0.0;
    for (;;) {
        double w = 1.0;
        std::array<int, 8> shifted = node;
        for (int fidx = 0; fidx < n_frames; ++fidx) {
            const auto& fr = frames[static_cast<std::size_t>(fidx)];
            const int tp = tap[static_cast<std::size_t>(fidx)];
            w *= fr.st->coeff[static_cast<std::size_t>(tp)];
            shifted[static_cast<std::size_t>(fr.axis)] += fr.st->offset[static_cast<std::size_t>(tp)];
        }
        acc += w * at(k, box.flatten(std::span<const int>(shifted.data(), static_cast<std::size_t>(d))));
        int fidx = 0;
        while (fidx < n_frames) {
            if (++tap[static_cast<std::size_t>(fidx)] <
                frames[static_cast<std::size_t>(fidx)].st->n)
                break;
            tap[static_cast<std::size_t>(fidx)] = 0;
            ++fidx;
        }
        if (fidx == n_frames) break;
    }
    return acc * scale;
}

void Field::write_csv(const std::string& path, const Field* se) const {
    std::ofstream out(path);
    if (!out) throw Error("cannot write field CSV '" + path + "'");
    char buf[64];
    out << "# source=" << source << "\n";
    out << "# t1=" << box.t1 << " t2=" << box.t2 << " n_time=" << box.n_time << "\n";
    for (int a = 0; a < box.dim(); ++a)
        out << "# axis" << (a + 1) << " lo=" << box.lo[static_cast<std::size_t>(a)]
            << " hi=" << box.hi[static_cast<std::size_t>(a)]
            << " n=" << box.nodes[static_cast<std::size_t>(a)] << "\n";
    out << "t";
    for (int a = 0; a < box.dim(); ++a) out << ",x" << (a + 1);
    out << ",value";
    if (se) out << ",stderr";
    out << "\n";
    std::vector<double> pt(static_cast<std::size_t>(box.dim()));
    for (int k = 0; k <= box.n_time; ++k) {
        for (std::int64_t s = 0; s < box.slice_size(); ++s) {
            box.spatial_point(s, pt);
            std::snprintf(buf, sizeof buf, "%.17g", box.time(k));
            out << buf;
            for (double v : pt) {
                std::snprintf(buf, sizeof buf, "%.17g", v);
                out << ',' << buf;
            }
            std::snprintf(buf, sizeof buf, "%.17g", at(k, s));
            out << ',' << buf;
            if (se) {
                std::snprintf(buf, sizeof buf, "%.17g", se->at(k, s));
                out << ',' << buf;
            }
            out << "\n";
        }
    }
}

Field Field::read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot read field CSV '" + path + "'");
    Field f;
    f.box = Box{};
    std::string line;
    std::vector<double> values;
    bool header_seen = false;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            std::istringstream meta(line.substr(1));
            std::string word;
            while (meta >> word) {
                auto grab = [&](const char* key) -> const char* {
                    const std::size_t len = std::strlen(key);
                    return word.rfind(key, 0) == 0 ? word.c_str() + len : nullptr;
                };
                if (const char* v = grab("source=")) f.source = v;
                else if (const char* v = grab("t1=")) f.box.t1 = std::atof(v);
                else if (const char* v = grab("t2=")) f.box.t2 = std::atof(v);
                else if (const char* v = grab("n_time=")) f.box.n_time = std::atoi(v);
                else if (const char* v = grab("lo=")) f.box.lo.push_back(std::atof(v));
                else if (const char* v = grab("hi=")) f.box.hi.push_back(std::atof(v));
                else if (const char* v = grab("n=")) f.box.nodes.push_back(std::atoi(v));
            }
            continue;
        }
        if (!header_seen) {
            header_seen = true;  // column header
            continue;
        }
        // value is the column after t and the d coordinates
        std::istringstream row(line);
        std::string cell;
        int col = 0;
        const int value_col = 1 + f.box.dim();
        while (std::getline(row, cell, ',')) {
            if (col == value_col) values.push_back(std::atof(cell.c_str()));
            ++col;
        }
    }
    f.box.validate();
    const auto expected = static_cast<std::size_t>((f.box.n_time + 1) * f.box.slice_size());
    if (values.size() != expected) throw Error("field CSV row count does not match its box");
    f.values = std::move(values);
    return f;
}

}  // namespace kolmo::field
