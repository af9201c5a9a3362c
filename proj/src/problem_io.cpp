// SPDX-License-Identifier: Apache-2.0
#include "kolmo/problem_io.hpp"

#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "kolmo/error.hpp"

namespace kolmo::problem {

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

double to_double(const std::string& s, const std::string& key) {
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end == s.c_str() || *end != '\0')
        throw Error("problem file: malformed number '" + s + "' for key " + key);
    return v;
}

CoefficientField parse_coefficient(const std::string& value, int d, const std::string& key) {
    if (value.rfind("expr:", 0) == 0) return CoefficientField::expression(trim(value.substr(5)), d);
    if (value.rfind("family:", 0) == 0) return CoefficientField::family(trim(value.substr(7)), d);
    throw Error("problem file: coefficient '" + key + "' must start with 'expr:' or 'family:'");
}

}  // namespace

ProblemSpec read_problem(const std::string& text) {
    std::map<std::string, std::string> kv;
    std::string section;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw Error("problem file: malformed section header at line " +
                            std::to_string(lineno));
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw Error("problem file: expected key = value at line " + std::to_string(lineno));
        const std::string key = section + "/" + trim(line.substr(0, eq));
        kv[key] = trim(line.substr(eq + 1));
    }

    auto require = [&](const std::string& key) -> const std::string& {
        auto it = kv.find(key);
        if (it == kv.end()) throw Error("problem file: missing key '" + key + "'");
        return it->second;
    };
    auto optional = [&](const std::string& key) -> const std::string* {
        auto it = kv.find(key);
        return it == kv.end() ? nullptr : &it->second;
    };

    ProblemSpec spec;
    spec.d = static_cast<int>(to_double(require("dimensions/d"), "d"));
    spec.m = static_cast<int>(to_double(require("dimensions/m"), "m"));
    if (spec.d < 1 || spec.m < 1) throw Error("problem file: dimensions must be positive");

    if (const auto* v = optional("dimensions/name")) spec.name = *v;

    spec.drift.resize(static_cast<std::size_t>(spec.d));
    spec.diffusion.resize(static_cast<std::size_t>(spec.d) * static_cast<std::size_t>(spec.m));
    for (int i = 1; i <= spec.d; ++i) {
        const std::string key = "coefficients/drift." + std::to_string(i);
        spec.drift[static_cast<std::size_t>(i - 1)] = parse_coefficient(require(key), spec.d, key);
    }
    for (int i = 1; i <= spec.d; ++i) {
        for (int k = 1; k <= spec.m; ++k) {
            const std::string key =
                "coefficients/sigma." + std::to_string(i) + "." + std::to_string(k);
            spec.diffusion[static_cast<std::size_t>((i - 1) * spec.m + (k - 1))] =
                parse_coefficient(require(key), spec.d, key);
        }
    }
    spec.potential = parse_coefficient(require("coefficients/potential"), spec.d, "potential");
    spec.source = parse_coefficient(require("coefficients/source"), spec.d, "source");
    spec.terminal = parse_coefficient(require("coefficients/terminal"), spec.d, "terminal");

    for (auto& [key, value] : kv) {
        if (key.rfind("coefficients/", 0) != 0) continue;
        const std::string name = key.substr(std::string("coefficients/").size());
        const auto dot = name.rfind(".growth");
        if (dot == std::string::npos || dot + 7 != name.size()) continue;
        const std::string target = name.substr(0, dot);
        const GrowthClass g = GrowthClass::parse(value);
        if (target == "potential")
            spec.potential.set_growth(g);
        else if (target == "source")
            spec.source.set_growth(g);
        else if (target == "terminal")
            spec.terminal.set_growth(g);
        else
            throw Error("problem file: growth annotation for unknown coefficient '" + target +
                        "'");
    }

    spec.T = to_double(require("constants/T"), "T");
    spec.t0 = to_double(require("constants/t0"), "t0");
    spec.c0 = to_double(require("constants/c0"), "c0");
    spec.q = static_cast<int>(to_double(require("constants/q"), "q"));
    if (const auto* v = optional("constants/delta")) spec.delta = to_double(*v, "delta");

    spec.validate_shape();
    return spec;
}

ProblemSpec read_problem_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open problem file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return read_problem(buf.str());
}

std::string write_problem(const ProblemSpec& spec) {
    spec.validate_shape();
    std::ostringstream out;
    out << "[dimensions]\n";
    out << "name = " << spec.name << "\n";
    out << "d = " << spec.d << "\n";
    out << "m = " << spec.m << "\n\n";
    out << "[coefficients]\n";
    for (int i = 1; i <= spec.d; ++i)
        out << "drift." << i << " = " << spec.drift[static_cast<std::size_t>(i - 1)].source()
            << "\n";
    for (int i = 1; i <= spec.d; ++i)
        for (int k = 1; k <= spec.m; ++k)
            out << "sigma." << i << "." << k << " = "
                << spec.diffusion[static_cast<std::size_t>((i - 1) * spec.m + (k - 1))].source()
                << "\n";
    out << "potential = " << spec.potential.source() << "\n";
    out << "source = " << spec.source.source() << "\n";
    out << "terminal = " << spec.terminal.source() << "\n";
    out << "potential.growth = " << spec.potential.growth().to_string() << "\n";
    out << "source.growth = " << spec.source.growth().to_string() << "\n";
    out << "terminal.growth = " << spec.terminal.growth().to_string() << "\n\n";
    out << "[constants]\n";
    out << "T = " << format_double(spec.T) << "\n";
    out << "t0 = " << format_double(spec.t0) << "\n";
    out << "c0 = " << format_double(spec.c0) << "\n";
    out << "q = " << spec.q << "\n";
    if (spec.delta) out << "delta = " << format_double(*spec.delta) << "\n";
    return out.str();
}

void write_problem_file(const ProblemSpec& spec, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write problem file '" + path + "'");
    out << write_problem(spec);
}

}  // namespace kolmo::problem
