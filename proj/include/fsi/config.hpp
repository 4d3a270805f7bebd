/// @file config.hpp
/// @brief Sectioned key = value configuration files for ModelConfig.
///
/// Sections and keys (all optional, defaults from ModelConfig):
///   [physical]      rho mu a b c rho_w hbar L R0
///   [scheme]        N1 N2 dt T kappa eps solver_tol iter_tol max_iter coupling
///   [admissibility] alpha K
///   [pressure]      p_in p_out p_w
///   [output]        dir vtk vtk_every
/// R0 is constant(r), sine(r, a) or bump(r, a). A pressure is a number, constant(v), pulse(amp, t_rise, t_fall)
/// or table(path) where path holds "t value" lines; relative paths are resolved against the config file
/// and stored absolute.
/// Comments start with ';' or '#' on their own line.
#pragma once

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <map>
#include <regex>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "fsi/errors.hpp"
#include "fsi/model.hpp"

namespace fsi {

/// Shortest decimal text that reads back to the same double.
inline std::string format_double(double v) {
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

namespace detail {

inline std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return {};
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

inline double parse_number(const std::string& text, const std::string& where) {
    const std::string t = trim(text);
    double v = 0.0;
    const auto r = std::from_chars(t.data(), t.data() + t.size(), v);
    if (t.empty() || r.ec != std::errc() || r.ptr != t.data() + t.size())
        throw ConfigError(where + ": expected a number, got '" + text + "'");
    return v;
}

inline int parse_int(const std::string& text, const std::string& where) {
    const std::string t = trim(text);
    int v = 0;
    const auto r = std::from_chars(t.data(), t.data() + t.size(), v);
    if (t.empty() || r.ec != std::errc() || r.ptr != t.data() + t.size())
        throw ConfigError(where + ": expected an integer, got '" + text + "'");
    return v;
}

inline bool parse_bool(const std::string& text, const std::string& where) {
    const std::string t = trim(text);
    if (t == "true" || t == "1" || t == "yes" || t == "on") return true;
    if (t == "false" || t == "0" || t == "no" || t == "off") return false;
    throw ConfigError(where + ": expected true or false, got '" + text + "'");
}

struct Call {
    std::string name;
    std::vector<std::string> args;
};

// name(arg, arg, ...)
inline Call parse_call(const std::string& text, const std::string& where) {
    static const std::regex re(R"(^\s*([A-Za-z_]+)\s*\((.*)\)\s*$)");
    std::smatch m;
    if (!std::regex_match(text, m, re)) throw ConfigError(where + ": expected kind(arguments), got '" + text + "'");
    Call c{m[1].str(), {}};
    std::stringstream ss(m[2].str());
    std::string a;
    while (std::getline(ss, a, ',')) c.args.push_back(trim(a));
    if (c.args.size() == 1 && c.args[0].empty()) c.args.clear();
    return c;
}

inline void require_args(const Call& c, std::size_t n, const std::string& where) {
    if (c.args.size() != n)
        throw ConfigError(where + ": " + c.name + " takes " + std::to_string(n) + " argument(s), got " +
                          std::to_string(c.args.size()));
}

inline R0Spec parse_r0(const std::string& text) {
    const std::string where = "[physical] R0";
    const Call c = parse_call(text, where);
    R0Spec r;
    r.kind = c.name;
    if (c.name == "constant") {
        require_args(c, 1, where);
        r.r = parse_number(c.args[0], where);
    } else if (c.name == "sine" || c.name == "bump") {
        require_args(c, 2, where);
        r.r = parse_number(c.args[0], where);
        r.amp = parse_number(c.args[1], where);
    } else {
        throw ConfigError(where + ": kind must be constant, sine or bump (got '" + c.name + "')");
    }
    return r;
}

inline std::vector<std::pair<double, double>> read_pressure_table(const std::filesystem::path& path,
                                                                  const std::string& where) {
    std::ifstream in(path);
    if (!in) throw ConfigError(where + ": cannot read pressure table '" + path.string() + "'");
    std::vector<std::pair<double, double>> s;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        std::istringstream ls(t);
        std::string a, b, extra;
        if (!(ls >> a >> b) || (ls >> extra))
            throw ConfigError(path.string() + ":" + std::to_string(lineno) + ": expected 't value'");
        const std::string at = path.string() + ":" + std::to_string(lineno);
        s.emplace_back(parse_number(a, at), parse_number(b, at));
    }
    return s;
}

inline PressureSpec parse_pressure(const std::string& text, const std::string& key,
                                   const std::filesystem::path& base_dir) {
    const std::string where = "[pressure] " + key;
    const std::string t = trim(text);
    if (!t.empty() && t.find('(') == std::string::npos) return PressureSpec::constant(parse_number(t, where));
    const Call c = parse_call(t, where);
    if (c.name == "constant") {
        require_args(c, 1, where);
        return PressureSpec::constant(parse_number(c.args[0], where));
    }
    if (c.name == "pulse") {
        require_args(c, 3, where);
        return PressureSpec::pulse(parse_number(c.args[0], where), parse_number(c.args[1], where),
                                   parse_number(c.args[2], where));
    }
    if (c.name == "table") {
        require_args(c, 1, where);
        std::filesystem::path p(c.args[0]);
        if (p.is_relative()) p = base_dir / p;
        p = std::filesystem::absolute(p).lexically_normal();
        PressureSpec s;
        s.kind = PressureSpec::Kind::table;
        s.file = p.string();
        s.samples = read_pressure_table(p, where);
        return s;
    }
    throw ConfigError(where + ": kind must be constant, pulse or table (got '" + c.name + "')");
}

}  // namespace detail

/// Parses configuration text. Unknown sections or keys, duplicate keys and malformed values are errors;
/// the result is validated. Relative table paths are resolved against base_dir.
inline ModelConfig parse_config_text(const std::string& text, const std::filesystem::path& base_dir = ".") {
    namespace pt = boost::property_tree;
    pt::ptree tree;
    std::istringstream in(text);
    try {
        pt::ini_parser::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        throw ConfigError("line " + std::to_string(e.line()) + ": " + e.message());
    }

    static const std::map<std::string, std::set<std::string>> known = {
        {"physical", {"rho", "mu", "a", "b", "c", "rho_w", "hbar", "L", "R0"}},
        {"scheme", {"N1", "N2", "dt", "T", "kappa", "eps", "solver_tol", "iter_tol", "max_iter", "coupling"}},
        {"admissibility", {"alpha", "K"}},
        {"pressure", {"p_in", "p_out", "p_w"}},
        {"output", {"dir", "vtk", "vtk_every"}},
    };
    ModelConfig c;
    for (const auto& [section, body] : tree) {
        const auto ks = known.find(section);
        if (ks == known.end()) {
            if (!body.data().empty()) throw ConfigError("key '" + section + "' outside any section");
            throw ConfigError("unknown section [" + section + "]");
        }
        for (const auto& [key, node] : body) {
            if (!ks->second.count(key)) throw ConfigError("unknown key '" + key + "' in [" + section + "]");
            const std::string v = node.data();
            const std::string where = "[" + section + "] " + key;
            auto num = [&] { return detail::parse_number(v, where); };
            auto integer = [&] { return detail::parse_int(v, where); };
            if (section == "physical") {
                if (key == "rho") c.rho = num();
                else if (key == "mu") c.mu = num();
                else if (key == "a") c.a = num();
                else if (key == "b") c.b = num();
                else if (key == "c") c.c = num();
                else if (key == "rho_w") c.rho_w = num();
                else if (key == "hbar") c.hbar = num();
                else if (key == "L") c.L = num();
                else c.r0 = detail::parse_r0(v);
            } else if (section == "scheme") {
                if (key == "N1") c.N1 = integer();
                else if (key == "N2") c.N2 = integer();
                else if (key == "dt") c.dt = num();
                else if (key == "T") c.T = num();
                else if (key == "kappa") c.kappa = num();
                else if (key == "eps") c.eps = num();
                else if (key == "solver_tol") c.solver_tol = num();
                else if (key == "iter_tol") c.iter_tol = num();
                else if (key == "max_iter") c.max_iter = integer();
                else {
                    const std::string m = detail::trim(v);
                    if (m == "joint") c.coupling = CouplingMode::joint;
                    else if (m == "staggered") c.coupling = CouplingMode::staggered;
                    else throw ConfigError(where + ": expected joint or staggered, got '" + v + "'");
                }
            } else if (section == "admissibility") {
                if (key == "alpha") c.alpha = num();
                else c.K = num();
            } else if (section == "pressure") {
                PressureSpec p = detail::parse_pressure(v, key, base_dir);
                if (key == "p_in") c.p_in = std::move(p);
                else if (key == "p_out") c.p_out = std::move(p);
                else c.p_w = std::move(p);
            } else {
                if (key == "dir") c.output_dir = detail::trim(v);
                else if (key == "vtk") c.vtk = detail::parse_bool(v, where);
                else c.vtk_every = integer();
            }
        }
    }
    c.validate();
    return c;
}

inline ModelConfig parse_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file '" + path.string() + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str(), path.parent_path().empty() ? "." : path.parent_path());
}

/// Writes every field explicitly; parse_config_text(write_config(c)) reproduces c.
inline std::string write_config(const ModelConfig& c) {
    auto f = format_double;
    auto pressure = [&](const PressureSpec& p) {
        switch (p.kind) {
            case PressureSpec::Kind::constant: return "constant(" + f(p.value) + ")";
            case PressureSpec::Kind::pulse:
                return "pulse(" + f(p.value) + ", " + f(p.t_rise) + ", " + f(p.t_fall) + ")";
            case PressureSpec::Kind::table: return "table(" + p.file + ")";
        }
        return std::string();
    };
    std::ostringstream os;
    os << "[physical]\n"
       << "rho = " << f(c.rho) << "\nmu = " << f(c.mu) << "\na = " << f(c.a) << "\nb = " << f(c.b)
       << "\nc = " << f(c.c) << "\nrho_w = " << f(c.rho_w) << "\nhbar = " << f(c.hbar) << "\nL = " << f(c.L)
       << "\nR0 = "
       << (c.r0.kind == "constant" ? "constant(" + f(c.r0.r) + ")"
                                   : c.r0.kind + "(" + f(c.r0.r) + ", " + f(c.r0.amp) + ")")
       << "\n\n[scheme]\n"
       << "N1 = " << c.N1 << "\nN2 = " << c.N2 << "\ndt = " << f(c.dt) << "\nT = " << f(c.T) << "\n";
    if (c.kappa) os << "kappa = " << f(*c.kappa) << "\n";
    os << "eps = " << f(c.eps) << "\nsolver_tol = " << f(c.solver_tol) << "\niter_tol = " << f(c.iter_tol)
       << "\nmax_iter = " << c.max_iter
       << "\ncoupling = " << (c.coupling == CouplingMode::joint ? "joint" : "staggered") << "\n\n[admissibility]\n";
    if (c.alpha) os << "alpha = " << f(*c.alpha) << "\n";
    os << "K = " << f(c.K) << "\n\n[pressure]\n"
       << "p_in = " << pressure(c.p_in) << "\np_out = " << pressure(c.p_out) << "\np_w = " << pressure(c.p_w)
       << "\n\n[output]\n"
       << "dir = " << c.output_dir << "\nvtk = " << (c.vtk ? "true" : "false") << "\nvtk_every = " << c.vtk_every
       << "\n";
    return os.str();
}

/// Field-by-field equality, used for round-trip checks.
inline bool same_config(const ModelConfig& x, const ModelConfig& y) {
    return x.rho == y.rho && x.mu == y.mu && x.a == y.a && x.b == y.b && x.c == y.c && x.rho_w == y.rho_w &&
           x.hbar == y.hbar && x.L == y.L && x.r0 == y.r0 && x.N1 == y.N1 && x.N2 == y.N2 && x.dt == y.dt &&
           x.T == y.T && x.kappa == y.kappa && x.eps == y.eps && x.solver_tol == y.solver_tol &&
           x.iter_tol == y.iter_tol && x.max_iter == y.max_iter && x.coupling == y.coupling && x.alpha == y.alpha &&
           x.K == y.K && x.p_in == y.p_in && x.p_out == y.p_out && x.p_w == y.p_w && x.output_dir == y.output_dir &&
           x.vtk == y.vtk && x.vtk_every == y.vtk_every;
}

}  // namespace fsi
