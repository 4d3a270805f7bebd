/// @file output.hpp
/// @brief CSV reports and legacy VTK snapshots. Numbers are written in shortest round-trip form.
#pragma once

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "fsi/analysis.hpp"
#include "fsi/config.hpp"
#include "fsi/coupling.hpp"
#include "fsi/errors.hpp"

namespace fsi {

/// Failure to create or write an output file.
class OutputError : public Error {
public:
    using Error::Error;
};

/// Header plus numeric rows; empty cells read back as NaN.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;

    [[nodiscard]] int column(const std::string& name) const {
        for (std::size_t k = 0; k < header.size(); ++k)
            if (header[k] == name) return static_cast<int>(k);
        throw DimensionError("csv: no column '" + name + "'");
    }
    [[nodiscard]] std::vector<double> values(const std::string& name) const {
        const int c = column(name);
        std::vector<double> v;
        for (const auto& r : rows) v.push_back(r[c]);
        return v;
    }
};

namespace detail {

inline std::string csv_cell(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    return format_double(v);
}

inline std::ofstream open_output(const std::filesystem::path& path) {
    std::error_code ec;
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
    std::ofstream out(path);
    if (!out) throw OutputError("cannot write '" + path.string() + "'");
    return out;
}

inline void close_output(std::ofstream& out, const std::filesystem::path& path) {
    out.close();
    if (!out) throw OutputError("error while writing '" + path.string() + "'");
}

inline double csv_value(const std::string& s) {
    const std::string t = trim(s);
    if (t.empty() || t == "nan") return std::numeric_limits<double>::quiet_NaN();
    if (t == "inf") return std::numeric_limits<double>::infinity();
    if (t == "-inf") return -std::numeric_limits<double>::infinity();
    return parse_number(t, "csv");
}

}  // namespace detail

inline void write_csv(const std::filesystem::path& path, const CsvTable& t) {
    auto out = detail::open_output(path);
    for (std::size_t k = 0; k < t.header.size(); ++k) out << (k ? "," : "") << t.header[k];
    out << "\n";
    for (const auto& r : t.rows) {
        for (std::size_t k = 0; k < r.size(); ++k) out << (k ? "," : "") << detail::csv_cell(r[k]);
        out << "\n";
    }
    detail::close_output(out, path);
}

inline CsvTable read_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw OutputError("cannot read '" + path.string() + "'");
    CsvTable t;
    std::string line;
    auto split = [](const std::string& l) {
        std::vector<std::string> cells;
        std::stringstream ss(l);
        std::string c;
        while (std::getline(ss, c, ',')) cells.push_back(c);
        if (!l.empty() && l.back() == ',') cells.emplace_back();
        return cells;
    };
    if (!std::getline(in, line)) throw OutputError("'" + path.string() + "' is empty");
    t.header = split(line);
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto cells = split(line);
        if (cells.size() != t.header.size()) throw OutputError("'" + path.string() + "': ragged row");
        std::vector<double> r;
        for (const auto& c : cells) r.push_back(detail::csv_value(c));
        t.rows.push_back(std::move(r));
    }
    return t;
}

/// Per time level: t, fluid_energy, wall_energy, div_h_norm, wall_mismatch_norm, then the step's
/// boundary_work and dissipation (zero on the first row).
inline CsvTable timeseries_table(const Trajectory& tr, const ModelConfig& cfg) {
    CsvTable t;
    t.header = {"t", "fluid_energy", "wall_energy", "div_h_norm", "wall_mismatch_norm", "boundary_work", "dissipation"};
    const WallParams wp = cfg.wall_params();
    const WallSnapshot s0 = WallSnapshot::from(tr.history, 0);
    const FlowState& f0 = tr.flows.front();
    t.rows.push_back({tr.times[0], fluid_energy(tr.grid, f0, s0), wall_energy(tr.walls.front(), wp, cfg.wall_grid()),
                      l2_norm(tr.grid, div_h_field(tr.grid, f0.u, s0)), wall_mismatch(tr.grid, f0, tr.walls.front()),
                      0.0, 0.0});
    for (std::size_t n = 0; n < tr.steps.size(); ++n) {
        const StepDiagnostics& d = tr.steps[n];
        t.rows.push_back({tr.times[n + 1], d.fluid_energy, d.wall_energy, d.div_h_norm, d.wall_mismatch,
                          d.boundary_work, d.dissipation});
    }
    return t;
}

/// k, d_k, q_k (empty for k = 1), ||eta^k||_Z, admissible (1 when eta^k lies in B_alpha).
inline CsvTable iteration_table(const IterationReport& r) {
    CsvTable t;
    t.header = {"k", "d_k", "q_k", "z_norm", "admissible"};
    const std::size_t n = r.z_norms.size();
    for (std::size_t k = 0; k < n; ++k) {
        const double d = k < r.d.size() ? r.d[k] : std::numeric_limits<double>::quiet_NaN();
        const double q = k >= 1 && k - 1 < r.q.size() ? r.q[k - 1] : std::numeric_limits<double>::quiet_NaN();
        const double adm = k < r.in_ball.size() && r.in_ball[k] ? 1.0 : 0.0;
        t.rows.push_back({static_cast<double>(k + 1), d, q, r.z_norms[k], adm});
    }
    return t;
}

/// Writes iterations.csv, leaving the q_k cell empty on the first row.
inline void write_iteration_csv(const std::filesystem::path& path, const IterationReport& r) {
    const CsvTable t = iteration_table(r);
    auto out = detail::open_output(path);
    out << "k,d_k,q_k,z_norm,admissible\n";
    for (std::size_t k = 0; k < t.rows.size(); ++k) {
        const auto& row = t.rows[k];
        out << static_cast<int>(row[0]) << "," << detail::csv_cell(row[1]) << ","
            << (k == 0 ? std::string() : detail::csv_cell(row[2])) << "," << detail::csv_cell(row[3]) << ","
            << static_cast<int>(row[4]) << "\n";
    }
    detail::close_output(out, path);
}

/// key = value summary of an iteration report.
inline void write_iteration_summary(const std::filesystem::path& path, const IterationReport& r) {
    auto out = detail::open_output(path);
    out << "converged = " << (r.converged ? "true" : "false") << "\n"
        << "diverged = " << (r.diverged ? "true" : "false") << "\n"
        << "left_ball = " << (r.left_ball ? "true" : "false") << "\n"
        << "iterations = " << r.iterations << "\n"
        << "ball_radius = " << detail::csv_cell(r.ball_radius) << "\n"
        << "max_q = " << detail::csv_cell(r.max_q()) << "\n"
        << "fixed_point_residual = " << detail::csv_cell(r.fixed_point_residual) << "\n"
        << "message = " << r.message << "\n";
    detail::close_output(out, path);
}

inline CsvTable dependence_table(const DependenceReport& r) {
    CsvTable t;
    t.header = {"t", "lhs", "data", "omega", "deformation", "rhs", "ratio"};
    for (std::size_t n = 0; n < r.times.size(); ++n)
        t.rows.push_back({r.times[n], r.lhs[n], r.data[n], r.omega[n], r.deformation[n], r.rhs[n], r.ratio[n]});
    return t;
}

/// Pointwise kinds: sample, residual. Refinement kinds: level, spacing, residual. essup: sample, ratio.
inline CsvTable identity_table(const IdentityReport& r) {
    CsvTable t;
    if (r.refinement()) {
        t.header = {"level", "spacing", "residual"};
        for (std::size_t k = 0; k < r.residuals.size(); ++k)
            t.rows.push_back({static_cast<double>(k), r.spacings[k], r.residuals[k]});
    } else {
        t.header = {"sample", r.kind == IdentityKind::essup ? "ratio" : "residual"};
        for (std::size_t k = 0; k < r.residuals.size(); ++k) t.rows.push_back({static_cast<double>(k), r.residuals[k]});
    }
    return t;
}

inline CsvTable equicontinuity_table(const EquicontinuityProfile& p) {
    CsvTable t;
    t.header = {"tau", "value", "fit"};
    for (std::size_t k = 0; k < p.taus.size(); ++k) t.rows.push_back({p.taus[k], p.values[k], p.c * p.taus[k]});
    return t;
}

/// Legacy VTK structured points on the reference grid: u (vectors), q (kinematic pressure q + q_level),
/// h and the physical ordinate x2 = y2 h of every node.
inline void write_vtk_snapshot(const std::filesystem::path& path, const Trajectory& tr, int level) {
    FSI_REQUIRE(level >= 0 && level < tr.levels(), DimensionError, "write_vtk_snapshot: level out of range");
    const Grid2D& g = tr.grid;
    const FlowState& f = tr.flows[level];
    auto out = detail::open_output(path);
    out << "# vtk DataFile Version 3.0\n"
        << "fsi level " << level << " t = " << format_double(tr.times[level]) << "\n"
        << "ASCII\nDATASET STRUCTURED_POINTS\n"
        << "DIMENSIONS " << g.n1() << " " << g.n2() << " 1\n"
        << "ORIGIN 0 0 0\n"
        << "SPACING " << format_double(g.d1()) << " " << format_double(g.d2()) << " 1\n"
        << "POINT_DATA " << g.nodes() << "\n";
    // VTK orders points with x fastest
    auto each = [&](auto&& emit) {
        for (int j = 0; j < g.n2(); ++j)
            for (int i = 0; i < g.n1(); ++i) emit(i, j, g.idx(i, j));
    };
    out << "VECTORS u double\n";
    each([&](int, int, int k) { out << format_double(f.u.c1[k]) << " " << format_double(f.u.c2[k]) << " 0\n"; });
    out << "SCALARS q double 1\nLOOKUP_TABLE default\n";
    each([&](int, int, int k) { out << format_double(f.q[k] + f.q_level) << "\n"; });
    out << "SCALARS h double 1\nLOOKUP_TABLE default\n";
    each([&](int i, int, int) { out << format_double(tr.history.h(level, i)) << "\n"; });
    out << "SCALARS x2 double 1\nLOOKUP_TABLE default\n";
    each([&](int i, int j, int) { out << format_double(g.y2(j) * tr.history.h(level, i)) << "\n"; });
    detail::close_output(out, path);
}

/// timeseries.csv, config.ini and, if enabled, VTK snapshots every vtk_every levels (and the last one).
inline void write_run_outputs(const std::filesystem::path& dir, const Trajectory& tr, const ModelConfig& cfg) {
    write_csv(dir / "timeseries.csv", timeseries_table(tr, cfg));
    {
        auto out = detail::open_output(dir / "config.ini");
        out << write_config(cfg);
        detail::close_output(out, dir / "config.ini");
    }
    if (cfg.vtk) {
        for (int n = 0; n < tr.levels(); ++n)
            if (n % cfg.vtk_every == 0 || n + 1 == tr.levels()) {
                std::ostringstream name;
                name << "snapshot_" << std::setw(5) << std::setfill('0') << n << ".vtk";
                write_vtk_snapshot(dir / name.str(), tr, n);
            }
    }
}

}  // namespace fsi
