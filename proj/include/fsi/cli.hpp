/// @file cli.hpp
/// @brief The fsi_sim command-line surface. run_cli never lets an exception escape; it maps failures to exit codes.
#pragma once

#include <CLI11.hpp>

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "fsi/analysis.hpp"
#include "fsi/config.hpp"
#include "fsi/coupling.hpp"
#include "fsi/output.hpp"

namespace fsi {

enum ExitCode : int { exit_ok = 0, exit_usage = 1, exit_config = 2, exit_solver = 3, exit_admissibility = 4 };

/// Worker count for sweeps: FSI_THREADS if set and positive, else the hardware concurrency.
inline int worker_count() {
    if (const char* env = std::getenv("FSI_THREADS")) {
        try {
            const int n = std::stoi(env);
            if (n > 0) return n;
        } catch (const std::exception&) {
        }
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

namespace detail {

struct CliOptions {
    std::string config;
    std::string out;
    // compare
    std::string config2;
    std::optional<double> pressure_shift, bump;
    // verify
    std::string kind = "all";
    int count = 100;
    unsigned seed = 12345;
    // sweep
    std::vector<double> kappas, epss, Ts;
};

inline ModelConfig load_config(const CliOptions& o) {
    ModelConfig c = o.config.empty() ? ModelConfig{} : parse_config(o.config);
    if (!o.out.empty()) c.output_dir = o.out;
    c.validate();
    return c;
}

inline std::filesystem::path out_dir(const ModelConfig& c) { return c.output_dir; }

/// Writes admissibility_report.txt for a rejected deformation and returns exit 4.
inline int inadmissible(const std::filesystem::path& dir, const std::string& command, const std::exception& e,
                        std::ostream& log) {
    auto out = detail::open_output(dir / "admissibility_report.txt");
    out << "command = " << command << "\nadmissible = false\nmessage = " << e.what() << "\n";
    detail::close_output(out, dir / "admissibility_report.txt");
    log << command << ": " << e.what() << "\n";
    return exit_admissibility;
}

inline int cmd_run(const CliOptions& o, std::ostream& log) {
    const ModelConfig cfg = load_config(o);
    Trajectory tr;
    try {
        tr = evaluate_F(zero_wall_trajectory(cfg), cfg);
    } catch (const InadmissibleDeformation& e) {
        return inadmissible(out_dir(cfg), "run", e, log);
    }
    write_run_outputs(out_dir(cfg), tr, cfg);
    const auto& last = tr.steps.empty() ? StepDiagnostics{} : tr.steps.back();
    log << "run: " << cfg.steps() << " steps, final fluid energy " << format_double(last.fluid_energy)
        << ", wall energy " << format_double(last.wall_energy) << "\n";
    return exit_ok;
}

inline void write_iteration_outputs(const std::filesystem::path& dir, const IterationReport& rep) {
    write_iteration_csv(dir / "iterations.csv", rep);
    write_iteration_summary(dir / "iteration_report.txt", rep);
}

/// Runs the fixed point and writes its report; exit 4 unless it converged.
inline int iterate_into(const ModelConfig& cfg, const std::filesystem::path& dir, std::ostream& log,
                        IterationReport* report_out = nullptr) {
    try {
        const IterationResult res = global_iterate(zero_wall_trajectory(cfg), cfg, cfg.iter_tol, cfg.max_iter);
        write_iteration_outputs(dir, res.report);
        write_run_outputs(dir, res.trajectory, cfg);
        if (report_out) *report_out = res.report;
        log << "iterate: " << res.report.message << "\n";
        return res.report.converged ? exit_ok : exit_admissibility;
    } catch (const IterationAbort& e) {
        write_iteration_outputs(dir, e.report());
        if (report_out) *report_out = e.report();
        log << "iterate: " << e.what() << "\n";
        return exit_admissibility;
    } catch (const InadmissibleDeformation& e) {
        IterationReport rep;
        rep.message = e.what();
        write_iteration_outputs(dir, rep);
        if (report_out) *report_out = rep;
        log << "iterate: " << e.what() << "\n";
        return exit_admissibility;
    }
}

inline int cmd_iterate(const CliOptions& o, std::ostream& log) {
    const ModelConfig cfg = load_config(o);
    return iterate_into(cfg, out_dir(cfg), log);
}

inline int cmd_compare(const CliOptions& o, std::ostream& log) {
    const ModelConfig c1 = load_config(o);
    const int modes = !o.config2.empty() + o.pressure_shift.has_value() + o.bump.has_value();
    if (modes != 1) throw CLI::ValidationError("compare", "give exactly one of --config2, --pressure-shift, --bump");
    DependenceCase a{c1, zero_wall_trajectory(c1)}, b = a;
    if (!o.config2.empty()) {
        b.config = parse_config(o.config2);
        b.config.output_dir = c1.output_dir;
    } else if (o.pressure_shift) {
        b.config.p_in = shifted_amplitude(c1.p_in, *o.pressure_shift);
    } else {
        b.delta = bump_deformation(c1, *o.bump);
    }
    DependenceReport rep;
    try {
        rep = dependence_experiment(a, b);
    } catch (const InadmissibleDeformation& e) {
        return inadmissible(out_dir(c1), "compare", e, log);
    }
    write_csv(out_dir(c1) / "dependence.csv", dependence_table(rep));
    log << "compare: max lhs/rhs " << format_double(rep.max_ratio()) << " (c_Ko " << format_double(rep.c_korn)
        << ")\n";
    return exit_ok;
}

inline void verify_korn(const ModelConfig& cfg, const std::filesystem::path& dir, std::ostream& log) {
    // the dense eigenproblem is limited to small grids; sample the initial wall onto one
    const Grid2D coarse(cfg.L, std::min(cfg.N1, 24), std::min(cfg.N2, 24));
    const DeformationHistory hist = deformation_of(zero_wall_trajectory(cfg), cfg);
    const KornResult k = korn_constant(coarse, detail::coarse_snapshot(hist, 0, coarse));
    CsvTable t;
    t.header = {"N1", "N2", "dofs", "lambda_min", "alpha", "c_korn"};
    t.rows.push_back({double(coarse.N1), double(coarse.N2), double(k.dofs), k.lambda_min, k.alpha, k.c_korn});
    write_csv(dir / "korn.csv", t);
    log << "verify korn: c_Ko = " << format_double(k.c_korn) << "\n";
}

inline void verify_equicontinuity(const ModelConfig& cfg, const std::filesystem::path& dir, std::ostream& log) {
    const Trajectory tr = evaluate_F(zero_wall_trajectory(cfg), cfg);
    std::vector<double> taus;
    for (int k = 0; k <= cfg.steps() / 2; ++k) taus.push_back(k * cfg.dt);
    const EquicontinuityProfile p = equicontinuity_profile(tr, taus);
    write_csv(dir / "equicontinuity.csv", equicontinuity_table(p));
    log << "verify equicontinuity: c = " << format_double(p.c) << "\n";
}

inline int cmd_verify(const CliOptions& o, std::ostream& log) {
    const ModelConfig cfg = load_config(o);
    const std::filesystem::path dir = out_dir(cfg);
    const std::vector<IdentityKind> all_kinds = {IdentityKind::piola,        IdentityKind::viscous_transform,
                                                 IdentityKind::grad_R,       IdentityKind::trilinear_skew,
                                                 IdentityKind::essup,        IdentityKind::div_free,
                                                 IdentityKind::def_tensor};
    auto identity = [&](IdentityKind k) {
        const IdentityReport r = verify_identity(k, o.count, o.seed);
        write_csv(dir / ("identity_" + to_string(k) + ".csv"), identity_table(r));
        log << "verify " << to_string(k) << ": max " << format_double(r.max_residual);
        if (r.refinement()) log << ", order " << format_double(r.order);
        log << "\n";
    };
    if (o.kind == "all") {
        for (IdentityKind k : all_kinds) identity(k);
        verify_korn(cfg, dir, log);
        verify_equicontinuity(cfg, dir, log);
    } else if (o.kind == "korn") {
        verify_korn(cfg, dir, log);
    } else if (o.kind == "equicontinuity") {
        verify_equicontinuity(cfg, dir, log);
    } else {
        identity(identity_kind(o.kind));
    }
    return exit_ok;
}

/// Grid of global iterations over kappa x eps x T; each run writes into its own directory.
inline int cmd_sweep(const CliOptions& o, std::ostream& log) {
    const ModelConfig base = load_config(o);
    struct Job {
        ModelConfig cfg;
        std::string name;
        int code = exit_ok;
        IterationReport report;
        std::string error;
    };
    const std::vector<std::optional<double>> kappas = [&] {
        std::vector<std::optional<double>> v(o.kappas.begin(), o.kappas.end());
        if (v.empty()) v.push_back(base.kappa);
        return v;
    }();
    const std::vector<double> epss = o.epss.empty() ? std::vector<double>{base.eps} : o.epss;
    const std::vector<double> Ts = o.Ts.empty() ? std::vector<double>{base.T} : o.Ts;
    std::vector<Job> jobs;
    for (const auto& kappa : kappas)
        for (double eps : epss)
            for (double T : Ts) {
                Job j{base, "", exit_ok, {}, {}};
                j.cfg.kappa = kappa;
                j.cfg.eps = eps;
                j.cfg.T = T;
                j.cfg.validate();
                char name[32];
                std::snprintf(name, sizeof name, "run_%03zu", jobs.size());
                j.name = name;
                j.cfg.output_dir = (out_dir(base) / j.name).string();
                jobs.push_back(std::move(j));
            }

    std::atomic<std::size_t> next{0};
    std::mutex log_mutex;
    auto worker = [&] {
        for (std::size_t k = next++; k < jobs.size(); k = next++) {
            Job& j = jobs[k];
            std::ostringstream local;
            try {
                j.code = iterate_into(j.cfg, j.cfg.output_dir, local, &j.report);
            } catch (const SolverError& e) {
                j.code = exit_solver;
                j.error = e.what();
            } catch (const std::exception& e) {
                j.code = exit_config;
                j.error = e.what();
            }
            std::lock_guard lock(log_mutex);
            log << j.name << ": " << (j.error.empty() ? local.str() : j.error + "\n");
        }
    };
    const int nw = std::min<int>(worker_count(), static_cast<int>(jobs.size()));
    std::vector<std::thread> pool;
    for (int w = 0; w < nw; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();

    auto out = detail::open_output(out_dir(base) / "sweep.csv");
    // run k lives in run_<k as three digits>
    out << "run,kappa,eps,T,exit_code,converged,iterations,max_q\n";
    int worst = exit_ok;
    for (std::size_t k = 0; k < jobs.size(); ++k) {
        const Job& j = jobs[k];
        out << k << "," << csv_cell(j.cfg.kappa_value()) << "," << csv_cell(j.cfg.eps) << ","
            << csv_cell(j.cfg.T) << "," << j.code << "," << (j.report.converged ? 1 : 0) << ","
            << j.report.iterations << "," << csv_cell(j.report.max_q()) << "\n";
        worst = std::max(worst, j.code);
    }
    detail::close_output(out, out_dir(base) / "sweep.csv");
    return worst;
}

}  // namespace detail

/// Parses argv, runs one subcommand, and returns its exit code (0 ok, 1 usage or I/O, 2 configuration or
/// domain error, 3 solver failure, 4 admissibility or non-convergence).
inline int run_cli(int argc, const char* const* argv, std::ostream& log = std::cout, std::ostream& err = std::cerr) {
    CLI::App app{"Moving-wall channel flow with fixed-point fluid-structure coupling", "fsi_sim"};
    app.require_subcommand(1);
    detail::CliOptions o;
    auto common = [&](CLI::App* sub) {
        sub->add_option("-c,--config", o.config, "INI configuration file")->check(CLI::ExistingFile);
        sub->add_option("-o,--out", o.out, "output directory (overrides [output] dir)");
    };
    auto* run = app.add_subcommand("run", "single solve with a rigid wall history, writes timeseries.csv");
    auto* iterate = app.add_subcommand("iterate", "global fixed-point iteration, writes iterations.csv");
    auto* compare = app.add_subcommand("compare", "paired runs, writes dependence.csv");
    auto* verify = app.add_subcommand("verify", "identity, Korn and equicontinuity checks");
    auto* sweep = app.add_subcommand("sweep", "fixed-point runs over a kappa/eps/T grid");
    for (auto* s : {run, iterate, compare, verify, sweep}) common(s);
    compare->add_option("--config2", o.config2, "configuration of the second run")->check(CLI::ExistingFile);
    compare->add_option("--pressure-shift", o.pressure_shift, "raise the inflow amplitude of the second run");
    compare->add_option("--bump", o.bump, "impose a wall bump of this amplitude on the second run");
    verify->add_option("-k,--kind", o.kind, "identity kind, korn, equicontinuity or all");
    verify->add_option("-n,--count", o.count, "random samples per pointwise identity")->check(CLI::PositiveNumber);
    verify->add_option("--seed", o.seed, "random seed");
    sweep->add_option("--kappa", o.kappas, "penalty values")->delimiter(',');
    sweep->add_option("--eps", o.epss, "compressibility values")->delimiter(',');
    sweep->add_option("--T", o.Ts, "final times")->delimiter(',');

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, log, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, log, err);
        return exit_usage;
    }

    try {
        if (*run) return detail::cmd_run(o, log);
        if (*iterate) return detail::cmd_iterate(o, log);
        if (*compare) return detail::cmd_compare(o, log);
        if (*verify) return detail::cmd_verify(o, log);
        return detail::cmd_sweep(o, log);
    } catch (const CLI::ValidationError& e) {
        err << "error: " << e.what() << "\n";
        return exit_usage;
    } catch (const AdmissibilityError& e) {
        err << "error: " << e.what() << "\n";
        return exit_admissibility;
    } catch (const InadmissibleDeformation& e) {
        err << "error: " << e.what() << "\n";
        return exit_admissibility;
    } catch (const SolverError& e) {
        err << "error: " << e.what() << "\n";
        return exit_solver;
    } catch (const OutputError& e) {
        err << "error: " << e.what() << "\n";
        return exit_usage;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return exit_config;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return exit_usage;
    }
}

}  // namespace fsi
