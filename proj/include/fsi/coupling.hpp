/// @file coupling.hpp
/// @brief The geometry map F (one space-time solve on a given deformation) and the global fixed-point
///        iteration eta^k = F(eta^{k-1}) with contraction monitoring.
#pragma once

#include <cmath>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "fsi/errors.hpp"
#include "fsi/fluid.hpp"
#include "fsi/geometry.hpp"
#include "fsi/model.hpp"
#include "fsi/structure.hpp"

namespace fsi {

/// Flow and wall states at every time level of one solve, with the deformation they were computed on.
struct Trajectory {
    Grid2D grid;
    std::vector<double> times;
    std::vector<FlowState> flows;
    std::vector<WallState> walls;
    std::vector<StepDiagnostics> steps;  ///< steps[n] describes the step times[n] -> times[n+1]
    DeformationHistory history;

    [[nodiscard]] int levels() const { return static_cast<int>(times.size()); }

    /// Wall displacement over time levels x nodes; this is F(delta).
    [[nodiscard]] Table eta() const {
        Table t(levels(), static_cast<int>(walls.front().eta.size()));
        for (int n = 0; n < levels(); ++n) t.set_row(n, walls[n].eta);
        return t;
    }
    [[nodiscard]] Table sigma() const {
        Table t(levels(), static_cast<int>(walls.front().sigma.size()));
        for (int n = 0; n < levels(); ++n) t.set_row(n, walls[n].sigma);
        return t;
    }
};

inline Table zero_wall_trajectory(const ModelConfig& cfg) { return Table(cfg.steps() + 1, cfg.N1 + 1, 0.0); }

/// h = R0 + delta on the configured grid and time levels.
inline DeformationHistory deformation_of(const Table& delta, const ModelConfig& cfg) {
    return eval_deformation(delta, cfg.r0_profile(), cfg.wall_grid(), cfg.times());
}

/// Runs the full time loop on the fixed deformation R0 + delta from zero initial data.
inline Trajectory evaluate_F(const Table& delta, const ModelConfig& cfg) {
    cfg.validate();
    Trajectory tr;
    tr.grid = cfg.grid();
    tr.times = cfg.times();
    tr.history = deformation_of(delta, cfg);
    const AdmissibilityParams ap = cfg.admissibility();
    const AdmissibilityReport rep = check_admissible(tr.history, ap);
    if (!rep.passed()) throw InadmissibleDeformation("evaluate_F: " + rep.summary(ap));

    const Grid2D& g = tr.grid;
    CoupledStepper st(g, cfg.wall_params(), cfg.mu / cfg.rho, cfg.scheme(), cfg.pressures());
    const int nt = cfg.steps();
    tr.flows.reserve(nt + 1);
    tr.walls.reserve(nt + 1);
    tr.steps.reserve(nt);
    tr.flows.push_back(FlowState::zero(g, 0.0));
    tr.walls.push_back(WallState::zero(cfg.wall_grid(), 0.0));
    WallSnapshot prev = WallSnapshot::from(tr.history, 0);
    for (int n = 0; n < nt; ++n) {
        WallSnapshot next = WallSnapshot::from(tr.history, n + 1);
        auto [f, w] = st.step(tr.flows.back(), tr.walls.back(), prev, next);
        // keep the time stamps exact multiples of dt
        f.t = w.t = tr.times[n + 1];
        tr.flows.push_back(std::move(f));
        tr.walls.push_back(std::move(w));
        tr.steps.push_back(st.last());
        prev = std::move(next);
    }
    return tr;
}

/// Components of the Z-norm of a wall trajectory e (time levels x nodes):
/// (int_0^T ||e||_{H2}^2 + ||e_t||_{H2}^2 dt)^{1/2} and max_t ||e||_{L2} + max_t ||e_t||_{L2}.
/// H2 uses the clamped ghost e_{-1} = e_1; e_t is the forward difference between levels.
struct ZNormParts {
    double h1_h2 = 0.0;
    double w1inf_l2 = 0.0;
    [[nodiscard]] double total() const { return h1_h2 + w1inf_l2; }
};

namespace detail {

inline double l2_sq(const Grid1D& g, std::span<const double> f) {
    double s = 0.0;
    for (int i = 0; i < g.nodes(); ++i) s += g.weight(i) * f[i] * f[i];
    return s;
}

inline double h2_sq(const Grid1D& g, std::span<const double> f) {
    const double dx = g.dx();
    double semi1 = 0.0, semi2 = 0.0;
    for (int i = 0; i < g.N; ++i) semi1 += (f[i + 1] - f[i]) * (f[i + 1] - f[i]) / dx;
    for (int i = 0; i <= g.N; ++i) {
        const double left = i == 0 ? f[1] : f[i - 1];
        const double right = i == g.N ? f[g.N - 1] : f[i + 1];
        const double d2 = (left - 2.0 * f[i] + right) / (dx * dx);
        semi2 += g.weight(i) * d2 * d2;
    }
    return l2_sq(g, f) + semi1 + semi2;
}

}  // namespace detail

inline ZNormParts z_norm_parts(const Table& e, const Grid1D& g, const std::vector<double>& times) {
    FSI_REQUIRE(e.cols() == g.nodes() && e.rows() == static_cast<int>(times.size()) && e.rows() >= 2, DimensionError,
                "z_norm: trajectory does not match the grid and time levels");
    const int nt = e.rows();
    ZNormParts z;
    double integral = 0.0, max_l2 = 0.0, max_dt = 0.0;
    Field de(g.nodes());
    for (int n = 0; n < nt; ++n) {
        max_l2 = std::max(max_l2, std::sqrt(detail::l2_sq(g, e.row(n))));
        if (n + 1 < nt) {
            const double tau = times[n + 1] - times[n];
            integral += 0.5 * tau * (detail::h2_sq(g, e.row(n)) + detail::h2_sq(g, e.row(n + 1)));
            for (int i = 0; i < g.nodes(); ++i) de[i] = (e(n + 1, i) - e(n, i)) / tau;
            integral += tau * detail::h2_sq(g, de);
            max_dt = std::max(max_dt, std::sqrt(detail::l2_sq(g, de)));
        }
    }
    z.h1_h2 = std::sqrt(integral);
    z.w1inf_l2 = max_l2 + max_dt;
    return z;
}

inline double z_norm(const Table& e, const Grid1D& g, const std::vector<double>& times) {
    return z_norm_parts(e, g, times).total();
}

inline double z_distance(const Table& a, const Table& b, const Grid1D& g, const std::vector<double>& times) {
    FSI_REQUIRE(a.rows() == b.rows() && a.cols() == b.cols(), DimensionError, "z_distance: trajectories differ in shape");
    Table d(a.rows(), a.cols());
    for (int n = 0; n < a.rows(); ++n)
        for (int i = 0; i < a.cols(); ++i) d(n, i) = a(n, i) - b(n, i);
    return z_norm(d, g, times);
}

struct IterationReport {
    std::vector<double> d;        ///< d_k = ||eta^k - eta^{k-1}||_Z, k = 1..iterations
    std::vector<double> q;        ///< q_k = d_k / d_{k-1}, k = 2..iterations; NaN where d_{k-1} is at the noise floor
    std::vector<double> z_norms;  ///< ||eta^k||_Z
    std::vector<AdmissibilityReport> admissibility;  ///< per iterate eta^k
    std::vector<bool> in_ball;    ///< eta^k admissible and inside B_alpha
    int iterations = 0;
    bool converged = false;
    bool diverged = false;    ///< q_k >= 1 on three consecutive iterates
    bool left_ball = false;   ///< an iterate left B_alpha
    double ball_radius = 0.0; ///< R_min - alpha
    double fixed_point_residual = std::numeric_limits<double>::quiet_NaN();
    std::string message;

    /// Largest reported contraction factor (NaN if none was reported).
    [[nodiscard]] double max_q() const {
        double m = std::numeric_limits<double>::quiet_NaN();
        for (double v : q)
            if (!std::isnan(v)) m = std::isnan(m) ? v : std::max(m, v);
        return m;
    }
};

/// Raised when an iterate leaves B_alpha; carries the report up to that iterate.
class IterationAbort : public AdmissibilityError {
public:
    IterationAbort(const std::string& what, int iterate, IterationReport report)
        : AdmissibilityError(what, iterate), report_(std::move(report)) {}
    [[nodiscard]] const IterationReport& report() const noexcept { return report_; }

private:
    IterationReport report_;
};

struct IterationResult {
    Trajectory trajectory;  ///< F(eta^{k-1}), whose wall displacement is the last iterate
    IterationReport report;
};

/// eta^k = F(eta^{k-1}) until d_k <= tol, max_iter, or three consecutive q_k >= 1.
/// Every iterate is checked for membership of B_alpha: R0 + eta^k admissible and ||eta^k||_Z <= R_min - alpha.
inline IterationResult global_iterate(const Table& eta0, const ModelConfig& cfg, double tol, int max_iter,
                                      bool confirm = true) {
    cfg.validate();
    FSI_REQUIRE(tol >= 0.0 && max_iter >= 1, DomainError, "global_iterate: need tol >= 0 and max_iter >= 1");
    const Grid1D wg = cfg.wall_grid();
    const std::vector<double> times = cfg.times();
    const AdmissibilityParams ap = cfg.admissibility();
    IterationReport rep;
    rep.ball_radius = ap.R_min - ap.alpha;

    auto check_ball = [&](const Table& eta, int k) {
        const AdmissibilityReport a = check_admissible(deformation_of(eta, cfg), ap);
        const double zn = z_norm(eta, wg, times);
        if (k > 0) {
            rep.admissibility.push_back(a);
            rep.z_norms.push_back(zn);
        }
        std::string why;
        if (!a.passed()) why = a.summary(ap);
        else if (zn > rep.ball_radius)
            why = "||eta||_Z = " + std::to_string(zn) + " exceeds R_min - alpha = " + std::to_string(rep.ball_radius);
        if (k > 0) rep.in_ball.push_back(why.empty());
        if (!why.empty()) {
            rep.left_ball = true;
            rep.message = "iterate " + std::to_string(k) + " left B_alpha: " + why +
                          "; the final time is too large for the contraction argument";
            throw IterationAbort(rep.message, k, rep);
        }
    };

    FSI_REQUIRE(eta0.rows() == static_cast<int>(times.size()) && eta0.cols() == wg.nodes(), DimensionError,
                "global_iterate: eta0 does not match the grid and time levels");
    check_ball(eta0, 0);

    Table prev = eta0;
    IterationResult out;
    int above_one = 0;
    for (int k = 1; k <= max_iter; ++k) {
        out.trajectory = evaluate_F(prev, cfg);
        Table cur = out.trajectory.eta();
        rep.iterations = k;
        // d_k and q_k are recorded before the ball check so an aborted report is complete
        const double dk = z_distance(cur, prev, wg, times);
        rep.d.push_back(dk);
        if (k >= 2) {
            const double floor = 10.0 * cfg.solver_tol * std::max(1.0, z_norm(cur, wg, times));
            const double dprev = rep.d[k - 2];
            const double qk = dprev > floor ? dk / dprev : std::numeric_limits<double>::quiet_NaN();
            rep.q.push_back(qk);
            above_one = (!std::isnan(qk) && qk >= 1.0) ? above_one + 1 : 0;
        }
        check_ball(cur, k);
        prev = std::move(cur);
        if (dk <= tol) {
            rep.converged = true;
            rep.message = "converged in " + std::to_string(k) + " iteration(s)";
            break;
        }
        if (above_one >= 3) {
            rep.diverged = true;
            rep.message = "no contraction: q_k >= 1 on three consecutive iterates; halve T";
            break;
        }
    }
    if (!rep.converged && !rep.diverged)
        rep.message = "not converged within " + std::to_string(max_iter) + " iterations; halve T";
    if (rep.converged && confirm) {
        const Trajectory again = evaluate_F(prev, cfg);
        rep.fixed_point_residual = z_distance(again.eta(), prev, wg, times);
    }
    out.report = std::move(rep);
    return out;
}

}  // namespace fsi
