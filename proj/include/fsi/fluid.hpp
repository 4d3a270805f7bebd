/// @file fluid.hpp
/// @brief Backward-Euler stepper for the penalised, artificially compressible flow on the reference
///        rectangle, optionally solved together with the wall in one linear system per step.
#pragma once

#include <Eigen/SparseLU>
#include <functional>
#include <optional>
#include <utility>

#include "fsi/errors.hpp"
#include "fsi/grid.hpp"
#include "fsi/operators.hpp"
#include "fsi/structure.hpp"

namespace fsi {

/// Kinematic boundary pressures (pressure / rho).
struct BoundaryPressures {
    std::function<double(double y2, double t)> q_in = [](double, double) { return 0.0; };
    std::function<double(double y2, double t)> q_out = [](double, double) { return 0.0; };
    std::function<double(double y1, double t)> q_w = [](double, double) { return 0.0; };

    static BoundaryPressures zero() { return {}; }
};

/// Trapezoidal L2 norms of the three pressure traces at time t; all must be finite.
struct PressureTraceNorms {
    double in = 0.0, out = 0.0, wall = 0.0;
};

inline PressureTraceNorms pressure_trace_norms(const BoundaryPressures& bp, const Grid2D& g, double t) {
    PressureTraceNorms n;
    const Grid1D a1 = g.axis1(), a2 = g.axis2();
    for (int j = 0; j < g.n2(); ++j) {
        n.in += a2.weight(j) * std::pow(bp.q_in(g.y2(j), t), 2);
        n.out += a2.weight(j) * std::pow(bp.q_out(g.y2(j), t), 2);
    }
    for (int i = 0; i < g.n1(); ++i) n.wall += a1.weight(i) * std::pow(bp.q_w(g.y1(i), t), 2);
    n = {std::sqrt(n.in), std::sqrt(n.out), std::sqrt(n.wall)};
    FSI_REQUIRE(std::isfinite(n.in) && std::isfinite(n.out) && std::isfinite(n.wall), DomainError,
                "boundary pressures must be finite");
    return n;
}

enum class CouplingMode { joint, staggered };

struct SchemeParams {
    double kappa = 1e3;
    double eps = 1e-3;
    double dt = 1e-3;
    double solver_tol = 1e-10;
    int refinement_steps = 3;  ///< iterative-refinement sweeps allowed to meet solver_tol
    CouplingMode coupling = CouplingMode::joint;

    void validate() const {
        FSI_REQUIRE(kappa > 0.0, DomainError, "kappa must be positive");
        FSI_REQUIRE(eps > 0.0, DomainError, "eps must be positive");
        FSI_REQUIRE(dt > 0.0, DomainError, "dt must be positive");
        FSI_REQUIRE(solver_tol > 0.0, DomainError, "solver tolerance must be positive");
    }
};

/// Per-step energy bookkeeping. With constant E the identity
/// (fluid + wall energy)_new - (fluid + wall energy)_old = boundary_work - dissipation holds to rounding.
struct StepDiagnostics {
    double fluid_energy = 0.0;
    double wall_energy = 0.0;
    double boundary_work = 0.0;  ///< dt times the power of the boundary pressures and the R0'' load
    double dissipation = 0.0;    ///< nonnegative
    double div_h_norm = 0.0;     ///< L2(D) norm of the time-stepping (summation-by-parts) div_h
    double wall_mismatch = 0.0;  ///< || u2 on S_w - sigma ||_L2(0,L)
    double residual = 0.0;
};

/// 1/2 int_D h |u|^2.
inline double fluid_energy(const Grid2D& g, const FlowState& s, const WallSnapshot& snap) {
    detail::require_vector(g, s.u, "fluid_energy");
    detail::require_snapshot(g, snap, "fluid_energy");
    double e = 0.0;
    for (int i = 0; i < g.n1(); ++i)
        for (int j = 0; j < g.n2(); ++j) {
            const int k = g.idx(i, j);
            e += g.weight(i, j) * snap.h[i] * (s.u.c1[k] * s.u.c1[k] + s.u.c2[k] * s.u.c2[k]);
        }
    return 0.5 * e;
}

/// || u2(., 1) - sigma ||_L2(0,L).
inline double wall_mismatch(const Grid2D& g, const FlowState& s, const WallState& w) {
    const Grid1D a1 = g.axis1();
    double m = 0.0;
    for (int i = 0; i < g.n1(); ++i) {
        const double d = s.u.c2[g.idx(i, g.N2)] - w.sigma[i];
        m += a1.weight(i) * d * d;
    }
    return std::sqrt(m);
}

/// Assembles and solves one time step. Owns the factorization so that the symbolic analysis is reused.
class CoupledStepper {
public:
    CoupledStepper(const Grid2D& g, WallParams wp, double nu, SchemeParams sp, BoundaryPressures bp)
        : g_(g), wall_g_(g.axis1()), wp_(std::move(wp)), nu_(nu), sp_(sp), bp_(std::move(bp)), diff_(g, Closure::sbp), wops_(g.axis1()) {
        sp_.validate();
        wp_.validate(wall_g_);
        FSI_REQUIRE(nu > 0.0, DomainError, "mu/rho must be positive");
        n_ = g.nodes();
        nw_ = g.N1 - 1;
        fixed1_.assign(n_, false);
        fixed2_.assign(n_, false);
        for (int i = 0; i < g.n1(); ++i) {
            fixed1_[g.idx(i, g.N2)] = true;   // S_w
            fixed2_[g.idx(i, 0)] = true;      // S_c
        }
        for (int j = 0; j < g.n2(); ++j) fixed2_[g.idx(0, j)] = fixed2_[g.idx(g.N1, j)] = true;  // S_in, S_out
    }

    [[nodiscard]] const SchemeParams& scheme() const { return sp_; }
    [[nodiscard]] const StepDiagnostics& last() const { return diag_; }
    [[nodiscard]] const Grid2D& grid() const { return g_; }
    [[nodiscard]] const WallParams& wall_params() const { return wp_; }

    /// Advances (u, q) and the wall from t to t + dt on the deformation prev -> next.
    std::pair<FlowState, WallState> step(const FlowState& s, const WallState& w, const WallSnapshot& prev,
                                         const WallSnapshot& next) {
        check_inputs(s, w, prev, next);
        if (sp_.coupling == CouplingMode::joint) {
            auto out = solve(s, w, prev, next, true);
            finish(s, w, prev, next, out.first, out.second);
            return out;
        }
        FlowState f = solve(s, w, prev, next, false).first;
        const Field trace = top_trace(f);
        WallState nw = step_wall(w, trace, wp_, wall_g_, sp_.kappa, sp_.dt);
        finish(s, w, prev, next, f, nw);
        return {std::move(f), std::move(nw)};
    }

    /// Fluid-only step with the wall velocity sigma held at its input value.
    FlowState step_fluid(const FlowState& s, const WallState& w, const WallSnapshot& prev, const WallSnapshot& next) {
        check_inputs(s, w, prev, next);
        FlowState f = solve(s, w, prev, next, false).first;
        diag_.div_h_norm = scheme_div_;
        diag_.wall_mismatch = wall_mismatch(g_, f, w);
        diag_.fluid_energy = fluid_energy(g_, f, next);
        return f;
    }

    [[nodiscard]] Field top_trace(const FlowState& f) const {
        Field t(g_.n1());
        for (int i = 0; i < g_.n1(); ++i) t[i] = f.u.c2[g_.idx(i, g_.N2)];
        return t;
    }

private:
    Grid2D g_;
    Grid1D wall_g_;
    WallParams wp_;
    double nu_;
    SchemeParams sp_;
    BoundaryPressures bp_;
    DifferenceMatrices diff_;
    WallOperators wops_;
    int n_ = 0, nw_ = 0;
    std::vector<bool> fixed1_, fixed2_;
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu_;
    std::vector<int> pattern_outer_, pattern_inner_;
    StepDiagnostics diag_;
    double scheme_div_ = 0.0, scheme_visc_ = 0.0;

    // unknown offsets
    [[nodiscard]] int U1() const { return 0; }
    [[nodiscard]] int U2() const { return n_; }
    [[nodiscard]] int Q() const { return 2 * n_; }
    [[nodiscard]] int S() const { return 3 * n_; }

    void check_inputs(const FlowState& s, const WallState& w, const WallSnapshot& prev, const WallSnapshot& next) const {
        detail::require_vector(g_, s.u, "step");
        detail::require_size(g_, s.q, "step");
        detail::require_snapshot(g_, prev, "step");
        detail::require_snapshot(g_, next, "step");
        FSI_REQUIRE(static_cast<int>(w.eta.size()) == g_.n1() && static_cast<int>(w.sigma.size()) == g_.n1(),
                    DimensionError, "step: wall state does not match the grid");
    }

    static void add_block(Triplets& t, const SpMat& m, int r0, int c0, double scale,
                          const std::vector<bool>* skip_rows = nullptr) {
        for (int r = 0; r < m.outerSize(); ++r) {
            if (skip_rows && (*skip_rows)[r]) continue;
            for (SpMat::InnerIterator it(m, r); it; ++it) t.emplace_back(r0 + r, c0 + static_cast<int>(it.col()), scale * it.value());
        }
    }

    std::pair<FlowState, WallState> solve(const FlowState& s, const WallState& w, const WallSnapshot& prev,
                                          const WallSnapshot& next, bool with_wall) {
        const double dt = sp_.dt, t1 = s.t + dt;
        const NodeMetric m(g_, next);
        const HatOperators hat(diff_, m);
        const int n = n_;
        const int nwall = with_wall ? nw_ : 0;
        const int size = 3 * n + nwall;

        Eigen::VectorXd ht(n), hp(n), y2(n);
        for (int i = 0; i < g_.n1(); ++i)
            for (int j = 0; j < g_.n2(); ++j) {
                const int k = g_.idx(i, j);
                ht[k] = (next.h[i] - prev.h[i]) / dt;
                hp[k] = prev.h[i];
            }
        y2 = m.y2;
        const Eigen::VectorXd& W = m.w;
        const Eigen::VectorXd WH = W.cwiseProduct(m.h);

        // viscous blocks: Cauchy stress 2 mu e, i.e. twice viscous_form
        const double nu2 = 2.0 * nu_;
        const SpMat H1t = hat.H1.transpose(), H2t = hat.H2.transpose();
        const SpMat WH1 = WH.asDiagonal() * hat.H1, WH2 = WH.asDiagonal() * hat.H2;
        const SpMat A11 = nu2 * (H1t * WH1 + 0.5 * (H2t * WH2));
        const SpMat A22 = nu2 * (H2t * WH2 + 0.5 * (H1t * WH1));
        const SpMat A12 = (0.5 * nu2) * (H2t * WH1);
        const SpMat A21 = (0.5 * nu2) * (H1t * WH2);

        // mass, ALE and skew convection (same for both components)
        const Eigen::VectorXd mass = WH / dt - 0.5 * W.cwiseProduct(ht);
        const Eigen::VectorXd wty = W.cwiseProduct(ht).cwiseProduct(y2);
        const SpMat D2t = diff_.D2.transpose();
        const SpMat ale = -0.5 * (SpMat(wty.asDiagonal() * diff_.D2) - SpMat(D2t * wty.asDiagonal()));
        const Eigen::VectorXd hw1 = m.h.cwiseProduct(as_vec(s.u.c1));
        const SpMat C = SpMat(hw1.asDiagonal() * hat.H1) + SpMat(as_vec(s.u.c2).asDiagonal() * diff_.D2);
        const SpMat conv = 0.5 * (SpMat(W.asDiagonal() * C) - SpMat(C.transpose() * W.asDiagonal()));
        SpMat Mdiag(n, n);
        {
            Triplets md;
            for (int k = 0; k < n; ++k) md.emplace_back(k, k, mass[k]);
            Mdiag.setFromTriplets(md.begin(), md.end());
        }
        const SpMat common = Mdiag + ale + conv;

        // pressure gradient in the momentum rows and divergence in the continuity rows
        const SpMat G1 = -(H1t * WH.asDiagonal()), G2 = -(H2t * WH.asDiagonal());
        const SpMat A1 = pressure_stiffness(g_, next);

        Triplets t;
        t.reserve(static_cast<std::size_t>(A11.nonZeros() + A22.nonZeros() + A12.nonZeros() + A21.nonZeros()) * 2 +
                  static_cast<std::size_t>(common.nonZeros()) * 2 + static_cast<std::size_t>(A1.nonZeros()) + 8 * n);
        add_block(t, A11, U1(), U1(), 1.0, &fixed1_);
        add_block(t, common, U1(), U1(), 1.0, &fixed1_);
        add_block(t, A12, U1(), U2(), 1.0, &fixed1_);
        add_block(t, G1, U1(), Q(), 1.0, &fixed1_);
        add_block(t, A21, U2(), U1(), 1.0, &fixed2_);
        add_block(t, A22, U2(), U2(), 1.0, &fixed2_);
        add_block(t, common, U2(), U2(), 1.0, &fixed2_);
        add_block(t, G2, U2(), Q(), 1.0, &fixed2_);
        for (int k = 0; k < n; ++k) {
            if (fixed1_[k]) t.emplace_back(U1() + k, U1() + k, 1.0);
            if (fixed2_[k]) t.emplace_back(U2() + k, U2() + k, 1.0);
        }
        add_block(t, WH1, Q(), U1(), 1.0);
        add_block(t, WH2, Q(), U2(), 1.0);
        add_block(t, A1, Q(), Q(), sp_.eps);

        Eigen::VectorXd rhs = Eigen::VectorXd::Zero(size);
        for (int k = 0; k < n; ++k) {
            const double c = W[k] * hp[k] / dt;
            if (!fixed1_[k]) rhs[U1() + k] = c * s.u.c1[k];
            if (!fixed2_[k]) rhs[U2() + k] = c * s.u.c2[k];
        }
        const Grid1D a1 = g_.axis1(), a2 = g_.axis2();
        for (int j = 0; j < g_.n2(); ++j) {
            const int kin = g_.idx(0, j), kout = g_.idx(g_.N1, j);
            if (!fixed1_[kin]) rhs[U1() + kin] += a2.weight(j) * next.h[0] * bp_.q_in(g_.y2(j), t1);
            if (!fixed1_[kout]) rhs[U1() + kout] -= a2.weight(j) * next.h[g_.N1] * bp_.q_out(g_.y2(j), t1);
        }
        // wall: q_w load and penalty kappa (u2 - sigma)
        for (int i = 1; i < g_.N1; ++i) {
            const int k = g_.idx(i, g_.N2);
            const double wi = a1.weight(i);
            rhs[U2() + k] -= wi * bp_.q_w(g_.y1(i), t1);
            t.emplace_back(U2() + k, U2() + k, sp_.kappa * wi);
            if (with_wall) t.emplace_back(U2() + k, S() + i - 1, -sp_.kappa * wi);
            else rhs[U2() + k] += sp_.kappa * wi * w.sigma[i];
        }
        if (with_wall) {
            // rows weighted by w_i E_i so that the coupling is symmetric
            const Eigen::VectorXd eta = detail::interior(w.eta), sig = detail::interior(w.sigma);
            const Eigen::VectorXd k2eta = wops_.K2 * eta;
            for (int r = 0; r < nw_; ++r) {
                const int i = r + 1;
                const double we = a1.weight(i) * wp_.Estiff[i];
                t.emplace_back(S() + r, S() + r, we * (1.0 / dt + wp_.b * dt) + sp_.kappa * a1.weight(i));
                t.emplace_back(S() + r, U2() + g_.idx(i, g_.N2), -sp_.kappa * a1.weight(i));
                for (SpMat::InnerIterator it(wops_.B4, r); it; ++it)
                    t.emplace_back(S() + r, S() + static_cast<int>(it.col()), we * wp_.c * it.value());
                for (SpMat::InnerIterator it(wops_.K2, r); it; ++it)
                    t.emplace_back(S() + r, S() + static_cast<int>(it.col()), we * wp_.a * dt * it.value());
                rhs[S() + r] = we * (sig[r] / dt - wp_.a * k2eta[r] - wp_.b * eta[r] + wp_.a * wp_.R0_y1y1[i]);
            }
        }

        Eigen::SparseMatrix<double> A(size, size);
        A.setFromTriplets(t.begin(), t.end());
        A.makeCompressed();
        const Eigen::VectorXd x = factor_and_solve(A, rhs);

        FlowState f;
        f.u.c1.assign(x.data() + U1(), x.data() + U1() + n);
        f.u.c2.assign(x.data() + U2(), x.data() + U2() + n);
        // split the pressure into its h-weighted mean and a zero-mean part
        const Eigen::VectorXd p = x.segment(Q(), n);
        f.q_level = WH.dot(p) / WH.sum();
        f.q = to_field(p.array() - f.q_level);
        f.t = t1;
        {
            // scheme quantities for the diagnostics
            const Eigen::VectorXd u1 = as_vec(f.u.c1), u2 = as_vec(f.u.c2);
            const Eigen::VectorXd div = hat.H1 * u1 + hat.H2 * u2;
            scheme_div_ = std::sqrt(div.dot(W.cwiseProduct(div)));
            scheme_visc_ = u1.dot(A11 * u1 + A12 * u2) + u2.dot(A21 * u1 + A22 * u2);
        }
        WallState nw;
        if (with_wall) {
            const Eigen::VectorXd sig = x.segment(S(), nw_);
            nw.sigma = detail::with_clamped_ends(sig);
            nw.eta = detail::with_clamped_ends(detail::interior(w.eta) + dt * sig);
            nw.t = t1;
        }
        return {std::move(f), std::move(nw)};
    }

    Eigen::VectorXd factor_and_solve(const Eigen::SparseMatrix<double>& A, const Eigen::VectorXd& b) {
        const std::vector<int> outer(A.outerIndexPtr(), A.outerIndexPtr() + A.outerSize() + 1);
        const std::vector<int> inner(A.innerIndexPtr(), A.innerIndexPtr() + A.nonZeros());
        if (outer != pattern_outer_ || inner != pattern_inner_) {
            lu_.analyzePattern(A);
            pattern_outer_ = outer;
            pattern_inner_ = inner;
        }
        lu_.factorize(A);
        if (lu_.info() != Eigen::Success) throw SolverError("fluid step: sparse factorization failed", 1.0);
        Eigen::VectorXd x = lu_.solve(b);
        const double nb = b.norm();
        auto rel = [&](const Eigen::VectorXd& r) { return nb > 0.0 ? r.norm() / nb : r.norm(); };
        Eigen::VectorXd r = b - A * x;
        double res = rel(r);
        for (int k = 0; k < sp_.refinement_steps && res > sp_.solver_tol; ++k) {
            x += lu_.solve(r);
            r = b - A * x;
            res = rel(r);
        }
        diag_.residual = res;
        if (!(res <= sp_.solver_tol)) throw SolverError("fluid step: linear residual above tolerance", res);
        return x;
    }

    void finish(const FlowState& s, const WallState& w, const WallSnapshot& prev, const WallSnapshot& next,
                const FlowState& f, const WallState& nw) {
        const double dt = sp_.dt, t1 = s.t + dt;
        const Grid1D a1 = g_.axis1(), a2 = g_.axis2();
        StepDiagnostics d;
        d.residual = diag_.residual;
        d.fluid_energy = fluid_energy(g_, f, next);
        d.wall_energy = wall_energy(nw, wp_, wall_g_);
        d.div_h_norm = scheme_div_;
        d.wall_mismatch = wall_mismatch(g_, f, nw);

        double work = 0.0;
        for (int j = 0; j < g_.n2(); ++j) {
            work += a2.weight(j) * next.h[0] * bp_.q_in(g_.y2(j), t1) * f.u.c1[g_.idx(0, j)];
            work -= a2.weight(j) * next.h[g_.N1] * bp_.q_out(g_.y2(j), t1) * f.u.c1[g_.idx(g_.N1, j)];
        }
        for (int i = 0; i < g_.n1(); ++i) {
            work -= a1.weight(i) * bp_.q_w(g_.y1(i), t1) * f.u.c2[g_.idx(i, g_.N2)];
            work += a1.weight(i) * wp_.Estiff[i] * wp_.a * wp_.R0_y1y1[i] * nw.sigma[i];
        }
        d.boundary_work = dt * work;

        // dissipation: viscous, compressibility, penalty, wall viscosity and the backward-Euler terms
        double diss = scheme_visc_ + pressure_form(g_, f.q, f.q, next, sp_.eps);
        double pen = 0.0, cwall = 0.0;
        for (int i = 0; i < g_.n1(); ++i) {
            const double m = f.u.c2[g_.idx(i, g_.N2)] - nw.sigma[i];
            pen += a1.weight(i) * m * m;
        }
        const Eigen::VectorXd sig = detail::interior(nw.sigma);
        const Eigen::VectorXd b4s = wops_.B4 * sig;
        for (int r = 0; r < nw_; ++r) cwall += a1.weight(r + 1) * wp_.Estiff[r + 1] * sig[r] * b4s[r];
        diss = dt * (diss + sp_.kappa * pen + wp_.c * cwall);
        double num = 0.0;
        for (int i = 0; i < g_.n1(); ++i)
            for (int j = 0; j < g_.n2(); ++j) {
                const int k = g_.idx(i, j);
                const double e1 = f.u.c1[k] - s.u.c1[k], e2 = f.u.c2[k] - s.u.c2[k];
                num += g_.weight(i, j) * prev.h[i] * (e1 * e1 + e2 * e2);
            }
        double wnum = 0.0;
        for (int i = 0; i < g_.n1(); ++i) {
            const double ds = nw.sigma[i] - w.sigma[i], de = nw.eta[i] - w.eta[i];
            wnum += a1.weight(i) * wp_.Estiff[i] * (ds * ds + wp_.b * de * de);
        }
        double el = 0.0;
        for (int i = 0; i < g_.N1; ++i) {
            const double de = (nw.eta[i + 1] - w.eta[i + 1]) - (nw.eta[i] - w.eta[i]);
            el += 0.5 * (wp_.Estiff[i] + wp_.Estiff[i + 1]) * de * de / a1.dx();
        }
        d.dissipation = diss + 0.5 * num + 0.5 * wnum + 0.5 * wp_.a * el;
        diag_ = d;
        (void)prev;
    }
};

/// Fluid-only backward-Euler step with the wall velocity held fixed.
inline FlowState step_fluid(const FlowState& state, const WallState& wall, const WallSnapshot& h_prev,
                            const WallSnapshot& h_next, const BoundaryPressures& bp, const SchemeParams& sp,
                            const WallParams& wp, double nu, const Grid2D& g) {
    CoupledStepper st(g, wp, nu, sp, bp);
    return st.step_fluid(state, wall, h_prev, h_next);
}

}  // namespace fsi
