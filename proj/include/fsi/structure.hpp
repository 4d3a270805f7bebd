/// @file structure.hpp
/// @brief Clamped viscoelastic string: sigma_t + c d4 sigma - a eta'' + b eta - a R0'' + (kappa/E)(sigma - u2) = 0.
#pragma once

#include <Eigen/SparseLU>
#include <cmath>

#include "fsi/errors.hpp"
#include "fsi/geometry.hpp"
#include "fsi/grid.hpp"
#include "fsi/operators.hpp"

namespace fsi {

struct WallState {
    Field eta, sigma;
    double t = 0.0;

    static WallState zero(const Grid1D& g, double t0 = 0.0) { return {Field(g.nodes(), 0.0), Field(g.nodes(), 0.0), t0}; }
};

struct WallParams {
    double a = 1.0, b = 1.0, c = 0.01;
    Field Estiff;    ///< E per node
    Field R0_y1y1;   ///< R0'' per node

    /// E = rho rho_w hbar sqrt(1 + R0'^2).
    static WallParams make(const Grid1D& g, double a, double b, double c, double rho, double rho_w, double hbar,
                           const R0Profile& r0) {
        WallParams p{a, b, c, Field(g.nodes()), sample(g, r0.d2)};
        for (int i = 0; i < g.nodes(); ++i) {
            const double s = r0.d1(g.x(i));
            p.Estiff[i] = rho * rho_w * hbar * std::sqrt(1.0 + s * s);
        }
        p.validate(g);
        return p;
    }
    void validate(const Grid1D& g) const {
        FSI_REQUIRE(a > 0.0 && b > 0.0 && c > 0.0, DomainError, "WallParams: a, b, c must be positive");
        FSI_REQUIRE(static_cast<int>(Estiff.size()) == g.nodes() && static_cast<int>(R0_y1y1.size()) == g.nodes(),
                    DimensionError, "WallParams: per-node arrays do not match the grid");
        for (double e : Estiff) FSI_REQUIRE(e > 0.0, DomainError, "WallParams: E must be positive");
    }
};

/// Matrices on the interior nodes 1..N-1 (index k = i - 1); the end values are zero.
struct WallOperators {
    SpMat B4;  ///< clamped biharmonic, ghost eta_{-1} = eta_1
    SpMat K2;  ///< Dirichlet -d2

    explicit WallOperators(const Grid1D& g) {
        const int n = g.N - 1;
        const double d2 = 1.0 / (g.dx() * g.dx()), d4 = d2 * d2;
        Triplets t4, t2;
        for (int k = 0; k < n; ++k) {
            const double diag = (k == 0 || k == n - 1) ? 7.0 : 6.0;
            t4.emplace_back(k, k, diag * d4);
            if (n == 1) t4.back() = Eigen::Triplet<double>(k, k, 8.0 * d4);
            for (int o : {-1, 1})
                if (k + o >= 0 && k + o < n) t4.emplace_back(k, k + o, -4.0 * d4);
            for (int o : {-2, 2})
                if (k + o >= 0 && k + o < n) t4.emplace_back(k, k + o, 1.0 * d4);
            t2.emplace_back(k, k, 2.0 * d2);
            for (int o : {-1, 1})
                if (k + o >= 0 && k + o < n) t2.emplace_back(k, k + o, -1.0 * d2);
        }
        B4.resize(n, n);
        K2.resize(n, n);
        B4.setFromTriplets(t4.begin(), t4.end());
        K2.setFromTriplets(t2.begin(), t2.end());
    }
};

namespace detail {

inline Eigen::VectorXd interior(std::span<const double> f) {
    Eigen::VectorXd v(static_cast<Eigen::Index>(f.size()) - 2);
    for (Eigen::Index k = 0; k < v.size(); ++k) v[k] = f[k + 1];
    return v;
}

inline Field with_clamped_ends(const Eigen::VectorXd& v) {
    Field f(v.size() + 2, 0.0);
    for (Eigen::Index k = 0; k < v.size(); ++k) f[k + 1] = v[k];
    return f;
}

inline Eigen::VectorXd solve_checked(const SpMat& A, const Eigen::VectorXd& rhs, double tol, const char* who) {
    Eigen::SparseMatrix<double> Ac(A);
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
    lu.compute(Ac);
    if (lu.info() != Eigen::Success) throw SolverError(std::string(who) + ": factorization failed", 1.0);
    Eigen::VectorXd x = lu.solve(rhs);
    const double nb = rhs.norm();
    const double res = nb > 0.0 ? (A * x - rhs).norm() / nb : (A * x - rhs).norm();
    if (!(res <= tol)) throw SolverError(std::string(who) + ": residual above tolerance", res);
    return x;
}

}  // namespace detail

/// Backward-Euler step of the wall driven by the fluid trace u2 on S_w (all nodes of the y1 grid).
/// sigma is implicit in every term; eta_new = eta + dt sigma_new.
inline WallState step_wall(const WallState& wall, std::span<const double> fluid_trace, const WallParams& p,
                           const Grid1D& g, double kappa, double dt) {
    p.validate(g);
    FSI_REQUIRE(static_cast<int>(wall.eta.size()) == g.nodes() && static_cast<int>(wall.sigma.size()) == g.nodes() &&
                    static_cast<int>(fluid_trace.size()) == g.nodes(),
                DimensionError, "step_wall: sizes do not match the grid");
    FSI_REQUIRE(dt > 0.0 && kappa >= 0.0, DomainError, "step_wall: dt must be positive and kappa nonnegative");
    const WallOperators op(g);
    const int n = g.N - 1;
    const Eigen::VectorXd eta = detail::interior(wall.eta), sig = detail::interior(wall.sigma);
    const Eigen::VectorXd u2 = detail::interior(fluid_trace);
    Eigen::VectorXd invE(n), r0pp(n);
    for (int k = 0; k < n; ++k) invE[k] = 1.0 / p.Estiff[k + 1], r0pp[k] = p.R0_y1y1[k + 1];

    SpMat I(n, n);
    I.setIdentity();
    SpMat A = (1.0 / dt + p.b * dt) * I + p.c * op.B4 + (p.a * dt) * op.K2;
    A += SpMat((kappa * invE).asDiagonal() * I);
    const Eigen::VectorXd rhs = sig / dt - p.a * (op.K2 * eta) - p.b * eta + p.a * r0pp + kappa * invE.cwiseProduct(u2);
    const Eigen::VectorXd s = detail::solve_checked(A, rhs, 1e-12, "step_wall");
    WallState out;
    out.sigma = detail::with_clamped_ends(s);
    out.eta = detail::with_clamped_ends(eta + dt * s);
    out.t = wall.t + dt;
    return out;
}

/// Steady wall: E(-a eta'' + b eta - a R0'') = f on the interior, clamped ends.
inline Field solve_steady_wall(const WallParams& p, const Grid1D& g, std::span<const double> f) {
    p.validate(g);
    FSI_REQUIRE(static_cast<int>(f.size()) == g.nodes(), DimensionError, "solve_steady_wall: forcing size");
    const WallOperators op(g);
    const int n = g.N - 1;
    SpMat I(n, n);
    I.setIdentity();
    const SpMat A = p.a * op.K2 + p.b * I;
    Eigen::VectorXd rhs(n);
    for (int k = 0; k < n; ++k) rhs[k] = f[k + 1] / p.Estiff[k + 1] + p.a * p.R0_y1y1[k + 1];
    return detail::with_clamped_ends(detail::solve_checked(A, rhs, 1e-12, "solve_steady_wall"));
}

/// 1/2 sum w E sigma^2 + (a/2) sum_edges Ebar (d eta)^2 / dx + (b/2) sum w E eta^2.
inline double wall_energy(const WallState& wall, const WallParams& p, const Grid1D& g) {
    FSI_REQUIRE(static_cast<int>(wall.eta.size()) == g.nodes() && static_cast<int>(wall.sigma.size()) == g.nodes(),
                DimensionError, "wall_energy: sizes do not match the grid");
    double kin = 0.0, pot = 0.0, el = 0.0;
    for (int i = 0; i < g.nodes(); ++i) {
        kin += g.weight(i) * p.Estiff[i] * wall.sigma[i] * wall.sigma[i];
        pot += g.weight(i) * p.Estiff[i] * wall.eta[i] * wall.eta[i];
    }
    for (int i = 0; i < g.N; ++i) {
        const double d = wall.eta[i + 1] - wall.eta[i];
        el += 0.5 * (p.Estiff[i] + p.Estiff[i + 1]) * d * d / g.dx();
    }
    return 0.5 * kin + 0.5 * p.a * el + 0.5 * p.b * pot;
}

}  // namespace fsi
