/// @file operators.hpp
/// @brief Transformed differential operators and the bilinear/trilinear forms on the reference rectangle.
#pragma once

#include <Eigen/Sparse>
#include <cmath>
#include <vector>

#include "fsi/errors.hpp"
#include "fsi/geometry.hpp"
#include "fsi/grid.hpp"
#include "fsi/mat2.hpp"

namespace fsi {

using SpMat = Eigen::SparseMatrix<double, Eigen::RowMajor>;
using Triplets = std::vector<Eigen::Triplet<double>>;

/// Wall h and h_y1 on the y1 nodes at one time level.
struct WallSnapshot {
    Field h, h_y1;

    static WallSnapshot flat(const Grid2D& g, double value) {
        return {Field(g.n1(), value), Field(g.n1(), 0.0)};
    }
    static WallSnapshot from(const DeformationHistory& d, int level) {
        const auto h = d.h.row(level), hy = d.h_y1.row(level);
        return {Field(h.begin(), h.end()), Field(hy.begin(), hy.end())};
    }
};

struct VectorField {
    Field c1, c2;

    static VectorField zero(const Grid2D& g) { return {Field(g.nodes(), 0.0), Field(g.nodes(), 0.0)}; }
};

/// Transformed velocity and kinematic pressure at one time level. The pressure is q + q_level with
/// q normalised to zero mean over the physical channel.
struct FlowState {
    VectorField u;
    Field q;
    double q_level = 0.0;
    double t = 0.0;

    static FlowState zero(const Grid2D& g, double t0 = 0.0) {
        return {VectorField::zero(g), Field(g.nodes(), 0.0), 0.0, t0};
    }
};

struct SymTensorField {
    Field e11, e12, e22;
};

/// Nodal velocity gradient, grad(i, j) = d_j u_i.
struct GradientField {
    Field g11, g12, g21, g22;

    [[nodiscard]] Mat2 at(int k) const { return Mat2::of(g11[k], g12[k], g21[k], g22[k]); }
};

namespace detail {

inline void require_size(const Grid2D& g, std::span<const double> f, const char* who) {
    if (static_cast<int>(f.size()) != g.nodes()) throw DimensionError(std::string(who) + ": field size does not match grid");
}
inline void require_snapshot(const Grid2D& g, const WallSnapshot& s, const char* who) {
    if (static_cast<int>(s.h.size()) != g.n1() || static_cast<int>(s.h_y1.size()) != g.n1())
        throw DimensionError(std::string(who) + ": wall snapshot does not match grid");
    for (double v : s.h)
        if (!(v > 0.0)) throw DomainError(std::string(who) + ": h must be positive");
}
inline void require_vector(const Grid2D& g, const VectorField& u, const char* who) {
    require_size(g, u.c1, who);
    require_size(g, u.c2, who);
}

}  // namespace detail

/// Per-node metric data of a wall snapshot.
struct NodeMetric {
    Eigen::VectorXd h, inv_h, s, y2, w;  // s = y2 h_y1 / h

    NodeMetric(const Grid2D& g, const WallSnapshot& snap) {
        detail::require_snapshot(g, snap, "NodeMetric");
        const int n = g.nodes();
        h.resize(n), inv_h.resize(n), s.resize(n), y2.resize(n), w.resize(n);
        for (int i = 0; i < g.n1(); ++i)
            for (int j = 0; j < g.n2(); ++j) {
                const int k = g.idx(i, j);
                h[k] = snap.h[i];
                inv_h[k] = 1.0 / snap.h[i];
                y2[k] = g.y2(j);
                s[k] = g.y2(j) * snap.h_y1[i] / snap.h[i];
                w[k] = g.weight(i, j);
            }
    }
};

enum class Closure { second_order, sbp };

/// Nodal first-difference matrices, centered inside. The closure is either one-sided second order
/// (pointwise diagnostics) or the summation-by-parts pair of the trapezoid weights (time stepping).
struct DifferenceMatrices {
    SpMat D1, D2;

    explicit DifferenceMatrices(const Grid2D& g, Closure c = Closure::second_order) {
        const auto stencil = c == Closure::sbp ? &sbp_derivative_stencil : &first_derivative_stencil;
        Triplets t1, t2;
        for (int i = 0; i < g.n1(); ++i)
            for (int j = 0; j < g.n2(); ++j) {
                const int row = g.idx(i, j);
                const Stencil1D a = stencil(i, g.N1, g.d1());
                for (int k = 0; k < a.size; ++k) t1.emplace_back(row, g.idx(a.index[k], j), a.coeff[k]);
                const Stencil1D b = stencil(j, g.N2, g.d2());
                for (int k = 0; k < b.size; ++k) t2.emplace_back(row, g.idx(i, b.index[k]), b.coeff[k]);
            }
        D1.resize(g.nodes(), g.nodes());
        D2.resize(g.nodes(), g.nodes());
        D1.setFromTriplets(t1.begin(), t1.end());
        D2.setFromTriplets(t2.begin(), t2.end());
    }
};

/// Hatted derivatives d^_1 = d_1 - s d_2 and d^_2 = (1/h) d_2 as sparse matrices.
struct HatOperators {
    SpMat H1, H2;

    HatOperators(const DifferenceMatrices& d, const NodeMetric& m) {
        H1 = d.D1 - SpMat(m.s.asDiagonal() * d.D2);
        H2 = m.inv_h.asDiagonal() * d.D2;
    }
};

inline Eigen::Map<const Eigen::VectorXd> as_vec(std::span<const double> f) {
    return {f.data(), static_cast<Eigen::Index>(f.size())};
}
inline Field to_field(const Eigen::VectorXd& v) { return Field(v.data(), v.data() + v.size()); }

/// d_y1 u1 - (y2/h) h_y1 d_y2 u1 + (1/h) d_y2 u2 at every node.
inline Field div_h_field(const Grid2D& g, const VectorField& u, const WallSnapshot& snap) {
    detail::require_vector(g, u, "div_h_field");
    const DifferenceMatrices d(g);
    const HatOperators hat(d, NodeMetric(g, snap));
    return to_field(hat.H1 * as_vec(u.c1) + hat.H2 * as_vec(u.c2));
}

inline GradientField gradient_field(const Grid2D& g, const VectorField& u) {
    detail::require_vector(g, u, "gradient_field");
    return {d_dy1(g, u.c1), d_dy2(g, u.c1), d_dy1(g, u.c2), d_dy2(g, u.c2)};
}

/// e_h(u)_ij = (d^_i u_j + d^_j u_i) / 2.
inline SymTensorField def_tensor_field(const Grid2D& g, const VectorField& u, const WallSnapshot& snap) {
    detail::require_vector(g, u, "def_tensor_field");
    const DifferenceMatrices d(g);
    const HatOperators hat(d, NodeMetric(g, snap));
    const Eigen::VectorXd a = hat.H1 * as_vec(u.c1), b = hat.H2 * as_vec(u.c2);
    const Eigen::VectorXd c = 0.5 * (hat.H2 * as_vec(u.c1) + hat.H1 * as_vec(u.c2));
    return {to_field(a), to_field(c), to_field(b)};
}

/// (mu/rho) int_D h e_h(u):e_h(psi) by the nodal trapezoidal rule.
inline double viscous_form(const Grid2D& g, const VectorField& u, const VectorField& psi, const WallSnapshot& snap,
                           double mu_over_rho) {
    detail::require_vector(g, u, "viscous_form");
    detail::require_vector(g, psi, "viscous_form");
    const SymTensorField eu = def_tensor_field(g, u, snap), ep = def_tensor_field(g, psi, snap);
    double s = 0.0;
    for (int i = 0; i < g.n1(); ++i)
        for (int j = 0; j < g.n2(); ++j) {
            const int k = g.idx(i, j);
            s += g.weight(i, j) * snap.h[i] *
                 (eu.e11[k] * ep.e11[k] + 2.0 * eu.e12[k] * ep.e12[k] + eu.e22[k] * ep.e22[k]);
        }
    return mu_over_rho * s;
}

/// Nodal values of B_h(u, z, psi) = (h u1 d^_1 z + u2 d_2 z) . psi.
inline Field trilinear_density(const Grid2D& g, const VectorField& u, const VectorField& z, const VectorField& psi,
                               const WallSnapshot& snap) {
    const DifferenceMatrices d(g);
    const NodeMetric m(g, snap);
    const HatOperators hat(d, m);
    Field out(g.nodes());
    const Eigen::VectorXd a1 = hat.H1 * as_vec(z.c1), a2 = hat.H1 * as_vec(z.c2);
    const Eigen::VectorXd b1 = d.D2 * as_vec(z.c1), b2 = d.D2 * as_vec(z.c2);
    for (int k = 0; k < g.nodes(); ++k)
        out[k] = (m.h[k] * u.c1[k] * a1[k] + u.c2[k] * b1[k]) * psi.c1[k] +
                 (m.h[k] * u.c1[k] * a2[k] + u.c2[k] * b2[k]) * psi.c2[k];
    return out;
}

/// b_h(u, z, psi): volume term plus the boundary corrections on S_in, S_out and S_w, with the
/// reference radius R0 at the two ends multiplying the in/outflow corrections.
inline double convective_form(const Grid2D& g, const VectorField& u, const VectorField& z, const VectorField& psi,
                              const WallSnapshot& snap, double r0_in, double r0_out) {
    detail::require_vector(g, u, "convective_form");
    detail::require_vector(g, z, "convective_form");
    detail::require_vector(g, psi, "convective_form");
    detail::require_snapshot(g, snap, "convective_form");
    double s = integrate(g, trilinear_density(g, u, z, psi, snap));
    const Grid1D a1 = g.axis1(), a2 = g.axis2();
    for (int j = 0; j < g.n2(); ++j) {
        const int kin = g.idx(0, j), kout = g.idx(g.N1, j);
        s -= 0.5 * a2.weight(j) * r0_out * u.c1[kout] * z.c1[kout] * psi.c1[kout];
        s += 0.5 * a2.weight(j) * r0_in * u.c1[kin] * z.c1[kin] * psi.c1[kin];
    }
    for (int i = 0; i < g.n1(); ++i) {
        const int k = g.idx(i, g.N2);
        s -= 0.5 * a1.weight(i) * u.c2[k] * z.c2[k] * psi.c2[k];
    }
    return s;
}

/// (1/2) int_D [B_h(u, z, psi) - B_h(u, psi, z)].
inline double skew_convective_form(const Grid2D& g, const VectorField& u, const VectorField& z,
                                   const VectorField& psi, const WallSnapshot& snap) {
    detail::require_vector(g, u, "skew_convective_form");
    detail::require_vector(g, z, "skew_convective_form");
    detail::require_vector(g, psi, "skew_convective_form");
    const Field a = trilinear_density(g, u, z, psi, snap), b = trilinear_density(g, u, psi, z, snap);
    double s = 0.0;
    for (int i = 0; i < g.n1(); ++i)
        for (int j = 0; j < g.n2(); ++j) s += g.weight(i, j) * (a[g.idx(i, j)] - b[g.idx(i, j)]);
    return 0.5 * s;
}

/// Stiffness matrix of a1(q, phi) = int_D h grad^q . grad^phi on bilinear cells with 2x2 Gauss points,
/// grad^ = (d^_1, d^_2). The kernel is exactly the constants.
inline SpMat pressure_stiffness(const Grid2D& g, const WallSnapshot& snap) {
    detail::require_snapshot(g, snap, "pressure_stiffness");
    const double dx = g.d1(), dy = g.d2();
    const double gp[2] = {0.5 - 0.5 / std::sqrt(3.0), 0.5 + 0.5 / std::sqrt(3.0)};
    Triplets trip;
    trip.reserve(static_cast<std::size_t>(g.N1) * g.N2 * 16);
    for (int i = 0; i < g.N1; ++i)
        for (int j = 0; j < g.N2; ++j) {
            const int nodes[4] = {g.idx(i, j), g.idx(i + 1, j), g.idx(i, j + 1), g.idx(i + 1, j + 1)};
            double ke[4][4] = {};
            for (double xi : gp)
                for (double et : gp) {
                    const double h = (1 - xi) * snap.h[i] + xi * snap.h[i + 1];
                    const double hy = (1 - xi) * snap.h_y1[i] + xi * snap.h_y1[i + 1];
                    const double y2 = g.y2(j) + et * dy;
                    const double s = y2 * hy / h;
                    // reference gradients of the four bilinear shape functions
                    const double gx[4] = {-(1 - et) / dx, (1 - et) / dx, -et / dx, et / dx};
                    const double gy[4] = {-(1 - xi) / dy, -xi / dy, (1 - xi) / dy, xi / dy};
                    const double wq = 0.25 * dx * dy;
                    for (int a = 0; a < 4; ++a) {
                        const double pa1 = gx[a] - s * gy[a], pa2 = gy[a] / h;
                        for (int b = 0; b < 4; ++b) {
                            const double pb1 = gx[b] - s * gy[b], pb2 = gy[b] / h;
                            ke[a][b] += wq * h * (pa1 * pb1 + pa2 * pb2);
                        }
                    }
                }
            for (int a = 0; a < 4; ++a)
                for (int b = 0; b < 4; ++b) trip.emplace_back(nodes[a], nodes[b], ke[a][b]);
        }
    SpMat A(g.nodes(), g.nodes());
    A.setFromTriplets(trip.begin(), trip.end());
    return A;
}

/// eps a1(q, phi).
inline double pressure_form(const Grid2D& g, std::span<const double> q, std::span<const double> phi,
                            const WallSnapshot& snap, double eps) {
    detail::require_size(g, q, "pressure_form");
    detail::require_size(g, phi, "pressure_form");
    const SpMat A = pressure_stiffness(g, snap);
    return eps * as_vec(phi).dot(A * as_vec(q));
}

}  // namespace fsi
