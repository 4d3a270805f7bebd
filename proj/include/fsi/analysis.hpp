/// @file analysis.hpp
/// @brief Numerical checks of the analytical objects: transformation identities, the Korn constant,
///        the continuous-dependence functionals and the integral equicontinuity profile.
#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "fsi/coupling.hpp"
#include "fsi/errors.hpp"
#include "fsi/geometry.hpp"
#include "fsi/operators.hpp"
#include "fsi/smooth_fields.hpp"

namespace fsi {

// ---------------------------------------------------------------------------------------------
// identity suite

enum class IdentityKind { piola, viscous_transform, grad_R, trilinear_skew, essup, div_free, def_tensor };

inline std::string to_string(IdentityKind k) {
    switch (k) {
        case IdentityKind::piola: return "piola";
        case IdentityKind::viscous_transform: return "viscous_transform";
        case IdentityKind::grad_R: return "grad_R";
        case IdentityKind::trilinear_skew: return "trilinear_skew";
        case IdentityKind::essup: return "essup";
        case IdentityKind::div_free: return "div_free";
        case IdentityKind::def_tensor: return "def_tensor";
    }
    return "?";
}

inline IdentityKind identity_kind(const std::string& name) {
    for (IdentityKind k : {IdentityKind::piola, IdentityKind::viscous_transform, IdentityKind::grad_R,
                           IdentityKind::trilinear_skew, IdentityKind::essup, IdentityKind::div_free,
                           IdentityKind::def_tensor})
        if (to_string(k) == name) return k;
    throw DomainError("unknown identity kind '" + name +
                      "' (expected piola, viscous_transform, grad_R, trilinear_skew, essup, div_free or def_tensor)");
}

/// Pointwise kinds fill max/mean residual over random samples. Refinement kinds (trilinear_skew, div_free,
/// def_tensor) fill one residual per grid level and the fitted order. essup fills the observed ratios.
struct IdentityReport {
    IdentityKind kind = IdentityKind::piola;
    int samples = 0;
    double max_residual = 0.0;
    double mean_residual = 0.0;
    std::vector<double> residuals;  ///< per sample, or per level for refinement kinds
    std::vector<double> spacings;   ///< refinement kinds: grid spacing per level
    double order = std::numeric_limits<double>::quiet_NaN();
    double max_ratio = std::numeric_limits<double>::quiet_NaN();  ///< essup only

    [[nodiscard]] bool refinement() const { return !spacings.empty(); }
};

namespace detail {

struct PointSample {
    SmoothWall w1, w2;
    SmoothVelocity v;
    double y1, y2, t;
};

inline PointSample random_point_sample(std::mt19937& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    PointSample s{SmoothWall::random(rng, 1.0, 0.3), SmoothWall::random(rng, 1.2, 0.3), SmoothVelocity::random(rng),
                  0.0, 0.0, 0.0};
    s.y1 = u(rng), s.y2 = u(rng), s.t = u(rng);
    return s;
}

/// R v and its reference gradient at the sample point by forward differentiation.
struct TransformedSample {
    PointTransformSet<double> tr;
    PointData<double> h1, h2;
    PointVelocity<double> v, rv;
};

inline TransformedSample transform_sample(const PointSample& s) {
    const Dual3 y1 = Dual3::variable(s.y1, 0), y2 = Dual3::variable(s.y2, 1), t = Dual3::variable(s.t, 2);
    const auto trd = point_transforms(s.w1.at(y1, t), s.w2.at(y1, t), y2);
    const Vec2T<Dual3> rv = trd.R * s.v.at(y1, y2, t);
    TransformedSample r;
    r.h1 = s.w1.at(s.y1, s.t);
    r.h2 = s.w2.at(s.y1, s.t);
    r.tr = point_transforms(r.h1, r.h2, s.y2);
    r.v = velocity_with_gradient(s.v, s.y1, s.y2, s.t);
    r.rv.u = {rv.x.v, rv.y.v};
    r.rv.grad = Mat2::of(rv.x.d[0], rv.x.d[1], rv.y.d[0], rv.y.d[1]);
    return r;
}

// div_{h2}(R v) - (h1/h2) div_{h1}(v)
inline double piola_residual(const PointSample& s) {
    const TransformedSample x = transform_sample(s);
    const double lhs = div_h_point(x.rv.grad, x.h2.h, x.h2.h_y1, s.y2);
    const double rhs = x.tr.detJ * div_h_point(x.v.grad, x.h1.h, x.h1.h_y1, s.y2);
    return std::abs(lhs - rhs);
}

// e_h1(v) - e_h2(R v) + E(v) + E(v)^T
inline double viscous_transform_residual(const PointSample& s) {
    const TransformedSample x = transform_sample(s);
    const ErrorMatrixSet<double> m = error_matrices(x.h1, x.h2, x.v, s.y2);
    const Mat2 lhs = def_tensor_point(x.v.grad, x.tr.F_h1);
    const Mat2 rhs = def_tensor_point(x.rv.grad, x.tr.F_h2) - (m.Ev + m.Ev.transpose());
    return max_abs(lhs - rhs);
}

// grad(R v) - grad(v) - E2(v)
inline double grad_r_residual(const PointSample& s) {
    const TransformedSample x = transform_sample(s);
    const ErrorMatrixSet<double> m = error_matrices(x.h1, x.h2, x.v, s.y2);
    return max_abs(x.rv.grad - x.v.grad - m.E2);
}

/// Stream-function field on a flat-ended wall: Psi = g(y1) (y2^2 - 2 y2^3 / 3) with
/// g = c + sum_m a_m cos(m pi y1 / L). It is div_h-free, u1 = 0 on y2 = 1 and u2 = 0 on the other sides.
struct RandomStream {
    BumpWall wall;
    double c = 0.0;
    std::array<double, 3> a{};

    template <class T>
    Vec2T<T> at(const T& y1, const T& y2, const T& = T(0.0)) const {
        using std::cos, std::sin;
        const PointData<T> h = wall.at(y1);
        T g = T(c), gp = T(0.0);
        for (int m = 0; m < 3; ++m) {
            const double k = (m + 1) * kPi / wall.L;
            g = g + a[m] * cos(k * y1);
            gp = gp - a[m] * k * sin(k * y1);
        }
        const T p = y2 * y2 - (2.0 / 3.0) * y2 * y2 * y2, pp = 2.0 * y2 - 2.0 * y2 * y2;
        return {g * pp / h.h, -(gp * p) + y2 * h.h_y1 * g * pp / h.h};
    }

    static RandomStream random(std::mt19937& rng, double L) {
        std::uniform_real_distribution<double> u(-1.0, 1.0), amp(0.0, 0.5);
        RandomStream s;
        s.wall = {1.0, amp(rng), L};
        s.c = u(rng);
        for (auto& v : s.a) v = u(rng);
        return s;
    }
};

/// Composite Simpson weights on [0, len] with an even number of panels.
inline std::vector<double> simpson_weights(int panels, double len) {
    std::vector<double> w(panels + 1);
    const double h = len / panels;
    for (int k = 0; k <= panels; ++k) w[k] = h / 3.0 * ((k == 0 || k == panels) ? 1.0 : (k % 2 ? 4.0 : 2.0));
    return w;
}

// sup_{y1} int_0^1 |v|^2 dy2 / (||v|| ||grad v||) for one field, by Simpson quadrature with exact derivatives.
inline double essup_ratio(const RandomStream& f) {
    constexpr int P = 160;
    const double L = f.wall.L;
    const auto w1 = simpson_weights(P, L), w2 = simpson_weights(P, 1.0);
    double sup = 0.0, l2 = 0.0, h1 = 0.0;
    for (int i = 0; i <= P; ++i) {
        const double y1 = L * i / P;
        double column = 0.0;
        for (int j = 0; j <= P; ++j) {
            const PointVelocity<double> pv = velocity_with_gradient(f, y1, static_cast<double>(j) / P, 0.0);
            const double v2 = dot(pv.u, pv.u);
            column += w2[j] * v2;
            l2 += w1[i] * w2[j] * v2;
            h1 += w1[i] * w2[j] * ddot(pv.grad, pv.grad);
        }
        sup = std::max(sup, column);
    }
    return sup / std::sqrt(l2 * h1);
}

struct Refinement {
    std::vector<double> h, err;
};

inline Refinement trilinear_skew_study(std::mt19937& rng) {
    const StreamFlow flow{{1.0, 0.25, 1.0}, 0.3};
    const SmoothVField z{SmoothVelocity::random(rng), 1.0}, p{SmoothVelocity::random(rng), 1.0};
    Refinement r;
    for (int N : {16, 32, 64}) {
        const Grid2D g(1.0, N, N);
        const auto w = sample_wall(g, flow.wall);
        const auto U = sample_field(g, flow), Z = sample_field(g, z), P = sample_field(g, p);
        const double r0 = flow.wall.r;
        r.h.push_back(g.d1());
        r.err.push_back(std::abs(convective_form(g, U, Z, P, w, r0, r0) - skew_convective_form(g, U, Z, P, w)));
    }
    return r;
}

inline Refinement div_free_study(std::mt19937& rng) {
    const RandomStream flow = RandomStream::random(rng, 1.5);
    Refinement r;
    for (int N : {16, 32, 64}) {
        const Grid2D g(1.5, N, N);
        const Field d = div_h_field(g, sample_field(g, flow), sample_wall(g, flow.wall));
        double m = 0.0;
        for (double v : d) m = std::max(m, std::abs(v));
        r.h.push_back(g.d1());
        r.err.push_back(m);
    }
    return r;
}

inline Refinement def_tensor_study(std::mt19937& rng) {
    const SmoothVelocity v = SmoothVelocity::random(rng);
    const BumpWall wall{1.0, 0.4, 1.0};
    Refinement r;
    for (int N : {16, 32, 64}) {
        const Grid2D g(1.0, N, N);
        const SymTensorField e = def_tensor_field(g, sample_field(g, v), sample_wall(g, wall));
        double m = 0.0;
        for (int i = 0; i < g.n1(); ++i)
            for (int j = 0; j < g.n2(); ++j) {
                const int k = g.idx(i, j);
                const auto p = wall.at(g.y1(i));
                const auto pv = velocity_with_gradient(v, g.y1(i), g.y2(j), 0.0);
                // def_tensor_field stores (d^_i u_j + d^_j u_i)/2, which is grad(u) F_h + (grad(u) F_h)^T
                const Mat2 x = def_tensor_point(pv.grad, f_matrix(p.h, p.h_y1, g.y2(j)));
                m = std::max({m, std::abs(x(0, 0) - e.e11[k]), std::abs(x(0, 1) - e.e12[k]),
                              std::abs(x(1, 1) - e.e22[k])});
            }
        r.h.push_back(g.d1());
        r.err.push_back(m);
    }
    return r;
}

}  // namespace detail

/// Runs one identity check. count is the number of random samples (pointwise kinds and essup) or of
/// independent random fields per refinement study (the worst level residuals are kept).
inline IdentityReport verify_identity(IdentityKind kind, int count = 100, unsigned seed = 12345) {
    FSI_REQUIRE(count >= 1, DomainError, "verify_identity: count must be positive");
    std::mt19937 rng(seed);
    IdentityReport r;
    r.kind = kind;
    r.samples = count;
    auto pointwise = [&](double (*f)(const detail::PointSample&)) {
        for (int k = 0; k < count; ++k) r.residuals.push_back(f(detail::random_point_sample(rng)));
    };
    auto refine = [&](detail::Refinement (*study)(std::mt19937&)) {
        for (int k = 0; k < count; ++k) {
            const detail::Refinement s = study(rng);
            if (r.spacings.empty()) {
                r.spacings = s.h;
                r.residuals = s.err;
            } else {
                for (std::size_t l = 0; l < s.err.size(); ++l) r.residuals[l] = std::max(r.residuals[l], s.err[l]);
            }
        }
        r.order = fitted_order(r.spacings, r.residuals);
    };
    switch (kind) {
        case IdentityKind::piola: pointwise(&detail::piola_residual); break;
        case IdentityKind::viscous_transform: pointwise(&detail::viscous_transform_residual); break;
        case IdentityKind::grad_R: pointwise(&detail::grad_r_residual); break;
        case IdentityKind::trilinear_skew: refine(&detail::trilinear_skew_study); break;
        case IdentityKind::div_free: refine(&detail::div_free_study); break;
        case IdentityKind::def_tensor: refine(&detail::def_tensor_study); break;
        case IdentityKind::essup: {
            std::uniform_real_distribution<double> len(1.0, 4.0);
            for (int k = 0; k < count; ++k) {
                const double L = len(rng);
                r.residuals.push_back(detail::essup_ratio(detail::RandomStream::random(rng, L)));
            }
            r.max_ratio = *std::max_element(r.residuals.begin(), r.residuals.end());
            break;
        }
    }
    if (r.refinement()) {
        r.max_residual = r.residuals.back();
        r.mean_residual = r.residuals.back();
    } else {
        double s = 0.0;
        for (double v : r.residuals) {
            r.max_residual = std::max(r.max_residual, v);
            s += v;
        }
        r.mean_residual = s / static_cast<double>(r.residuals.size());
    }
    return r;
}

// ---------------------------------------------------------------------------------------------
// Korn constant

/// Flat unknown index of component c (0 or 1) at node k; components are stacked [u1; u2].
inline int velocity_dof(const Grid2D& g, int c, int k) { return c * g.nodes() + k; }

/// Free unknowns of the discrete V-space: u1 = 0 on y2 = 1, u2 = 0 on y2 = 0, y1 = 0 and y1 = L.
inline std::vector<int> v_space_dofs(const Grid2D& g, const std::vector<int>& extra_fixed = {}) {
    std::vector<char> fixed(2 * g.nodes(), 0);
    for (int i = 0; i < g.n1(); ++i) {
        fixed[velocity_dof(g, 0, g.idx(i, g.N2))] = 1;
        fixed[velocity_dof(g, 1, g.idx(i, 0))] = 1;
    }
    for (int j = 0; j < g.n2(); ++j) {
        fixed[velocity_dof(g, 1, g.idx(0, j))] = 1;
        fixed[velocity_dof(g, 1, g.idx(g.N1, j))] = 1;
    }
    for (int d : extra_fixed) {
        FSI_REQUIRE(d >= 0 && d < 2 * g.nodes(), DimensionError, "korn_constant: fixed index out of range");
        fixed[d] = 1;
    }
    std::vector<int> free;
    for (int d = 0; d < 2 * g.nodes(); ++d)
        if (!fixed[d]) free.push_back(d);
    return free;
}

struct KornResult {
    double c_korn = 0.0;         ///< lambda_min / min h
    double lambda_min = 0.0;     ///< min of int h e_h(u):e_h(u) / ||grad u||^2 over the V-space
    double alpha = 0.0;          ///< min h of the snapshot
    int dofs = 0;
};

/// Smallest generalized Rayleigh quotient of the viscous form (unit viscosity) against the H1 seminorm
/// Gram matrix over the discrete V-space, divided by min h so that
/// viscous_form(u, u) >= c_Ko (alpha mu / rho) ||grad u||^2 with alpha = min h.
inline KornResult korn_constant(const Grid2D& g, const WallSnapshot& snap, const std::vector<int>& extra_fixed = {}) {
    FSI_REQUIRE(g.N1 <= 24 && g.N2 <= 24, DomainError, "korn_constant: dense eigensolve needs N1, N2 <= 24");
    const DifferenceMatrices d(g);
    const NodeMetric m(g, snap);
    const HatOperators hat(d, m);
    const int n = g.nodes();
    const Eigen::MatrixXd D1(d.D1), D2(d.D2), H1(hat.H1), H2(hat.H2);
    const Eigen::VectorXd w = m.w, wh = m.w.cwiseProduct(m.h);

    // e11 = H1 u1, e22 = H2 u2, e12 = (H2 u1 + H1 u2) / 2; form = sum w h (e11^2 + 2 e12^2 + e22^2)
    Eigen::MatrixXd E11 = Eigen::MatrixXd::Zero(n, 2 * n), E22 = E11, E12 = E11;
    E11.leftCols(n) = H1;
    E22.rightCols(n) = H2;
    E12.leftCols(n) = 0.5 * H2;
    E12.rightCols(n) = 0.5 * H1;
    const Eigen::MatrixXd A = E11.transpose() * wh.asDiagonal() * E11 + 2.0 * E12.transpose() * wh.asDiagonal() * E12 +
                              E22.transpose() * wh.asDiagonal() * E22;
    const Eigen::MatrixXd Gs = D1.transpose() * w.asDiagonal() * D1 + D2.transpose() * w.asDiagonal() * D2;
    Eigen::MatrixXd G = Eigen::MatrixXd::Zero(2 * n, 2 * n);
    G.topLeftCorner(n, n) = Gs;
    G.bottomRightCorner(n, n) = Gs;

    const std::vector<int> free = v_space_dofs(g, extra_fixed);
    const int f = static_cast<int>(free.size());
    FSI_REQUIRE(f > 0, DomainError, "korn_constant: empty V-space");
    Eigen::MatrixXd Af(f, f), Gf(f, f);
    for (int a = 0; a < f; ++a)
        for (int b = 0; b < f; ++b) {
            Af(a, b) = A(free[a], free[b]);
            Gf(a, b) = G(free[a], free[b]);
        }
    Af = 0.5 * (Af + Af.transpose());
    Gf = 0.5 * (Gf + Gf.transpose());
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(Af, Gf, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw SolverError("korn_constant: generalized eigensolve failed", 0.0);
    KornResult r;
    r.lambda_min = es.eigenvalues().minCoeff();
    r.alpha = *std::min_element(snap.h.begin(), snap.h.end());
    r.c_korn = r.lambda_min / r.alpha;
    r.dofs = f;
    return r;
}

// ---------------------------------------------------------------------------------------------
// continuous dependence

/// One side of a paired run: the configuration (pressures may differ between sides) and the deformation.
struct DependenceCase {
    ModelConfig config;
    Table delta;
};

struct DependenceOptions {
    std::optional<double> c_korn;  ///< taken from korn_constant on a coarse copy of the second wall at t = 0 if unset
};

/// Per time level: lhs = g-type energy of R u1 - u2 and the wall differences, rhs = data + omega * deformation.
struct DependenceReport {
    std::vector<double> times;
    std::vector<double> lhs;
    std::vector<double> data;         ///< int_0^t of the squared pressure differences
    std::vector<double> omega;        ///< omega(t)
    std::vector<double> deformation;  ///< omega(t) [ ||hbar||^2_{W1inf L2} + ||hbar||^2_{Linf H2} ] on (0, t)
    std::vector<double> rhs;
    std::vector<double> ratio;        ///< lhs / rhs, 0 when both vanish
    double c_korn = 0.0;
    double alpha = 0.0;

    [[nodiscard]] double max_ratio() const {
        double m = 0.0;
        for (double r : ratio) m = std::max(m, r);
        return m;
    }
};

namespace detail {

inline void require_paired(const ModelConfig& a, const ModelConfig& b) {
    const bool same = a.L == b.L && a.N1 == b.N1 && a.N2 == b.N2 && a.dt == b.dt && a.T == b.T && a.rho == b.rho &&
                      a.mu == b.mu && a.a == b.a && a.b == b.b && a.c == b.c && a.rho_w == b.rho_w &&
                      a.hbar == b.hbar && a.r0 == b.r0 && a.kappa_value() == b.kappa_value() && a.eps == b.eps &&
                      a.coupling == b.coupling;
    FSI_REQUIRE(same, DomainError,
                "dependence_experiment: the two runs may differ only in boundary pressures and deformation");
}

// ||f||^2 + ||d1 f||^2 + ||d2 f||^2 for each component
inline double w12_sq(const Grid2D& g, const VectorField& u) {
    double s = 0.0;
    for (const Field* c : {&u.c1, &u.c2}) {
        s += std::pow(l2_norm(g, *c), 2) + std::pow(l2_norm(g, d_dy1(g, *c)), 2) +
             std::pow(l2_norm(g, d_dy2(g, *c)), 2);
    }
    return s;
}

inline double l2_sq_2d(const Grid2D& g, const VectorField& u) {
    return std::pow(l2_norm(g, u.c1), 2) + std::pow(l2_norm(g, u.c2), 2);
}

inline WallSnapshot coarse_snapshot(const DeformationHistory& d, int level, const Grid2D& coarse) {
    const Grid1D& fine = d.grid;
    WallSnapshot s{Field(coarse.n1()), Field(coarse.n1())};
    for (int i = 0; i < coarse.n1(); ++i) {
        const double y = coarse.y1(i);
        const int k = std::min(static_cast<int>(y / fine.dx()), fine.N - 1);
        const double th = (y - fine.x(k)) / fine.dx();
        s.h[i] = (1.0 - th) * d.h(level, k) + th * d.h(level, k + 1);
        s.h_y1[i] = (1.0 - th) * d.h_y1(level, k) + th * d.h_y1(level, k + 1);
    }
    return s;
}

}  // namespace detail

/// Piola difference R u1 - u2 at one level, R built from the walls of the two runs.
inline VectorField piola_difference(const Grid2D& g, const FlowState& f1, const FlowState& f2,
                                    const DeformationHistory& h1, const DeformationHistory& h2, int level) {
    VectorField p = VectorField::zero(g);
    for (int i = 0; i < g.n1(); ++i) {
        const PointData<double> a{h1.h(level, i), h1.h_y1(level, i)}, b{h2.h(level, i), h2.h_y1(level, i)};
        for (int j = 0; j < g.n2(); ++j) {
            const int k = g.idx(i, j);
            const Vec2 ru = piola_apply(Vec2{f1.u.c1[k], f1.u.c2[k]}, point_transforms(a, b, g.y2(j)));
            p.c1[k] = ru.x - f2.u.c1[k];
            p.c2[k] = ru.y - f2.u.c2[k];
        }
    }
    return p;
}

/// Evaluates both sides of the continuous-dependence estimate along two trajectories.
inline DependenceReport dependence_report(const DependenceCase& c1, const Trajectory& t1, const DependenceCase& c2,
                                          const Trajectory& t2, const DependenceOptions& opt = {}) {
    detail::require_paired(c1.config, c2.config);
    const ModelConfig& cfg = c1.config;
    const Grid2D& g = t1.grid;
    const Grid1D wg = cfg.wall_grid();
    const WallParams wp = cfg.wall_params();
    const double Emin = *std::min_element(wp.Estiff.begin(), wp.Estiff.end());
    const BoundaryPressures q1 = c1.config.pressures(), q2 = c2.config.pressures();

    DependenceReport r;
    r.alpha = cfg.admissibility().alpha;
    if (opt.c_korn) {
        r.c_korn = *opt.c_korn;
    } else {
        const Grid2D coarse(cfg.L, std::min(cfg.N1, 24), std::min(cfg.N2, 24));
        r.c_korn = korn_constant(coarse, detail::coarse_snapshot(t2.history, 0, coarse)).c_korn;
    }
    const double visc = r.alpha * cfg.mu / (2.0 * cfg.rho) * r.c_korn;

    const int nt = t1.levels();
    double int_w12 = 0.0, int_h2 = 0.0, data = 0.0, omega = 0.0;
    double prev_w12 = 0.0, prev_h2 = 0.0, prev_data = 0.0, prev_omega = 0.0;
    double max_hb = 0.0, max_hbt = 0.0, max_hb_h2 = 0.0;
    Field hb(wg.nodes()), hbt(wg.nodes());
    for (int n = 0; n < nt; ++n) {
        const double t = t1.times[n];
        const VectorField p = piola_difference(g, t1.flows[n], t2.flows[n], t1.history, t2.history, n);
        Field eb(wg.nodes()), sb(wg.nodes());
        for (int i = 0; i < wg.nodes(); ++i) {
            eb[i] = t1.walls[n].eta[i] - t2.walls[n].eta[i];
            sb[i] = t1.walls[n].sigma[i] - t2.walls[n].sigma[i];
        }

        // integrands at this level
        const double w12 = detail::w12_sq(g, p);
        const double h2 = detail::h2_sq(wg, sb);
        const double dq_in = q1.q_in(0.0, t) - q2.q_in(0.0, t), dq_out = q1.q_out(0.0, t) - q2.q_out(0.0, t);
        const double dq_w = q1.q_w(0.0, t) - q2.q_w(0.0, t);
        const double d_int = dq_in * dq_in + dq_out * dq_out + cfg.L * dq_w * dq_w;
        const double u1 = std::sqrt(detail::w12_sq(g, t1.flows[n].u));
        double h1t = 0.0, h1ty = 0.0, h2t = 0.0;
        for (int i = 0; i < wg.nodes(); ++i) {
            h1t = std::max(h1t, std::abs(t1.history.h_t(n, i)));
            h1ty = std::max(h1ty, std::abs(t1.history.h_ty1(n, i)));
            h2t = std::max(h2t, std::abs(t2.history.h_t(n, i)));
        }
        const double qw1 = q1.q_w(0.0, t);
        const double o_int = u1 + u1 * u1 + std::pow(h1t + h1ty, 2) + h2t * h2t + cfg.L * qw1 * qw1;
        if (n > 0) {
            const double tau = t - t1.times[n - 1];
            int_w12 += 0.5 * tau * (prev_w12 + w12);
            int_h2 += 0.5 * tau * (prev_h2 + h2);
            data += 0.5 * tau * (prev_data + d_int);
            omega += 0.5 * tau * (prev_omega + o_int);
        }
        prev_w12 = w12, prev_h2 = h2, prev_data = d_int, prev_omega = o_int;

        double wall_l2 = 0.0, wall_grad = 0.0;
        for (int i = 0; i < wg.nodes(); ++i)
            wall_l2 += wg.weight(i) * wp.Estiff[i] * (0.5 * sb[i] * sb[i] + 0.5 * cfg.b * eb[i] * eb[i]);
        for (int i = 0; i < wg.N; ++i) wall_grad += std::pow(eb[i + 1] - eb[i], 2) / wg.dx();
        const double lhs = 0.5 * r.alpha * detail::l2_sq_2d(g, p) + visc * int_w12 + wall_l2 +
                           0.5 * cfg.a * Emin * wall_grad + cfg.c * Emin * int_h2;

        // hbar = h1 - h2 norms, running maxima on (0, t)
        double hb_l2 = 0.0, hbt_l2 = 0.0, hb_h2 = 0.0;
        for (int i = 0; i < wg.nodes(); ++i) {
            hb[i] = t1.history.h(n, i) - t2.history.h(n, i);
            hbt[i] = t1.history.h_t(n, i) - t2.history.h_t(n, i);
            const double hy = t1.history.h_y1(n, i) - t2.history.h_y1(n, i);
            const double hyy = t1.history.h_y1y1(n, i) - t2.history.h_y1y1(n, i);
            hb_l2 += wg.weight(i) * hb[i] * hb[i];
            hbt_l2 += wg.weight(i) * hbt[i] * hbt[i];
            hb_h2 += wg.weight(i) * (hb[i] * hb[i] + hy * hy + hyy * hyy);
        }
        max_hb = std::max(max_hb, std::sqrt(hb_l2));
        max_hbt = std::max(max_hbt, std::sqrt(hbt_l2));
        max_hb_h2 = std::max(max_hb_h2, hb_h2);
        const double deform = omega * (std::pow(max_hb + max_hbt, 2) + max_hb_h2);
        const double rhs = data + deform;

        r.times.push_back(t);
        r.lhs.push_back(lhs);
        r.data.push_back(data);
        r.omega.push_back(omega);
        r.deformation.push_back(deform);
        r.rhs.push_back(rhs);
        r.ratio.push_back(rhs > 0.0 ? lhs / rhs : (lhs == 0.0 ? 0.0 : std::numeric_limits<double>::infinity()));
    }
    return r;
}

/// Runs the two solves concurrently and evaluates the estimate.
inline DependenceReport dependence_experiment(const DependenceCase& c1, const DependenceCase& c2,
                                              const DependenceOptions& opt = {}) {
    detail::require_paired(c1.config, c2.config);
    auto run = [](const DependenceCase& c) { return evaluate_F(c.delta, c.config); };
    auto f1 = std::async(std::launch::async, run, std::cref(c1));
    const Trajectory t2 = run(c2);
    const Trajectory t1 = f1.get();
    return dependence_report(c1, t1, c2, t2, opt);
}

/// Same pressure shape with the amplitude (or constant value, or every table sample) raised by s.
inline PressureSpec shifted_amplitude(PressureSpec p, double s) {
    p.value += s;
    for (auto& [t, v] : p.samples) v += s;
    return p;
}

/// delta(y1, t) = s (t / T) (1 - cos(2 pi y1 / L)) / 2 on the configured grid; clamped at both ends.
inline Table bump_deformation(const ModelConfig& cfg, double s) {
    const std::vector<double> t = cfg.times();
    const Grid1D g = cfg.wall_grid();
    Table d(static_cast<int>(t.size()), g.nodes());
    for (int n = 0; n < d.rows(); ++n)
        for (int i = 0; i < g.nodes(); ++i)
            d(n, i) = 0.5 * s * (t[n] / cfg.T) * (1.0 - std::cos(2.0 * kPi * g.x(i) / cfg.L));
    return d;
}

// ---------------------------------------------------------------------------------------------
// equicontinuity

struct EquicontinuityProfile {
    std::vector<double> taus;
    std::vector<double> values;
    double c = 0.0;          ///< least-squares slope through the origin, value ~ c tau
    double max_ratio = 0.0;  ///< max over tau > 0 of value / tau
};

/// value(tau) = int_0^{T - tau} [ int_D |sqrt(h) u(t + tau) - sqrt(h) u(t)|^2 + int_0^L |sigma(t + tau) - sigma(t)|^2 ] dt.
inline EquicontinuityProfile equicontinuity_profile(const Trajectory& tr, const std::vector<double>& taus) {
    const int nt = tr.levels();
    FSI_REQUIRE(nt >= 2, DimensionError, "equicontinuity_profile: trajectory needs at least two levels");
    const double dt = tr.times[1] - tr.times[0];
    const double T = tr.times.back() - tr.times.front();
    const Grid2D& g = tr.grid;
    const Grid1D wg = g.axis1();

    // sqrt(h) u at every level
    std::vector<VectorField> su(nt);
    for (int n = 0; n < nt; ++n) {
        su[n] = tr.flows[n].u;
        for (int i = 0; i < g.n1(); ++i) {
            const double s = std::sqrt(tr.history.h(n, i));
            for (int j = 0; j < g.n2(); ++j) {
                su[n].c1[g.idx(i, j)] *= s;
                su[n].c2[g.idx(i, j)] *= s;
            }
        }
    }

    EquicontinuityProfile p;
    double num = 0.0, den = 0.0;
    for (double tau : taus) {
        const double mr = tau / dt;
        const long m = std::lround(mr);
        FSI_REQUIRE(tau >= 0.0 && tau < T && std::abs(mr - static_cast<double>(m)) <= 1e-9 * std::max(1.0, mr),
                    DomainError, "equicontinuity_profile: tau = " + std::to_string(tau) +
                                     " is not a multiple of dt in [0, T)");
        double value = 0.0;
        if (m > 0) {
            std::vector<double> f(nt - m);
            for (int n = 0; n + m < nt; ++n) {
                double s = 0.0;
                for (int i = 0; i < g.n1(); ++i)
                    for (int j = 0; j < g.n2(); ++j) {
                        const int k = g.idx(i, j);
                        const double a = su[n + m].c1[k] - su[n].c1[k], b = su[n + m].c2[k] - su[n].c2[k];
                        s += g.weight(i, j) * (a * a + b * b);
                    }
                for (int i = 0; i < wg.nodes(); ++i) {
                    const double d = tr.walls[n + m].sigma[i] - tr.walls[n].sigma[i];
                    s += wg.weight(i) * d * d;
                }
                f[n] = s;
            }
            for (std::size_t n = 0; n + 1 < f.size(); ++n)
                value += 0.5 * (tr.times[n + 1] - tr.times[n]) * (f[n] + f[n + 1]);
            num += tau * value;
            den += tau * tau;
            p.max_ratio = std::max(p.max_ratio, value / tau);
        }
        p.taus.push_back(tau);
        p.values.push_back(value);
    }
    p.c = den > 0.0 ? num / den : 0.0;
    return p;
}

}  // namespace fsi
