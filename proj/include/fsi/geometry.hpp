/// @file geometry.hpp
/// @brief Wall shape h = R0 + delta, admissibility checks and the pointwise algebra that maps one
///        deformed channel onto another through the reference rectangle.
#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "fsi/dual.hpp"
#include "fsi/errors.hpp"
#include "fsi/grid.hpp"
#include "fsi/mat2.hpp"

namespace fsi {

inline constexpr double kPi = 3.14159265358979323846;

/// Reference radius R0(y1) with analytic first and second derivatives.
struct R0Profile {
    std::function<double(double)> value;
    std::function<double(double)> d1;
    std::function<double(double)> d2;
    std::string spec;

    static R0Profile constant(double r) {
        return {[r](double) { return r; }, [](double) { return 0.0; }, [](double) { return 0.0; },
                "constant(" + std::to_string(r) + ")"};
    }
    /// r + a sin(pi y / L)
    static R0Profile sine(double r, double a, double L) {
        const double k = kPi / L;
        return {[=](double y) { return r + a * std::sin(k * y); },
                [=](double y) { return a * k * std::cos(k * y); },
                [=](double y) { return -a * k * k * std::sin(k * y); }, "sine"};
    }
    /// r + a (1 - cos(2 pi y / L)) / 2; flat at both ends.
    static R0Profile bump(double r, double a, double L) {
        const double k = 2.0 * kPi / L;
        return {[=](double y) { return r + 0.5 * a * (1.0 - std::cos(k * y)); },
                [=](double y) { return 0.5 * a * k * std::sin(k * y); },
                [=](double y) { return 0.5 * a * k * k * std::cos(k * y); }, "bump"};
    }
};

/// Values of one deformation and its derivatives at a point (y1, t).
template <class T>
struct PointData {
    T h{};
    T h_y1{};
    T h_y1y1{};
    T h_t{};
    T h_ty1{};
};

/// h = R0 + delta sampled on time levels x 1D nodes.
struct DeformationHistory {
    Grid1D grid;
    std::vector<double> times;
    Table h, h_y1, h_y1y1, h_t, h_ty1;
    Field r0, r0_y1, r0_y1y1;

    [[nodiscard]] int levels() const { return static_cast<int>(times.size()); }
    [[nodiscard]] PointData<double> at(int n, int i) const {
        return {h(n, i), h_y1(n, i), h_y1y1(n, i), h_t(n, i), h_ty1(n, i)};
    }
};

/// Analytic delta(y1, t) together with its derivatives.
using DeltaCallback = std::function<PointData<double>(double y1, double t)>;

namespace detail {

// Fourth-order first derivative; one-sided 5-point closures at the two nodes next to each end.
inline Field deriv1_4(std::span<const double> f, double dx) {
    const int n = static_cast<int>(f.size());
    Field out(n);
    if (n < 6) {
        for (int i = 0; i < n; ++i) {
            const Stencil1D st = first_derivative_stencil(i, n - 1, dx);
            double v = 0.0;
            for (int k = 0; k < st.size; ++k) v += st.coeff[k] * f[st.index[k]];
            out[i] = v;
        }
        return out;
    }
    const double s = 1.0 / (12.0 * dx);
    for (int i = 2; i < n - 2; ++i) out[i] = s * (f[i - 2] - 8.0 * f[i - 1] + 8.0 * f[i + 1] - f[i + 2]);
    out[0] = s * (-25.0 * f[0] + 48.0 * f[1] - 36.0 * f[2] + 16.0 * f[3] - 3.0 * f[4]);
    out[1] = s * (-3.0 * f[0] - 10.0 * f[1] + 18.0 * f[2] - 6.0 * f[3] + f[4]);
    const int m = n - 1;
    out[m] = -s * (-25.0 * f[m] + 48.0 * f[m - 1] - 36.0 * f[m - 2] + 16.0 * f[m - 3] - 3.0 * f[m - 4]);
    out[m - 1] = -s * (-3.0 * f[m] - 10.0 * f[m - 1] + 18.0 * f[m - 2] - 6.0 * f[m - 3] + f[m - 4]);
    return out;
}

// Fourth-order second derivative; 6-point one-sided closures.
inline Field deriv2_4(std::span<const double> f, double dx) {
    const int n = static_cast<int>(f.size());
    Field out(n);
    const double s = 1.0 / (dx * dx);
    if (n < 6) {
        for (int i = 1; i < n - 1; ++i) out[i] = s * (f[i - 1] - 2.0 * f[i] + f[i + 1]);
        out[0] = s * (2.0 * f[0] - 5.0 * f[1] + 4.0 * f[2] - f[3]);
        out[n - 1] = s * (2.0 * f[n - 1] - 5.0 * f[n - 2] + 4.0 * f[n - 3] - f[n - 4]);
        return out;
    }
    const double t = s / 12.0;
    for (int i = 2; i < n - 2; ++i)
        out[i] = t * (-f[i - 2] + 16.0 * f[i - 1] - 30.0 * f[i] + 16.0 * f[i + 1] - f[i + 2]);
    out[0] = t * (45.0 * f[0] - 154.0 * f[1] + 214.0 * f[2] - 156.0 * f[3] + 61.0 * f[4] - 10.0 * f[5]);
    out[1] = t * (10.0 * f[0] - 15.0 * f[1] - 4.0 * f[2] + 14.0 * f[3] - 6.0 * f[4] + f[5]);
    const int m = n - 1;
    out[m] = t * (45.0 * f[m] - 154.0 * f[m - 1] + 214.0 * f[m - 2] - 156.0 * f[m - 3] + 61.0 * f[m - 4] -
                  10.0 * f[m - 5]);
    out[m - 1] = t * (10.0 * f[m] - 15.0 * f[m - 1] - 4.0 * f[m - 2] + 14.0 * f[m - 3] - 6.0 * f[m - 4] + f[m - 5]);
    return out;
}

// Second-order time derivative on possibly nonuniform levels.
inline void time_derivative(const Table& f, const std::vector<double>& t, Table& out) {
    const int nt = f.rows(), nx = f.cols();
    out = Table(nt, nx);
    if (nt == 1) return;
    if (nt == 2) {
        for (int i = 0; i < nx; ++i) out(0, i) = out(1, i) = (f(1, i) - f(0, i)) / (t[1] - t[0]);
        return;
    }
    for (int n = 0; n < nt; ++n) {
        int c = std::clamp(n, 1, nt - 2);
        const double a = t[c] - t[c - 1], b = t[c + 1] - t[c];
        double wm, w0, wp;
        if (n == c) {
            wm = -b / (a * (a + b));
            w0 = (b - a) / (a * b);
            wp = a / (b * (a + b));
        } else if (n == c - 1) {
            wm = -(2.0 * a + b) / (a * (a + b));
            w0 = (a + b) / (a * b);
            wp = -a / (b * (a + b));
        } else {
            wm = b / (a * (a + b));
            w0 = -(a + b) / (a * b);
            wp = (a + 2.0 * b) / (b * (a + b));
        }
        for (int i = 0; i < nx; ++i) out(n, i) = wm * f(c - 1, i) + w0 * f(c, i) + wp * f(c + 1, i);
    }
}

inline void check_times(const std::vector<double>& times) {
    FSI_REQUIRE(!times.empty(), DimensionError, "deformation: at least one time level is required");
    for (std::size_t n = 1; n < times.size(); ++n)
        FSI_REQUIRE(times[n] > times[n - 1], DimensionError, "deformation: time levels must increase strictly");
}

inline void fill_r0(DeformationHistory& d, const R0Profile& r0) {
    d.r0 = sample(d.grid, r0.value);
    d.r0_y1 = sample(d.grid, r0.d1);
    d.r0_y1y1 = sample(d.grid, r0.d2);
}

}  // namespace detail

/// h = R0 + delta from sampled delta[level][node]; derivatives by finite differences.
inline DeformationHistory eval_deformation(const Table& delta, const R0Profile& r0, const Grid1D& grid,
                                           const std::vector<double>& times) {
    detail::check_times(times);
    FSI_REQUIRE(delta.rows() == static_cast<int>(times.size()) && delta.cols() == grid.nodes(), DimensionError,
                "eval_deformation: delta must be [time levels] x [grid nodes]");
    const int nt = delta.rows(), nx = delta.cols();
    double scale = 1.0;
    for (double v : delta.data()) scale = std::max(scale, std::abs(v));
    for (int n = 0; n < nt; ++n)
        FSI_REQUIRE(std::abs(delta(n, 0)) <= 1e-12 * scale && std::abs(delta(n, nx - 1)) <= 1e-12 * scale,
                    DomainError, "eval_deformation: delta must vanish at the clamped ends");

    DeformationHistory d;
    d.grid = grid;
    d.times = times;
    detail::fill_r0(d, r0);
    d.h = Table(nt, nx);
    d.h_y1 = Table(nt, nx);
    d.h_y1y1 = Table(nt, nx);
    Table dt_delta;
    detail::time_derivative(delta, times, dt_delta);
    d.h_t = dt_delta;
    d.h_ty1 = Table(nt, nx);
    for (int n = 0; n < nt; ++n) {
        const Field dy = detail::deriv1_4(delta.row(n), grid.dx());
        const Field dyy = detail::deriv2_4(delta.row(n), grid.dx());
        const Field dty = detail::deriv1_4(dt_delta.row(n), grid.dx());
        for (int i = 0; i < nx; ++i) {
            d.h(n, i) = d.r0[i] + delta(n, i);
            const bool end = (i == 0 || i == nx - 1);
            // clamped data: delta' = 0 and delta_t = 0 at the ends
            d.h_y1(n, i) = d.r0_y1[i] + (end ? 0.0 : dy[i]);
            d.h_y1y1(n, i) = d.r0_y1y1[i] + dyy[i];
            d.h_ty1(n, i) = end ? 0.0 : dty[i];
            if (end) d.h_t(n, i) = 0.0;
        }
    }
    for (double v : d.h.data()) FSI_REQUIRE(v > 0.0, DomainError, "eval_deformation: h must stay positive");
    return d;
}

/// h = R0 + delta with delta and its derivatives supplied analytically.
inline DeformationHistory eval_deformation(const DeltaCallback& delta, const R0Profile& r0, const Grid1D& grid,
                                           const std::vector<double>& times) {
    detail::check_times(times);
    const int nt = static_cast<int>(times.size()), nx = grid.nodes();
    DeformationHistory d;
    d.grid = grid;
    d.times = times;
    detail::fill_r0(d, r0);
    d.h = d.h_y1 = d.h_y1y1 = d.h_t = d.h_ty1 = Table(nt, nx);
    for (int n = 0; n < nt; ++n)
        for (int i = 0; i < nx; ++i) {
            const PointData<double> p = delta(grid.x(i), times[n]);
            d.h(n, i) = d.r0[i] + p.h;
            d.h_y1(n, i) = d.r0_y1[i] + p.h_y1;
            d.h_y1y1(n, i) = d.r0_y1y1[i] + p.h_y1y1;
            d.h_t(n, i) = p.h_t;
            d.h_ty1(n, i) = p.h_ty1;
            FSI_REQUIRE(d.h(n, i) > 0.0, DomainError, "eval_deformation: h must stay positive");
        }
    return d;
}

/// Largest |h_y1 - centered difference of h| over interior nodes; O(dx^2) for consistent data.
inline double slope_consistency(const DeformationHistory& d) {
    double r = 0.0;
    const double dx = d.grid.dx();
    for (int n = 0; n < d.levels(); ++n)
        for (int i = 1; i < d.grid.N; ++i)
            r = std::max(r, std::abs(d.h_y1(n, i) - (d.h(n, i + 1) - d.h(n, i - 1)) / (2.0 * dx)));
    return r;
}

struct AdmissibilityParams {
    double alpha = 0.4;
    double K = 10.0;
    double R_min = 1.0;
    double R_max = 1.0;
    double T_max = std::numeric_limits<double>::infinity();

    /// 0.9 min{R_min, 1/(R_min + R_max)}.
    static double default_alpha(double r_min, double r_max) { return 0.9 * std::min(r_min, 1.0 / (r_min + r_max)); }
    [[nodiscard]] double alpha_limit() const { return std::min(R_min, 1.0 / (R_min + R_max)); }
};

struct AdmissibilityReport {
    bool bounds_ok = true;
    bool slope_speed_ok = true;
    bool time_ok = true;
    double min_h = 0.0, max_h = 0.0;
    int min_node = -1, min_level = -1, max_node = -1, max_level = -1;
    /// max over nodes of max_t |h_y1| + int_0^T |h_t|^2 dt
    double slope_speed = 0.0;
    int slope_speed_node = -1;
    double final_time = 0.0;

    [[nodiscard]] bool passed() const { return bounds_ok && slope_speed_ok && time_ok; }
    [[nodiscard]] std::string summary(const AdmissibilityParams& p) const {
        std::ostringstream os;
        os.precision(6);
        os << (passed() ? "admissible" : "inadmissible") << ": h in [" << min_h << ", " << max_h
           << "] (bounds [" << p.alpha << ", " << 1.0 / p.alpha << "])";
        if (!bounds_ok) {
            if (min_h < p.alpha) os << "; h < alpha at node " << min_node << ", level " << min_level;
            if (max_h > 1.0 / p.alpha) os << "; h > 1/alpha at node " << max_node << ", level " << max_level;
        }
        os << "; slope+speed " << slope_speed << " (K = " << p.K << ")";
        if (!slope_speed_ok) os << " exceeded at node " << slope_speed_node;
        if (!time_ok) os << "; final time " << final_time << " exceeds T_max " << p.T_max;
        return os.str();
    }
};

inline AdmissibilityReport check_admissible(const DeformationHistory& d, const AdmissibilityParams& p) {
    AdmissibilityReport r;
    const int nt = d.levels(), nx = d.grid.nodes();
    r.min_h = std::numeric_limits<double>::infinity();
    r.max_h = -r.min_h;
    for (int n = 0; n < nt; ++n)
        for (int i = 0; i < nx; ++i) {
            const double v = d.h(n, i);
            if (v < r.min_h) r.min_h = v, r.min_node = i, r.min_level = n;
            if (v > r.max_h) r.max_h = v, r.max_node = i, r.max_level = n;
        }
    r.bounds_ok = r.min_h >= p.alpha && r.max_h <= 1.0 / p.alpha;
    r.slope_speed = -1.0;
    for (int i = 0; i < nx; ++i) {
        double slope = 0.0, speed = 0.0;
        for (int n = 0; n < nt; ++n) {
            slope = std::max(slope, std::abs(d.h_y1(n, i)));
            if (n > 0) {
                const double a = d.h_t(n - 1, i), b = d.h_t(n, i);
                speed += 0.5 * (d.times[n] - d.times[n - 1]) * (a * a + b * b);
            }
        }
        if (slope + speed > r.slope_speed) r.slope_speed = slope + speed, r.slope_speed_node = i;
    }
    r.slope_speed_ok = r.slope_speed <= p.K;
    r.final_time = d.times.back();
    r.time_ok = r.final_time <= p.T_max;
    return r;
}

/// F_h = 1/2 [[1, 0], [-(y2/h) h_y1, 1/h]]; e_h(u) = grad(u) F_h + (grad(u) F_h)^T.
template <class T>
Mat2T<T> f_matrix(const T& h, const T& h_y1, const T& y2) {
    return Mat2T<T>::of(T(0.5), T(0.0), -0.5 * y2 * h_y1 / h, 0.5 / h);
}

/// Symmetric part grad(u) F + (grad(u) F)^T, with grad(u)_ij = d_j u_i.
template <class T>
Mat2T<T> def_tensor_point(const Mat2T<T>& grad, const Mat2T<T>& F) {
    const Mat2T<T> g = grad * F;
    return g + g.transpose();
}

template <class T>
struct PointTransformSet {
    Mat2T<T> J, Jinv, R, Rinv, F_h1, F_h2;
    T detJ{};
};

template <class T>
void require_positive(const PointData<T>& p, const char* who) {
    if (!(value_of(p.h) > 0.0)) throw DomainError(std::string(who) + ": h must be positive");
}

/// h2 d_y1(h1/h2), evaluated through hbar = h1 - h2 to avoid cancellation when h1 ~ h2.
template <class T>
T w_e(const PointData<T>& h1, const PointData<T>& h2) {
    const T hb = h1.h - h2.h;
    const T hb_y = h1.h_y1 - h2.h_y1;
    return (h1.h * hb_y - h1.h_y1 * hb) / h2.h;
}

/// Maps between the channels with walls h1 and h2 at reference ordinate y2.
template <class T>
PointTransformSet<T> point_transforms(const PointData<T>& h1, const PointData<T>& h2, const T& y2) {
    require_positive(h1, "point_transforms");
    require_positive(h2, "point_transforms");
    const T wE = w_e(h1, h2);
    // h1 d_y1(h2/h1) = (h1 h2' - h2 h1') / h1
    const T wE_inv = (h1.h * h2.h_y1 - h2.h * h1.h_y1) / h1.h;
    PointTransformSet<T> s;
    s.detJ = h1.h / h2.h;
    s.J = Mat2T<T>::of(T(1.0), T(0.0), y2 * wE, s.detJ);
    s.Jinv = Mat2T<T>::of(T(1.0), T(0.0), y2 * wE_inv, h2.h / h1.h);
    s.R = Mat2T<T>::of(s.detJ, T(0.0), -(y2 * wE), T(1.0));
    s.Rinv = Mat2T<T>::of(h2.h / h1.h, T(0.0), -(y2 * wE_inv), T(1.0));
    s.F_h1 = f_matrix(h1.h, h1.h_y1, y2);
    s.F_h2 = f_matrix(h2.h, h2.h_y1, y2);
    return s;
}

/// Velocity and its gradient at a point; grad(i, j) = d u_i / d y_j.
template <class T>
struct PointVelocity {
    Vec2T<T> u{};
    Mat2T<T> grad{};
};

template <class T>
struct ErrorMatrixSet {
    Vec2T<T> E1{};
    Mat2T<T> E2{}, E3{}, E_R{};
    /// E(v) = E2 F_h1 + E2 E3 + grad(v) E3
    Mat2T<T> Ev{};
    T wE{};
};

/// Error terms relating the operators on the h1 channel to those on the h2 channel.
template <class T>
ErrorMatrixSet<T> error_matrices(const PointData<T>& h1, const PointData<T>& h2, const PointVelocity<T>& v,
                                 const T& y2) {
    require_positive(h1, "error_matrices");
    require_positive(h2, "error_matrices");
    ErrorMatrixSet<T> m;
    const T& a = h1.h;
    const T& b = h2.h;
    m.wE = w_e(h1, h2);
    const T wE = m.wE;
    const T hb = a - b;
    const T hb_y = h1.h_y1 - h2.h_y1;
    const T hb_yy = h1.h_y1y1 - h2.h_y1y1;
    // d_y1 wE, again in terms of hbar
    const T wE_y = (a * hb_yy - h1.h_y1y1 * hb - (h2.h_y1 / b) * (a * hb_y - h1.h_y1 * hb)) / b;
    // d_t wE, same form
    const T hb_t = h1.h_t - h2.h_t;
    const T hb_ty = h1.h_ty1 - h2.h_ty1;
    const T wE_t = (h1.h_t * hb_y + a * hb_ty - h1.h_ty1 * hb - h1.h_y1 * hb_t - wE * h2.h_t) / b;

    const T v1 = v.u.x;
    const T d1v1 = v.grad(0, 0), d2v1 = v.grad(0, 1), d2v2 = v.grad(1, 1);
    const T rate = h1.h_t / a - h2.h_t / b;

    m.E1.x = rate * a * (v1 + y2 * d2v1);
    m.E1.y = rate * y2 * b * (d2v2 - y2 * wE * d2v1) + y2 * v1 * (h2.h_t * wE - b * wE_t);

    m.E2 = Mat2T<T>::of(v1 * wE / b + hb / b * d1v1, hb / b * d2v1, -(y2 * (wE_y * v1 + wE * d1v1)),
                        -(wE * (v1 + y2 * d2v1)));
    // F_h2 - F_h1
    m.E3 = Mat2T<T>::of(T(0.0), T(0.0), 0.5 * y2 * wE / a, 0.5 * (1.0 / b - 1.0 / a));
    m.E_R = Mat2T<T>::of(hb / b, T(0.0), -(y2 * wE), T(0.0));
    const Mat2T<T> F1 = f_matrix(a, h1.h_y1, y2);
    m.Ev = m.E2 * F1 + m.E2 * m.E3 + v.grad * m.E3;
    return m;
}

/// Piola map u -> R u.
template <class T>
Vec2T<T> piola_apply(const Vec2T<T>& u, const PointTransformSet<T>& tr) {
    return tr.R * u;
}

/// Transformed divergence at a point from the velocity gradient.
template <class T>
T div_h_point(const Mat2T<T>& grad, const T& h, const T& h_y1, const T& y2) {
    return grad(0, 0) - y2 / h * h_y1 * grad(0, 1) + grad(1, 1) / h;
}

}  // namespace fsi
