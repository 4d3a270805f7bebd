#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "fsi/errors.hpp"

namespace fsi {

using Field = std::vector<double>;

/// Uniform nodes 0..N on [0, L].
struct Grid1D {
    double L = 1.0;
    int N = 4;

    Grid1D() = default;
    Grid1D(double length, int cells) : L(length), N(cells) {
        FSI_REQUIRE(length > 0.0, DomainError, "Grid1D: length must be positive");
        FSI_REQUIRE(cells >= 2, DomainError, "Grid1D: need at least 2 cells");
    }

    [[nodiscard]] int nodes() const { return N + 1; }
    [[nodiscard]] double dx() const { return L / N; }
    [[nodiscard]] double x(int i) const { return L * static_cast<double>(i) / N; }
    /// Trapezoidal weight of node i.
    [[nodiscard]] double weight(int i) const { return (i == 0 || i == N) ? 0.5 * dx() : dx(); }

    friend bool operator==(const Grid1D&, const Grid1D&) = default;
};

/// Reference rectangle D = (0, L) x (0, 1) with (N1+1) x (N2+1) nodes.
struct Grid2D {
    double L = 1.0;
    int N1 = 4;
    int N2 = 4;

    Grid2D() = default;
    Grid2D(double length, int n1, int n2) : L(length), N1(n1), N2(n2) {
        FSI_REQUIRE(length > 0.0, DomainError, "Grid2D: length must be positive");
        FSI_REQUIRE(n1 >= 4 && n2 >= 4, DomainError, "Grid2D: N1 and N2 must be at least 4");
    }

    [[nodiscard]] int n1() const { return N1 + 1; }
    [[nodiscard]] int n2() const { return N2 + 1; }
    [[nodiscard]] int nodes() const { return n1() * n2(); }
    [[nodiscard]] double d1() const { return L / N1; }
    [[nodiscard]] double d2() const { return 1.0 / N2; }
    [[nodiscard]] double y1(int i) const { return L * static_cast<double>(i) / N1; }
    [[nodiscard]] double y2(int j) const { return static_cast<double>(j) / N2; }
    [[nodiscard]] int idx(int i, int j) const { return i * n2() + j; }
    [[nodiscard]] Grid1D axis1() const { return {L, N1}; }
    [[nodiscard]] Grid1D axis2() const { return {1.0, N2}; }
    [[nodiscard]] double weight(int i, int j) const { return axis1().weight(i) * axis2().weight(j); }

    [[nodiscard]] Field weights() const {
        Field w(static_cast<std::size_t>(nodes()));
        const Grid1D a1 = axis1(), a2 = axis2();
        for (int i = 0; i < n1(); ++i)
            for (int j = 0; j < n2(); ++j) w[idx(i, j)] = a1.weight(i) * a2.weight(j);
        return w;
    }

    friend bool operator==(const Grid2D&, const Grid2D&) = default;
};

/// Dense [row][col] table, used for quantities sampled over time levels x 1D nodes.
class Table {
public:
    Table() = default;
    Table(int rows, int cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(static_cast<std::size_t>(rows) * cols, fill) {}

    [[nodiscard]] int rows() const { return rows_; }
    [[nodiscard]] int cols() const { return cols_; }
    double& operator()(int r, int c) { return data_[static_cast<std::size_t>(r) * cols_ + c]; }
    double operator()(int r, int c) const { return data_[static_cast<std::size_t>(r) * cols_ + c]; }

    [[nodiscard]] std::span<const double> row(int r) const {
        return {data_.data() + static_cast<std::size_t>(r) * cols_, static_cast<std::size_t>(cols_)};
    }
    [[nodiscard]] std::span<double> row(int r) {
        return {data_.data() + static_cast<std::size_t>(r) * cols_, static_cast<std::size_t>(cols_)};
    }
    void set_row(int r, std::span<const double> v) {
        FSI_REQUIRE(static_cast<int>(v.size()) == cols_, DimensionError, "Table::set_row: size mismatch");
        std::copy(v.begin(), v.end(), row(r).begin());
    }
    [[nodiscard]] const std::vector<double>& data() const { return data_; }

    friend bool operator==(const Table&, const Table&) = default;

private:
    int rows_ = 0;
    int cols_ = 0;
    std::vector<double> data_;
};

/// Up to three (offset, coefficient) pairs of a 1D first-derivative stencil.
struct Stencil1D {
    int size = 0;
    int index[3]{};
    double coeff[3]{};
};

/// Second-order first derivative at node i of 0..N: centered inside, one-sided at the ends.
inline Stencil1D first_derivative_stencil(int i, int N, double dx) {
    const double s = 0.5 / dx;
    if (i == 0) return {3, {0, 1, 2}, {-3.0 * s, 4.0 * s, -1.0 * s}};
    if (i == N) return {3, {N - 2, N - 1, N}, {1.0 * s, -4.0 * s, 3.0 * s}};
    return {2, {i - 1, i + 1}, {-s, s}};
}

/// Summation-by-parts partner of the trapezoid rule: centered inside, (f1 - f0)/dx at the ends.
/// W D + D^T W = diag(-1, 0, ..., 0, 1) holds exactly.
inline Stencil1D sbp_derivative_stencil(int i, int N, double dx) {
    if (i == 0) return {2, {0, 1}, {-1.0 / dx, 1.0 / dx}};
    if (i == N) return {2, {N - 1, N}, {-1.0 / dx, 1.0 / dx}};
    const double s = 0.5 / dx;
    return {2, {i - 1, i + 1}, {-s, s}};
}

/// Nodal derivative along y1 of a 2D field.
inline Field d_dy1(const Grid2D& g, std::span<const double> f) {
    FSI_REQUIRE(static_cast<int>(f.size()) == g.nodes(), DimensionError, "d_dy1: field size does not match grid");
    Field out(f.size());
    for (int i = 0; i < g.n1(); ++i) {
        const Stencil1D st = first_derivative_stencil(i, g.N1, g.d1());
        for (int j = 0; j < g.n2(); ++j) {
            double v = 0.0;
            for (int k = 0; k < st.size; ++k) v += st.coeff[k] * f[g.idx(st.index[k], j)];
            out[g.idx(i, j)] = v;
        }
    }
    return out;
}

/// Nodal derivative along y2 of a 2D field.
inline Field d_dy2(const Grid2D& g, std::span<const double> f) {
    FSI_REQUIRE(static_cast<int>(f.size()) == g.nodes(), DimensionError, "d_dy2: field size does not match grid");
    Field out(f.size());
    for (int j = 0; j < g.n2(); ++j) {
        const Stencil1D st = first_derivative_stencil(j, g.N2, g.d2());
        for (int i = 0; i < g.n1(); ++i) {
            double v = 0.0;
            for (int k = 0; k < st.size; ++k) v += st.coeff[k] * f[g.idx(i, st.index[k])];
            out[g.idx(i, j)] = v;
        }
    }
    return out;
}

/// Trapezoidal integral over D.
inline double integrate(const Grid2D& g, std::span<const double> f) {
    FSI_REQUIRE(static_cast<int>(f.size()) == g.nodes(), DimensionError, "integrate: field size does not match grid");
    double s = 0.0;
    for (int i = 0; i < g.n1(); ++i)
        for (int j = 0; j < g.n2(); ++j) s += g.weight(i, j) * f[g.idx(i, j)];
    return s;
}

/// Trapezoidal integral over [0, L].
inline double integrate(const Grid1D& g, std::span<const double> f) {
    FSI_REQUIRE(static_cast<int>(f.size()) == g.nodes(), DimensionError, "integrate: field size does not match grid");
    double s = 0.0;
    for (int i = 0; i < g.nodes(); ++i) s += g.weight(i) * f[i];
    return s;
}

inline double l2_norm(const Grid1D& g, std::span<const double> f) {
    double s = 0.0;
    for (int i = 0; i < g.nodes(); ++i) s += g.weight(i) * f[i] * f[i];
    return std::sqrt(s);
}

inline double l2_norm(const Grid2D& g, std::span<const double> f) {
    FSI_REQUIRE(static_cast<int>(f.size()) == g.nodes(), DimensionError, "l2_norm: field size does not match grid");
    double s = 0.0;
    for (int i = 0; i < g.n1(); ++i)
        for (int j = 0; j < g.n2(); ++j) s += g.weight(i, j) * f[g.idx(i, j)] * f[g.idx(i, j)];
    return std::sqrt(s);
}

/// Samples f(y1, y2) at all nodes.
template <class F>
Field sample(const Grid2D& g, F&& f) {
    Field out(static_cast<std::size_t>(g.nodes()));
    for (int i = 0; i < g.n1(); ++i)
        for (int j = 0; j < g.n2(); ++j) out[g.idx(i, j)] = f(g.y1(i), g.y2(j));
    return out;
}

template <class F>
Field sample(const Grid1D& g, F&& f) {
    Field out(static_cast<std::size_t>(g.nodes()));
    for (int i = 0; i < g.nodes(); ++i) out[i] = f(g.x(i));
    return out;
}

/// Least-squares slope of log(err) against log(h).
inline double fitted_order(std::span<const double> h, std::span<const double> err) {
    FSI_REQUIRE(h.size() == err.size() && h.size() >= 2, DimensionError, "fitted_order: need >= 2 matching samples");
    double mx = 0, my = 0;
    const auto n = static_cast<double>(h.size());
    for (std::size_t k = 0; k < h.size(); ++k) {
        mx += std::log(h[k]);
        my += std::log(err[k]);
    }
    mx /= n;
    my /= n;
    double sxy = 0, sxx = 0;
    for (std::size_t k = 0; k < h.size(); ++k) {
        const double dx = std::log(h[k]) - mx;
        sxy += dx * (std::log(err[k]) - my);
        sxx += dx * dx;
    }
    return sxy / sxx;
}

}  // namespace fsi
