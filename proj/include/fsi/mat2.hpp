#pragma once

#include <algorithm>
#include <array>
#include <cmath>

namespace fsi {

template <class T>
struct Vec2T {
    T x{};
    T y{};

    constexpr const T& operator[](int i) const { return i == 0 ? x : y; }
    constexpr T& operator[](int i) { return i == 0 ? x : y; }
};

template <class T>
constexpr Vec2T<T> operator+(const Vec2T<T>& a, const Vec2T<T>& b) { return {a.x + b.x, a.y + b.y}; }
template <class T>
constexpr Vec2T<T> operator-(const Vec2T<T>& a, const Vec2T<T>& b) { return {a.x - b.x, a.y - b.y}; }
template <class T>
constexpr Vec2T<T> operator*(const T& s, const Vec2T<T>& a) { return {s * a.x, s * a.y}; }
template <class T>
constexpr T dot(const Vec2T<T>& a, const Vec2T<T>& b) { return a.x * b.x + a.y * b.y; }

/// Row-major 2x2 matrix; m(i, j) is row i, column j.
template <class T>
struct Mat2T {
    std::array<T, 4> a{};

    static constexpr Mat2T identity() { return of(T(1.0), T(0.0), T(0.0), T(1.0)); }
    static constexpr Mat2T zero() { return of(T(0.0), T(0.0), T(0.0), T(0.0)); }
    static constexpr Mat2T of(T a11, T a12, T a21, T a22) { return {{a11, a12, a21, a22}}; }

    constexpr const T& operator()(int i, int j) const { return a[2 * i + j]; }
    constexpr T& operator()(int i, int j) { return a[2 * i + j]; }

    [[nodiscard]] constexpr Mat2T transpose() const { return of(a[0], a[2], a[1], a[3]); }
    [[nodiscard]] constexpr T det() const { return a[0] * a[3] - a[1] * a[2]; }
    [[nodiscard]] constexpr T trace() const { return a[0] + a[3]; }
    /// Transposed cofactor matrix, so that M * adj(M) = det(M) I.
    [[nodiscard]] constexpr Mat2T adjugate() const { return of(a[3], -a[1], -a[2], a[0]); }
    [[nodiscard]] constexpr Mat2T inverse() const {
        const T d = det();
        return of(a[3] / d, -a[1] / d, -a[2] / d, a[0] / d);
    }
};

template <class T>
constexpr Mat2T<T> operator+(const Mat2T<T>& p, const Mat2T<T>& q) {
    return Mat2T<T>::of(p.a[0] + q.a[0], p.a[1] + q.a[1], p.a[2] + q.a[2], p.a[3] + q.a[3]);
}
template <class T>
constexpr Mat2T<T> operator-(const Mat2T<T>& p, const Mat2T<T>& q) {
    return Mat2T<T>::of(p.a[0] - q.a[0], p.a[1] - q.a[1], p.a[2] - q.a[2], p.a[3] - q.a[3]);
}
template <class T>
constexpr Mat2T<T> operator*(const T& s, const Mat2T<T>& p) {
    return Mat2T<T>::of(s * p.a[0], s * p.a[1], s * p.a[2], s * p.a[3]);
}
template <class T>
constexpr Mat2T<T> operator*(const Mat2T<T>& p, const Mat2T<T>& q) {
    return Mat2T<T>::of(p(0, 0) * q(0, 0) + p(0, 1) * q(1, 0), p(0, 0) * q(0, 1) + p(0, 1) * q(1, 1),
                        p(1, 0) * q(0, 0) + p(1, 1) * q(1, 0), p(1, 0) * q(0, 1) + p(1, 1) * q(1, 1));
}
template <class T>
constexpr Vec2T<T> operator*(const Mat2T<T>& p, const Vec2T<T>& v) {
    return {p(0, 0) * v.x + p(0, 1) * v.y, p(1, 0) * v.x + p(1, 1) * v.y};
}

/// Frobenius inner product A:B.
template <class T>
constexpr T ddot(const Mat2T<T>& p, const Mat2T<T>& q) {
    return p.a[0] * q.a[0] + p.a[1] * q.a[1] + p.a[2] * q.a[2] + p.a[3] * q.a[3];
}

inline double max_abs(const Mat2T<double>& m) {
    double r = 0.0;
    for (double v : m.a) r = std::max(r, std::abs(v));
    return r;
}

using Vec2 = Vec2T<double>;
using Mat2 = Mat2T<double>;

}  // namespace fsi
