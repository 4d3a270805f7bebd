#pragma once

#include <array>
#include <cmath>

namespace fsi {

/// Forward-mode dual number carrying N directional derivatives.
template <int N>
struct Dual {
    double v = 0.0;
    std::array<double, N> d{};

    constexpr Dual() = default;
    constexpr Dual(double value) : v(value) {}  // NOLINT: implicit promotion of constants is intended
    constexpr Dual(double value, std::array<double, N> grad) : v(value), d(grad) {}

    /// Independent variable number k with value x.
    static constexpr Dual variable(double x, int k) {
        Dual r(x);
        r.d[k] = 1.0;
        return r;
    }

    constexpr Dual operator-() const {
        Dual r(-v);
        for (int k = 0; k < N; ++k) r.d[k] = -d[k];
        return r;
    }
    constexpr Dual& operator+=(const Dual& o) {
        v += o.v;
        for (int k = 0; k < N; ++k) d[k] += o.d[k];
        return *this;
    }
    constexpr Dual& operator-=(const Dual& o) {
        v -= o.v;
        for (int k = 0; k < N; ++k) d[k] -= o.d[k];
        return *this;
    }
    constexpr Dual& operator*=(const Dual& o) {
        for (int k = 0; k < N; ++k) d[k] = d[k] * o.v + v * o.d[k];
        v *= o.v;
        return *this;
    }
    constexpr Dual& operator/=(const Dual& o) {
        // quotient rule; a / a has exactly zero derivative
        const double den = o.v * o.v;
        for (int k = 0; k < N; ++k) d[k] = (d[k] * o.v - v * o.d[k]) / den;
        v /= o.v;
        return *this;
    }
};

template <int N> constexpr Dual<N> operator+(Dual<N> a, const Dual<N>& b) { return a += b; }
template <int N> constexpr Dual<N> operator-(Dual<N> a, const Dual<N>& b) { return a -= b; }
template <int N> constexpr Dual<N> operator*(Dual<N> a, const Dual<N>& b) { return a *= b; }
template <int N> constexpr Dual<N> operator/(Dual<N> a, const Dual<N>& b) { return a /= b; }
template <int N> constexpr Dual<N> operator+(Dual<N> a, double b) { return a += Dual<N>(b); }
template <int N> constexpr Dual<N> operator-(Dual<N> a, double b) { return a -= Dual<N>(b); }
template <int N> constexpr Dual<N> operator*(Dual<N> a, double b) { return a *= Dual<N>(b); }
template <int N> constexpr Dual<N> operator/(Dual<N> a, double b) { return a /= Dual<N>(b); }
template <int N> constexpr Dual<N> operator+(double a, const Dual<N>& b) { return Dual<N>(a) += b; }
template <int N> constexpr Dual<N> operator-(double a, const Dual<N>& b) { return Dual<N>(a) -= b; }
template <int N> constexpr Dual<N> operator*(double a, const Dual<N>& b) { return Dual<N>(a) *= b; }
template <int N> constexpr Dual<N> operator/(double a, const Dual<N>& b) { return Dual<N>(a) /= b; }

template <int N>
Dual<N> chain(const Dual<N>& x, double f, double df) {
    Dual<N> r(f);
    for (int k = 0; k < N; ++k) r.d[k] = df * x.d[k];
    return r;
}

template <int N> Dual<N> sin(const Dual<N>& x) { return chain(x, std::sin(x.v), std::cos(x.v)); }
template <int N> Dual<N> cos(const Dual<N>& x) { return chain(x, std::cos(x.v), -std::sin(x.v)); }
template <int N> Dual<N> exp(const Dual<N>& x) { return chain(x, std::exp(x.v), std::exp(x.v)); }
template <int N> Dual<N> sqrt(const Dual<N>& x) { return chain(x, std::sqrt(x.v), 0.5 / std::sqrt(x.v)); }

inline constexpr double value_of(double x) { return x; }
template <int N>
constexpr double value_of(const Dual<N>& x) { return x.v; }

}  // namespace fsi
