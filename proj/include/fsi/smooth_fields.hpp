#pragma once

#include <array>
#include <cmath>
#include <random>

#include "fsi/dual.hpp"
#include "fsi/geometry.hpp"
#include "fsi/operators.hpp"

namespace fsi {

/// Random smooth wall h(y1, t) = c0 + sum_m a_m sin(k_m y1 + p_m) + t b cos(k_t y1 + p_t),
/// with every derivative available for any scalar type.
struct SmoothWall {
    double c0 = 1.0;
    std::array<double, 3> a{}, k{}, p{};
    double b = 0.0, kt = 1.0, pt = 0.0;

    template <class Rng>
    static SmoothWall random(Rng& rng, double base = 1.0, double amp = 0.1) {
        std::uniform_real_distribution<double> u(-1.0, 1.0), kk(0.5, 4.0), ph(0.0, 2.0 * kPi);
        SmoothWall w;
        w.c0 = base;
        for (int m = 0; m < 3; ++m) {
            w.a[m] = amp * u(rng) / 3.0;
            w.k[m] = kk(rng);
            w.p[m] = ph(rng);
        }
        w.b = amp * u(rng);
        w.kt = kk(rng);
        w.pt = ph(rng);
        return w;
    }

    template <class T>
    PointData<T> at(const T& y, const T& t) const {
        using std::cos, std::sin;
        PointData<T> r;
        r.h = T(c0);
        r.h_y1 = T(0.0);
        r.h_y1y1 = T(0.0);
        for (int m = 0; m < 3; ++m) {
            const T arg = k[m] * y + p[m];
            r.h = r.h + a[m] * sin(arg);
            r.h_y1 = r.h_y1 + a[m] * k[m] * cos(arg);
            r.h_y1y1 = r.h_y1y1 - a[m] * k[m] * k[m] * sin(arg);
        }
        const T argt = kt * y + pt;
        r.h = r.h + t * b * cos(argt);
        r.h_y1 = r.h_y1 - t * b * kt * sin(argt);
        r.h_y1y1 = r.h_y1y1 - t * b * kt * kt * cos(argt);
        r.h_t = b * cos(argt);
        r.h_ty1 = -(b * kt * sin(argt));
        return r;
    }
};

/// Random smooth velocity field v(y1, y2, t); each component is a sum of two separable modes.
struct SmoothVelocity {
    std::array<double, 2> A{}, a{}, b{}, c{}, d{}, e{};
    std::array<double, 2> B{}, f{}, g{}, m{}, n{}, s{};

    template <class Rng>
    static SmoothVelocity random(Rng& rng) {
        std::uniform_real_distribution<double> u(-1.0, 1.0), kk(0.5, 3.0), ph(0.0, 2.0 * kPi);
        SmoothVelocity v;
        for (int i = 0; i < 2; ++i) {
            v.A[i] = u(rng);
            v.a[i] = kk(rng);
            v.b[i] = ph(rng);
            v.c[i] = kk(rng);
            v.d[i] = ph(rng);
            v.e[i] = u(rng);
            v.B[i] = u(rng);
            v.f[i] = kk(rng);
            v.g[i] = ph(rng);
            v.m[i] = kk(rng);
            v.n[i] = ph(rng);
            v.s[i] = u(rng);
        }
        return v;
    }

    template <class T>
    Vec2T<T> at(const T& y1, const T& y2, const T& t) const {
        using std::cos, std::sin;
        Vec2T<T> r;
        for (int i = 0; i < 2; ++i) {
            const T ci = A[i] * sin(a[i] * y1 + b[i]) * cos(c[i] * y2 + d[i]) * (1.0 + e[i] * t) +
                         B[i] * cos(f[i] * y1 + g[i]) * sin(m[i] * y2 + n[i]) * (1.0 + s[i] * t);
            r[i] = ci;
        }
        return r;
    }
};

/// A SmoothVelocity multiplied by cut-offs so that v1 = 0 on y2 = 1 and v2 = 0 on y1 = 0, L and y2 = 0.
struct SmoothVField {
    SmoothVelocity base;
    double L = 1.0;

    template <class T>
    Vec2T<T> at(const T& y1, const T& y2, const T& t) const {
        using std::sin;
        const Vec2T<T> v = base.at(y1, y2, t);
        return {(1.0 - y2 * y2) * v.x, sin(kPi / L * y1) * y2 * v.y};
    }
};

/// Wall r + a (1 - cos(2 pi y1 / L)) / 2, flat at both ends; any scalar type.
struct BumpWall {
    double r = 1.0, a = 0.0, L = 1.0;

    template <class T>
    PointData<T> at(const T& y1) const {
        using std::cos, std::sin;
        const double k = 2.0 * kPi / L;
        PointData<T> p;
        p.h = r + 0.5 * a * (1.0 - cos(k * y1));
        p.h_y1 = 0.5 * a * k * sin(k * y1);
        p.h_y1y1 = 0.5 * a * k * k * cos(k * y1);
        p.h_t = T(0.0);
        p.h_ty1 = T(0.0);
        return p;
    }
    [[nodiscard]] R0Profile profile() const { return R0Profile::bump(r, a, L); }
};

/// Transformed velocity from the stream function Psi = (cos(pi y1/L) + c) (y2^2 - 2 y2^3/3):
/// u1 = Psi_2 / h, u2 = -Psi_1 + y2 h' Psi_2 / h. It is div_h-free and lies in V when h' vanishes at both ends.
struct StreamFlow {
    BumpWall wall;
    double c = 0.0;
    double amp = 1.0;

    template <class T>
    Vec2T<T> at(const T& y1, const T& y2, const T& = T(0.0)) const {
        using std::cos, std::sin;
        const double k = kPi / wall.L;
        const PointData<T> h = wall.at(y1);
        const T g = amp * (cos(k * y1) + c), gp = -(amp * k * sin(k * y1));
        const T p = y2 * y2 - (2.0 / 3.0) * y2 * y2 * y2, pp = 2.0 * y2 - 2.0 * y2 * y2;
        return {g * pp / h.h, -(gp * p) + y2 * h.h_y1 * g * pp / h.h};
    }
};

using Dual3 = Dual<3>;

/// Samples a field family on the grid at time t.
template <class Family>
VectorField sample_field(const Grid2D& g, const Family& f, double t = 0.0) {
    VectorField v = VectorField::zero(g);
    for (int i = 0; i < g.n1(); ++i)
        for (int j = 0; j < g.n2(); ++j) {
            const Vec2 u = f.template at<double>(g.y1(i), g.y2(j), t);
            v.c1[g.idx(i, j)] = u.x;
            v.c2[g.idx(i, j)] = u.y;
        }
    return v;
}

template <class Wall>
WallSnapshot sample_wall(const Grid2D& g, const Wall& w) {
    WallSnapshot s{Field(g.n1()), Field(g.n1())};
    for (int i = 0; i < g.n1(); ++i) {
        const auto p = w.template at<double>(g.y1(i));
        s.h[i] = p.h;
        s.h_y1[i] = p.h_y1;
    }
    return s;
}

/// Velocity and gradient at (y1, y2, t) by forward differentiation; also returns d/dt of u.
template <class Field2>
PointVelocity<double> velocity_with_gradient(const Field2& v, double y1, double y2, double t, Vec2* u_t = nullptr) {
    const Vec2T<Dual3> w = v.template at<Dual3>(Dual3::variable(y1, 0), Dual3::variable(y2, 1), Dual3::variable(t, 2));
    PointVelocity<double> pv;
    pv.u = {w.x.v, w.y.v};
    pv.grad = Mat2::of(w.x.d[0], w.x.d[1], w.y.d[0], w.y.d[1]);
    if (u_t) *u_t = {w.x.d[2], w.y.d[2]};
    return pv;
}

}  // namespace fsi
