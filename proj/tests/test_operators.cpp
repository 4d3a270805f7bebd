#include <gtest/gtest.h>

#include <random>

#include "fsi/operators.hpp"
#include "fsi/smooth_fields.hpp"

using namespace fsi;

namespace {

VectorField field_of(const Grid2D& g, double (*f1)(double, double), double (*f2)(double, double)) {
    return {sample(g, f1), sample(g, f2)};
}

VectorField random_field(const Grid2D& g, std::mt19937& rng) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    VectorField v = VectorField::zero(g);
    for (auto& x : v.c1) x = u(rng);
    for (auto& x : v.c2) x = u(rng);
    return v;
}

WallSnapshot random_wall(const Grid2D& g, std::mt19937& rng) {
    std::uniform_real_distribution<double> u(0.5, 1.5), s(-0.5, 0.5);
    WallSnapshot w{Field(g.n1()), Field(g.n1())};
    for (auto& x : w.h) x = u(rng);
    for (auto& x : w.h_y1) x = s(rng);
    return w;
}

double max_abs(const Field& f) {
    double m = 0;
    for (double v : f) m = std::max(m, std::abs(v));
    return m;
}

}  // namespace

TEST(DivH, LinearFieldOnUnitWallIsFree) {
    const Grid2D g(2.0, 8, 6);
    const auto u = field_of(g, [](double y1, double) { return y1; }, [](double, double y2) { return -y2; });
    EXPECT_LT(max_abs(div_h_field(g, u, WallSnapshot::flat(g, 1.0))), 1e-13);
}

TEST(DivH, VerticalStretchOnDoubleWall) {
    const Grid2D g(1.0, 8, 8);
    const auto u = field_of(g, [](double, double) { return 0.0; }, [](double, double y2) { return y2; });
    for (double v : div_h_field(g, u, WallSnapshot::flat(g, 2.0))) EXPECT_NEAR(v, 0.5, 1e-13);
}

TEST(DivH, ManufacturedFreeFieldConvergesAtSecondOrder) {
    std::vector<double> hs, err;
    const StreamFlow flow{{1.0, 0.3, 2.0}, 0.5};
    for (int N : {16, 32, 64}) {
        const Grid2D g(2.0, N, N);
        const double e = l2_norm(g, div_h_field(g, sample_field(g, flow), sample_wall(g, flow.wall)));
        hs.push_back(g.d1());
        err.push_back(e);
    }
    EXPECT_NEAR(fitted_order(hs, err), 2.0, 0.3);
}

TEST(DivH, RejectsMismatchedSizes) {
    const Grid2D g(1.0, 8, 8), f(1.0, 4, 4);
    EXPECT_THROW(div_h_field(g, VectorField::zero(f), WallSnapshot::flat(g, 1.0)), DimensionError);
    EXPECT_THROW(div_h_field(g, VectorField::zero(g), WallSnapshot::flat(f, 1.0)), DimensionError);
}

TEST(DefTensor, ShearOnUnitWall) {
    const Grid2D g(1.0, 6, 6);
    const auto e = def_tensor_field(g, field_of(g, [](double, double y2) { return y2; }, [](double, double) { return 0.0; }),
                                    WallSnapshot::flat(g, 1.0));
    for (int k = 0; k < g.nodes(); ++k) {
        EXPECT_NEAR(e.e11[k], 0.0, 1e-13);
        EXPECT_NEAR(e.e12[k], 0.5, 1e-13);
        EXPECT_NEAR(e.e22[k], 0.0, 1e-13);
    }
}

TEST(DefTensor, StretchOnUnitWall) {
    const Grid2D g(1.0, 6, 6);
    const auto e = def_tensor_field(g, field_of(g, [](double y1, double) { return y1; }, [](double, double y2) { return -y2; }),
                                    WallSnapshot::flat(g, 1.0));
    for (int k = 0; k < g.nodes(); ++k) {
        EXPECT_NEAR(e.e11[k], 1.0, 1e-13);
        EXPECT_NEAR(e.e12[k], 0.0, 1e-13);
        EXPECT_NEAR(e.e22[k], -1.0, 1e-13);
    }
}

TEST(DefTensor, FactorizationWithSharedGradient) {
    std::mt19937 rng(5);
    const Grid2D g(1.5, 12, 10);
    for (int trial = 0; trial < 5; ++trial) {
        const auto u = random_field(g, rng);
        const auto w = random_wall(g, rng);
        const auto e = def_tensor_field(g, u, w);
        const auto grad = gradient_field(g, u);
        for (int i = 0; i < g.n1(); ++i)
            for (int j = 0; j < g.n2(); ++j) {
                const int k = g.idx(i, j);
                const Mat2 f = def_tensor_point(grad.at(k), f_matrix(w.h[i], w.h_y1[i], g.y2(j)));
                EXPECT_LT(std::abs(f(0, 0) - e.e11[k]), 1e-12);
                EXPECT_LT(std::abs(f(0, 1) - e.e12[k]), 1e-12);
                EXPECT_LT(std::abs(f(1, 0) - e.e12[k]), 1e-12);
                EXPECT_LT(std::abs(f(1, 1) - e.e22[k]), 1e-12);
            }
    }
}

TEST(DefTensor, ConvergesToAnalyticFactorization) {
    std::mt19937 rng(8);
    const SmoothVelocity v = SmoothVelocity::random(rng);
    const BumpWall wall{1.0, 0.4, 1.0};
    std::vector<double> hs, err;
    for (int N : {16, 32, 64}) {
        const Grid2D g(1.0, N, N);
        const auto e = def_tensor_field(g, sample_field(g, v), sample_wall(g, wall));
        Field diff(g.nodes());
        for (int i = 0; i < g.n1(); ++i)
            for (int j = 0; j < g.n2(); ++j) {
                const int k = g.idx(i, j);
                const auto p = wall.at(g.y1(i));
                const auto pv = velocity_with_gradient(v, g.y1(i), g.y2(j), 0.0);
                const Mat2 x = def_tensor_point(pv.grad, f_matrix(p.h, p.h_y1, g.y2(j)));
                diff[k] = std::max({std::abs(x(0, 0) - e.e11[k]), std::abs(x(0, 1) - e.e12[k]),
                                    std::abs(x(1, 1) - e.e22[k])});
            }
        hs.push_back(g.d1());
        err.push_back(max_abs(diff));
    }
    EXPECT_NEAR(fitted_order(hs, err), 2.0, 0.3);
}

TEST(ViscousForm, ZeroFieldGivesZero) {
    const Grid2D g(1.0, 6, 6);
    EXPECT_EQ(viscous_form(g, VectorField::zero(g), VectorField::zero(g), WallSnapshot::flat(g, 1.3), 0.7), 0.0);
}

TEST(ViscousForm, ShearClosedForm) {
    for (double L : {1.0, 2.5}) {
        const Grid2D g(L, 8, 8);
        const auto u = field_of(g, [](double, double y2) { return y2; }, [](double, double) { return 0.0; });
        EXPECT_NEAR(viscous_form(g, u, u, WallSnapshot::flat(g, 1.0), 1.0), L / 2.0, 1e-13);
    }
}

TEST(ViscousForm, SymmetricAndNonnegative) {
    std::mt19937 rng(12);
    const Grid2D g(1.0, 10, 8);
    for (int trial = 0; trial < 10; ++trial) {
        const auto u = random_field(g, rng), p = random_field(g, rng);
        const auto w = random_wall(g, rng);
        EXPECT_LT(std::abs(viscous_form(g, u, p, w, 0.3) - viscous_form(g, p, u, w, 0.3)), 1e-13);
        EXPECT_GE(viscous_form(g, u, u, w, 0.3), 0.0);
    }
}

TEST(ConvectiveForm, ZeroTransportGivesZero) {
    std::mt19937 rng(1);
    const Grid2D g(1.0, 8, 8);
    const auto z = random_field(g, rng), p = random_field(g, rng);
    EXPECT_EQ(convective_form(g, VectorField::zero(g), z, p, random_wall(g, rng), 1.0, 1.0), 0.0);
}

TEST(ConvectiveForm, ConstantFieldOnlyBoundaryTerms) {
    // z constant: the volume gradient term vanishes; with u1 = 0 on S_in/S_out and u2 = 0 on S_w the
    // boundary corrections vanish too
    std::mt19937 rng(2);
    const Grid2D g(1.0, 8, 8);
    auto u = random_field(g, rng);
    for (int j = 0; j < g.n2(); ++j) u.c1[g.idx(0, j)] = u.c1[g.idx(g.N1, j)] = 0.0;
    for (int i = 0; i < g.n1(); ++i) u.c2[g.idx(i, g.N2)] = 0.0;
    const VectorField z{Field(g.nodes(), 0.7), Field(g.nodes(), -0.2)};
    EXPECT_NEAR(convective_form(g, u, z, random_field(g, rng), random_wall(g, rng), 1.1, 0.9), 0.0, 1e-13);
}

TEST(ConvectiveForm, LinearInEachSlot) {
    std::mt19937 rng(4);
    const Grid2D g(1.0, 8, 8);
    const auto w = random_wall(g, rng);
    const auto u = random_field(g, rng), z = random_field(g, rng), p = random_field(g, rng);
    const double base = convective_form(g, u, z, p, w, 1.0, 1.2);
    auto scaled = [](VectorField f, double c) {
        for (auto& x : f.c1) x *= c;
        for (auto& x : f.c2) x *= c;
        return f;
    };
    for (double c : {-2.0, 0.5, 3.0}) {
        EXPECT_NEAR(convective_form(g, scaled(u, c), z, p, w, 1.0, 1.2), c * base, 1e-12 * std::abs(base) * 4);
        EXPECT_NEAR(convective_form(g, u, scaled(z, c), p, w, 1.0, 1.2), c * base, 1e-12 * std::abs(base) * 4);
        EXPECT_NEAR(convective_form(g, u, z, scaled(p, c), w, 1.0, 1.2), c * base, 1e-12 * std::abs(base) * 4);
    }
}

TEST(ConvectiveForm, SkewPropertyConvergesAtSecondOrder) {
    std::mt19937 rng(21);
    const StreamFlow flow{{1.0, 0.25, 1.0}, 0.3};
    const SmoothVField z{SmoothVelocity::random(rng), 1.0}, p{SmoothVelocity::random(rng), 1.0};
    std::vector<double> hs, err;
    for (int N : {16, 32, 64}) {
        const Grid2D g(1.0, N, N);
        const auto w = sample_wall(g, flow.wall);
        const auto U = sample_field(g, flow), Z = sample_field(g, z), P = sample_field(g, p);
        const double r0 = flow.wall.r;
        err.push_back(std::abs(convective_form(g, U, Z, P, w, r0, r0) - skew_convective_form(g, U, Z, P, w)));
        hs.push_back(g.d1());
    }
    EXPECT_NEAR(fitted_order(hs, err), 2.0, 0.3);
}

TEST(PressureForm, ConstantsAreTheKernel) {
    std::mt19937 rng(6);
    const Grid2D g(1.0, 8, 6);
    const auto w = random_wall(g, rng);
    std::uniform_real_distribution<double> u(-1, 1);
    Field phi(g.nodes());
    for (auto& x : phi) x = u(rng);
    EXPECT_NEAR(pressure_form(g, Field(g.nodes(), 3.0), phi, w, 0.5), 0.0, 1e-12);
}

TEST(PressureForm, LinearFieldGivesArea) {
    for (double L : {1.0, 3.0}) {
        const Grid2D g(L, 8, 4);
        const Field q = sample(g, [](double y1, double) { return y1; });
        EXPECT_NEAR(pressure_form(g, q, q, WallSnapshot::flat(g, 1.0), 1.0), L, 1e-12);
    }
}

TEST(PressureForm, SymmetricAndSemidefinite) {
    std::mt19937 rng(9);
    const Grid2D g(1.0, 8, 8);
    std::uniform_real_distribution<double> u(-1, 1);
    for (int trial = 0; trial < 10; ++trial) {
        const auto w = random_wall(g, rng);
        Field a(g.nodes()), b(g.nodes());
        for (auto& x : a) x = u(rng);
        for (auto& x : b) x = u(rng);
        EXPECT_LT(std::abs(pressure_form(g, a, b, w, 0.1) - pressure_form(g, b, a, w, 0.1)), 1e-13);
        EXPECT_GE(pressure_form(g, a, a, w, 0.1), 0.0);
    }
}
