#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <random>

#include "fsi/structure.hpp"

using namespace fsi;

namespace {

WallParams flat_params(const Grid1D& g, double a = 1.0, double b = 1.0, double c = 0.01, double E = 1.0) {
    WallParams p{a, b, c, Field(g.nodes(), E), Field(g.nodes(), 0.0)};
    return p;
}

}  // namespace

TEST(StepWall, ZeroStaysZero) {
    const Grid1D g(6.0, 32);
    const WallParams p = flat_params(g);
    WallState w = WallState::zero(g);
    const Field u2(g.nodes(), 0.0);
    for (int n = 0; n < 5; ++n) w = step_wall(w, u2, p, g, 10.0, 0.01);
    for (int i = 0; i < g.nodes(); ++i) {
        EXPECT_EQ(w.eta[i], 0.0);
        EXPECT_EQ(w.sigma[i], 0.0);
    }
    EXPECT_NEAR(w.t, 0.05, 1e-15);
}

TEST(StepWall, RejectsBadInput) {
    const Grid1D g(1.0, 8);
    const WallParams p = flat_params(g);
    const WallState w = WallState::zero(g);
    EXPECT_THROW(step_wall(w, Field(3, 0.0), p, g, 1.0, 0.1), DimensionError);
    EXPECT_THROW(step_wall(w, Field(g.nodes(), 0.0), p, g, 1.0, 0.0), DomainError);
    WallParams bad = p;
    bad.c = 0.0;
    EXPECT_THROW(step_wall(w, Field(g.nodes(), 0.0), bad, g, 1.0, 0.1), DomainError);
}

// -a eta'' + b eta = f/E for eta* = A(1 - cos(2 pi y / L)): f = E A (-a k^2 cos(k y) + b (1 - cos(k y))).
TEST(SteadyWall, ManufacturedSolutionSecondOrder) {
    const double L = 2.0, A = 0.3, a = 1.3, b = 0.7, E = 2.0, k = 2.0 * kPi / L;
    std::vector<double> hs, errs;
    for (int N : {16, 32, 64, 128}) {
        const Grid1D g(L, N);
        const WallParams p = flat_params(g, a, b, 0.01, E);
        Field f(g.nodes()), exact(g.nodes());
        for (int i = 0; i < g.nodes(); ++i) {
            const double y = g.x(i);
            f[i] = E * A * (-a * k * k * std::cos(k * y) + b * (1.0 - std::cos(k * y)));
            exact[i] = A * (1.0 - std::cos(k * y));
        }
        const Field eta = solve_steady_wall(p, g, f);
        double e = 0.0;
        for (int i = 0; i < g.nodes(); ++i) e = std::max(e, std::abs(eta[i] - exact[i]));
        hs.push_back(g.dx());
        errs.push_back(e);
    }
    EXPECT_NEAR(fitted_order(hs, errs), 2.0, 0.2);
}

// Time stepping converges to the same steady state when the fluid trace is zero and kappa = 0.
TEST(StepWall, RelaxesToSteadyState) {
    const Grid1D g(1.0, 16);
    WallParams p = flat_params(g, 1.0, 2.0, 0.005);
    for (int i = 0; i < g.nodes(); ++i) p.R0_y1y1[i] = -1.0;
    const Field steady = solve_steady_wall(p, g, Field(g.nodes(), 0.0));
    WallState w = WallState::zero(g);
    for (int n = 0; n < 8000; ++n) w = step_wall(w, Field(g.nodes(), 0.0), p, g, 0.0, 0.05);
    for (int i = 0; i < g.nodes(); ++i) EXPECT_NEAR(w.eta[i], steady[i], 1e-8);
}

TEST(StepWall, EnergyNonIncreasingWithoutForcing) {
    const Grid1D g(6.0, 48);
    const WallParams p = flat_params(g, 1.0, 1.0, 0.01, 1.5);
    WallState w = WallState::zero(g);
    for (int i = 0; i < g.nodes(); ++i) w.eta[i] = 0.1 * (1.0 - std::cos(2.0 * kPi * g.x(i) / 6.0));
    double e = wall_energy(w, p, g);
    for (int n = 0; n < 200; ++n) {
        w = step_wall(w, Field(g.nodes(), 0.0), p, g, 0.0, 0.02);
        const double en = wall_energy(w, p, g);
        EXPECT_LE(en, e * (1.0 + 1e-12) + 1e-15) << "step " << n;
        e = en;
    }
}

TEST(WallOperators, BiharmonicIsSymmetricPositiveDefinite) {
    for (int N : {3, 4, 9, 20}) {
        const Grid1D g(1.0, N);
        const WallOperators op(g);
        const Eigen::MatrixXd B(op.B4), K(op.K2);
        EXPECT_LT((B - B.transpose()).cwiseAbs().maxCoeff(), 1e-9 * B.cwiseAbs().maxCoeff());
        const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eb(B), ek(K);
        EXPECT_GT(eb.eigenvalues().minCoeff(), 0.0) << "N = " << N;
        EXPECT_GT(ek.eigenvalues().minCoeff(), 0.0) << "N = " << N;
    }
}

TEST(WallEnergy, Examples) {
    const Grid1D g(2.0, 4);
    const WallParams p = flat_params(g, 3.0, 5.0, 0.1, 2.0);
    WallState w = WallState::zero(g);
    EXPECT_EQ(wall_energy(w, p, g), 0.0);
    // only sigma: 1/2 * sum w E sigma^2 with sigma = 1 at interior nodes (weights 0.5 each)
    for (int i = 1; i < 4; ++i) w.sigma[i] = 1.0;
    EXPECT_NEAR(wall_energy(w, p, g), 0.5 * 3 * 0.5 * 2.0, 1e-14);
    // eta hat: 1 at node 2 only; edges (1,2) and (2,3) contribute (1)^2/0.5 each
    w = WallState::zero(g);
    w.eta[2] = 1.0;
    EXPECT_NEAR(wall_energy(w, p, g), 0.5 * 3.0 * 2.0 * (2.0 / 0.5) + 0.5 * 5.0 * 0.5 * 2.0, 1e-13);
}

TEST(WallEnergy, QuadraticScaling) {
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const Grid1D g(3.0, 20);
    const WallParams p = flat_params(g, 1.2, 0.4, 0.1, 1.7);
    for (int trial = 0; trial < 20; ++trial) {
        WallState w = WallState::zero(g);
        for (int i = 1; i < g.N; ++i) w.eta[i] = u(rng), w.sigma[i] = u(rng);
        const double s = 1.0 + 3.0 * std::abs(u(rng));
        WallState ws = w;
        for (auto& v : ws.eta) v *= s;
        for (auto& v : ws.sigma) v *= s;
        EXPECT_NEAR(wall_energy(ws, p, g), s * s * wall_energy(w, p, g), 1e-12 * s * s * wall_energy(w, p, g));
    }
}

// With kappa the wall is pulled towards the fluid trace; the mismatch decreases as kappa grows.
TEST(StepWall, MismatchDecreasesWithKappa) {
    const Grid1D g(1.0, 32);
    const WallParams p = flat_params(g);
    Field u2(g.nodes());
    for (int i = 0; i < g.nodes(); ++i) u2[i] = std::sin(kPi * g.x(i));
    double prev = std::numeric_limits<double>::infinity();
    for (double kappa : {1.0, 10.0, 100.0, 1000.0, 1e4}) {
        const WallState w = step_wall(WallState::zero(g), u2, p, g, kappa, 0.01);
        Field d(g.nodes());
        for (int i = 0; i < g.nodes(); ++i) d[i] = w.sigma[i] - u2[i];
        const double m = l2_norm(g, d);
        EXPECT_LT(m, prev) << "kappa " << kappa;
        prev = m;
    }
}

TEST(StepWall, DisplacementIsIntegralOfVelocity) {
    const Grid1D g(2.0, 24);
    const WallParams p = flat_params(g, 1.0, 1.0, 0.02);
    WallState w = WallState::zero(g);
    for (int i = 0; i < g.nodes(); ++i) w.eta[i] = 0.05 * std::sin(kPi * g.x(i) / 2.0);
    const Field eta0 = w.eta;
    Field integral(g.nodes(), 0.0);
    const double dt = 0.01;
    for (int n = 0; n < 50; ++n) {
        w = step_wall(w, Field(g.nodes(), 0.0), p, g, 0.0, dt);
        for (int i = 0; i < g.nodes(); ++i) integral[i] += dt * w.sigma[i];
    }
    for (int i = 0; i < g.nodes(); ++i) EXPECT_NEAR(w.eta[i], eta0[i] + integral[i], 1e-13);
    EXPECT_EQ(w.eta.front(), 0.0);
    EXPECT_EQ(w.eta.back(), 0.0);
}

TEST(WallParams, MakeUsesSlope) {
    const Grid1D g(2.0, 8);
    const WallParams p = WallParams::make(g, 1.0, 1.0, 0.1, 2.0, 3.0, 0.5, R0Profile::sine(1.0, 0.2, 2.0));
    for (int i = 0; i < g.nodes(); ++i) {
        const double s = 0.2 * kPi / 2.0 * std::cos(kPi * g.x(i) / 2.0);
        EXPECT_NEAR(p.Estiff[i], 3.0 * std::sqrt(1.0 + s * s), 1e-14);
        EXPECT_NEAR(p.R0_y1y1[i], -0.2 * std::pow(kPi / 2.0, 2) * std::sin(kPi * g.x(i) / 2.0), 1e-13);
    }
}
