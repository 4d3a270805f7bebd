/// @file model.hpp
/// @brief Model parameters and the objects built from them (grids, wall parameters, pressures).
#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "fsi/errors.hpp"
#include "fsi/fluid.hpp"
#include "fsi/geometry.hpp"
#include "fsi/grid.hpp"
#include "fsi/structure.hpp"

namespace fsi {

/// Reference radius: constant(r), sine(r, amp) or bump(r, amp) over the channel length.
struct R0Spec {
    std::string kind = "constant";
    double r = 1.0;
    double amp = 0.0;

    [[nodiscard]] R0Profile profile(double L) const {
        if (kind == "constant") return R0Profile::constant(r);
        if (kind == "sine") return R0Profile::sine(r, amp, L);
        if (kind == "bump") return R0Profile::bump(r, amp, L);
        throw ConfigError("R0 kind must be constant, sine or bump (got '" + kind + "')");
    }
    [[nodiscard]] std::string describe() const {
        std::ostringstream os;
        os.precision(17);
        if (kind == "constant") os << "constant(" << r << ")";
        else os << kind << "(" << r << ", " << amp << ")";
        return os.str();
    }
    friend bool operator==(const R0Spec&, const R0Spec&) = default;
};

/// Time profile of a boundary pressure (uniform along its boundary piece).
struct PressureSpec {
    enum class Kind { constant, pulse, table };
    Kind kind = Kind::constant;
    double value = 0.0;   ///< constant value or pulse amplitude
    double t_rise = 0.0;  ///< pulse: sin^2 ramp length
    double t_fall = 0.0;  ///< pulse: start of the cos^2 decay (same length as the ramp)
    std::string file;     ///< table: path of "t value" lines
    std::vector<std::pair<double, double>> samples;

    static PressureSpec constant(double v) { return {Kind::constant, v, 0.0, 0.0, {}, {}}; }
    static PressureSpec pulse(double amp, double t_rise, double t_fall) { return {Kind::pulse, amp, t_rise, t_fall, {}, {}}; }

    [[nodiscard]] double operator()(double t) const {
        switch (kind) {
            case Kind::constant: return value;
            case Kind::pulse: {
                if (t <= 0.0) return 0.0;
                if (t < t_rise) return value * std::pow(std::sin(0.5 * kPi * t / t_rise), 2);
                if (t <= t_fall) return value;
                if (t < t_fall + t_rise) return value * std::pow(std::cos(0.5 * kPi * (t - t_fall) / t_rise), 2);
                return 0.0;
            }
            case Kind::table: {
                if (t <= samples.front().first) return samples.front().second;
                if (t >= samples.back().first) return samples.back().second;
                const auto it = std::upper_bound(samples.begin(), samples.end(), t,
                                                 [](double x, const auto& s) { return x < s.first; });
                const auto& [t1, v1] = *it;
                const auto& [t0, v0] = *(it - 1);
                return v0 + (v1 - v0) * (t - t0) / (t1 - t0);
            }
        }
        return 0.0;
    }

    void validate(const std::string& name) const {
        FSI_REQUIRE(std::isfinite(value), ConfigError, name + " must be finite");
        if (kind == Kind::pulse) {
            FSI_REQUIRE(t_rise > 0.0, ConfigError, name + ": pulse t_rise must be positive");
            FSI_REQUIRE(t_fall >= t_rise, ConfigError, name + ": pulse t_fall must be >= t_rise");
        }
        if (kind == Kind::table) {
            FSI_REQUIRE(samples.size() >= 1, ConfigError, name + ": pressure table '" + file + "' is empty");
            for (std::size_t k = 1; k < samples.size(); ++k)
                FSI_REQUIRE(samples[k].first > samples[k - 1].first, ConfigError,
                            name + ": pressure table times must increase");
            for (const auto& s : samples)
                FSI_REQUIRE(std::isfinite(s.first) && std::isfinite(s.second), ConfigError,
                            name + ": pressure table values must be finite");
        }
    }

    [[nodiscard]] std::string describe() const {
        std::ostringstream os;
        os.precision(17);
        switch (kind) {
            case Kind::constant: os << "constant(" << value << ")"; break;
            case Kind::pulse: os << "pulse(" << value << ", " << t_rise << ", " << t_fall << ")"; break;
            case Kind::table: os << "table(" << file << ")"; break;
        }
        return os.str();
    }
    friend bool operator==(const PressureSpec&, const PressureSpec&) = default;
};

struct ModelConfig {
    // [physical]
    double rho = 1.0, mu = 0.05;
    double a = 1.0, b = 1.0, c = 0.01;
    double rho_w = 1.0, hbar = 1.0;
    double L = 4.0;
    R0Spec r0;
    // [scheme]
    int N1 = 32, N2 = 8;
    double dt = 0.01, T = 0.2;
    std::optional<double> kappa;  ///< defaults to 1/eps
    double eps = 1e-3;
    double solver_tol = 1e-10;
    double iter_tol = 1e-8;
    int max_iter = 20;
    CouplingMode coupling = CouplingMode::joint;
    // [admissibility]
    std::optional<double> alpha;  ///< defaults to 0.9 min{R_min, 1/(R_min + R_max)}
    double K = 10.0;
    // [pressure] physical pressures; the solver uses q = P / rho
    PressureSpec p_in = PressureSpec::pulse(0.5, 0.05, 1.0);
    PressureSpec p_out = PressureSpec::constant(0.0);
    PressureSpec p_w = PressureSpec::constant(0.0);
    // [output]
    std::string output_dir = "out";
    bool vtk = false;
    int vtk_every = 10;

    [[nodiscard]] double kappa_value() const { return kappa ? *kappa : 1.0 / eps; }

    [[nodiscard]] int steps() const {
        const double n = T / dt;
        const long r = std::lround(n);
        FSI_REQUIRE(r >= 1 && std::abs(n - static_cast<double>(r)) <= 1e-9 * std::max(1.0, n), ConfigError,
                    "T must be a positive integer multiple of dt");
        return static_cast<int>(r);
    }
    [[nodiscard]] std::vector<double> times() const {
        const int n = steps();
        std::vector<double> t(n + 1);
        for (int k = 0; k <= n; ++k) t[k] = k * dt;
        return t;
    }
    [[nodiscard]] Grid2D grid() const { return Grid2D(L, N1, N2); }
    [[nodiscard]] Grid1D wall_grid() const { return Grid1D(L, N1); }
    [[nodiscard]] R0Profile r0_profile() const { return r0.profile(L); }

    [[nodiscard]] WallParams wall_params() const {
        return WallParams::make(wall_grid(), a, b, c, rho, rho_w, hbar, r0_profile());
    }
    [[nodiscard]] SchemeParams scheme() const {
        SchemeParams s;
        s.kappa = kappa_value();
        s.eps = eps;
        s.dt = dt;
        s.solver_tol = solver_tol;
        s.coupling = coupling;
        return s;
    }
    [[nodiscard]] BoundaryPressures pressures() const {
        BoundaryPressures bp;
        const double inv_rho = 1.0 / rho;
        bp.q_in = [p = p_in, inv_rho](double, double t) { return inv_rho * p(t); };
        bp.q_out = [p = p_out, inv_rho](double, double t) { return inv_rho * p(t); };
        bp.q_w = [p = p_w, inv_rho](double, double t) { return inv_rho * p(t); };
        return bp;
    }
    [[nodiscard]] AdmissibilityParams admissibility() const {
        const Grid1D g = wall_grid();
        const Field r = sample(g, r0_profile().value);
        AdmissibilityParams p;
        p.R_min = *std::min_element(r.begin(), r.end());
        p.R_max = *std::max_element(r.begin(), r.end());
        p.alpha = alpha ? *alpha : AdmissibilityParams::default_alpha(p.R_min, p.R_max);
        p.K = K;
        return p;
    }

    /// Re-checks every positivity and consistency constraint; throws ConfigError naming the field.
    void validate() const {
        auto positive = [](double v, const char* name) {
            FSI_REQUIRE(std::isfinite(v) && v > 0.0, ConfigError, std::string(name) + " must be positive");
        };
        positive(rho, "rho");
        positive(mu, "mu");
        positive(a, "a");
        positive(b, "b");
        positive(c, "c");
        positive(rho_w, "rho_w");
        positive(hbar, "hbar");
        positive(L, "L");
        positive(dt, "dt");
        positive(T, "T");
        positive(eps, "eps");
        if (kappa) positive(*kappa, "kappa");
        positive(solver_tol, "solver_tol");
        positive(iter_tol, "iter_tol");
        positive(K, "K");
        FSI_REQUIRE(N1 >= 4, ConfigError, "N1 must be at least 4");
        FSI_REQUIRE(N2 >= 4, ConfigError, "N2 must be at least 4");
        FSI_REQUIRE(max_iter >= 1, ConfigError, "max_iter must be at least 1");
        FSI_REQUIRE(vtk_every >= 1, ConfigError, "vtk_every must be at least 1");
        (void)steps();
        (void)r0_profile();
        const Field r = sample(wall_grid(), r0_profile().value);
        for (double v : r) FSI_REQUIRE(v > 0.0, ConfigError, "R0 must be positive on [0, L]");
        const AdmissibilityParams ap = admissibility();
        FSI_REQUIRE(ap.alpha > 0.0, ConfigError, "alpha must be positive");
        FSI_REQUIRE(ap.alpha < ap.alpha_limit(), ConfigError,
                    "alpha must be below min{R_min, 1/(R_min + R_max)} = " + std::to_string(ap.alpha_limit()));
        p_in.validate("p_in");
        p_out.validate("p_out");
        p_w.validate("p_w");
    }
};

}  // namespace fsi
