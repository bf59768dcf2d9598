#include <doctest.h>

#include <cmath>

#include "kinavg/config.hpp"
#include "kinavg/analysis.hpp"
#include "kinavg/limit.hpp"
#include "test_util.hpp"

using namespace kinavg;
using namespace kinavg::test;

namespace {
AveragedCoefficients coef_1d(double K, double J) {
    AveragedCoefficients c;
    c.K[0][0] = K;
    c.J[0] = J;
    return c;
}
}  // namespace

TEST_CASE("heat decay of a Fourier eigenfunction") {
    const int n = 32;
    Spectrum rho0(1, n);
    rho0.at(1) = 0.5;
    rho0.at(-1) = 0.5;  // cos(2 pi x)
    Spectrum zero(1, n);
    const double T = 0.1;
    LimitTrajectory traj = solve_limit(rho0, coef_1d(1.0, 0.0), zero, T, 1e-3);
    const double factor = std::exp(-4.0 * M_PI * M_PI * T);
    CHECK(traj.back().at(1).real() == doctest::Approx(0.5 * factor).epsilon(1e-12));
    CHECK(std::abs(traj.back().at(1).imag()) < 1e-14);
}

TEST_CASE("constant advection is a Galilean shift") {
    const int n = 32;
    Spectrum rho0(1, n);
    rho0.at(1) = 0.5;
    rho0.at(-1) = 0.5;
    Spectrum zero(1, n);
    const double T = 0.1, c = 0.7;
    LimitTrajectory traj = solve_limit(rho0, coef_1d(1.0, c), zero, T, 1e-3);
    // cos(2 pi (x - cT)) e^{-4 pi^2 T}: coefficient 0.5 e^{-i 2 pi c T} e^{-4 pi^2 T}
    const cplx expect =
        0.5 * std::exp(-4.0 * M_PI * M_PI * T) * std::exp(cplx(0.0, -2.0 * M_PI * c * T));
    CHECK(std::abs(traj.back().at(1) - expect) < 1e-13);
}

TEST_CASE("variable absorption: split scheme against a 10x finer reference") {
    const int n = 64;
    RngStream rng(stream_key(501, 0, 0));
    Spectrum rho0 = random_profile(n, 5, rng, 0.4);
    rho0.at(0) += 1.0;
    Spectrum sb = profile_from_coeffs({1.0, 1.0}, n);  // 1 + cos(2 pi x)
    const double T = 0.05;
    LimitTrajectory coarse = solve_limit(rho0, coef_1d(1.0, 0.3), sb, T, 1e-3);
    LimitTrajectory fine = solve_limit(rho0, coef_1d(1.0, 0.3), sb, T, 1e-4);
    Spectrum diff = coarse.back();
    diff -= fine.back();
    CHECK(l2_norm(diff) / l2_norm(fine.back()) < 1e-6 * 100);  // rel 1e-4 at dt = 1e-3
    LimitTrajectory coarse2 = solve_limit(rho0, coef_1d(1.0, 0.3), sb, T, 5e-4);
    Spectrum diff2 = coarse2.back();
    diff2 -= fine.back();
    // order 2: halving dt cuts the defect by about 4
    CHECK(l2_norm(diff2) < 0.3 * l2_norm(diff));
}

TEST_CASE("exact mode path and splitting path agree for constant sigma") {
    const int n = 64;
    RngStream rng(stream_key(502, 0, 0));
    Spectrum rho0 = random_profile(n, 8, rng);
    Spectrum sc(1, n);
    sc.at(0) = 0.7;
    const double T = 0.2;
    const AveragedCoefficients c = coef_1d(1.0, 0.4);
    LimitTrajectory traj = solve_limit(rho0, c, sc, T, 1e-3, 20);
    const Spectrum exact = limit_exact_constant_sigma(rho0, c, 0.7, T);
    Spectrum diff = traj.back();
    diff -= exact;
    CHECK(l2_norm(diff) < 1e-12);
}

TEST_CASE("L2 norm is nonincreasing with nonnegative absorption") {
    const int n = 64;
    RngStream rng(stream_key(503, 0, 0));
    Spectrum rho0 = random_profile(n, 10, rng);
    Spectrum sb = profile_from_coeffs({1.2, 1.0}, n);  // >= 0.2 > 0
    LimitTrajectory traj = solve_limit(rho0, coef_1d(0.8, -0.5), sb, 0.3, 1e-3, 30);
    double prev = l2_norm(traj.rho.front());
    for (std::size_t i = 1; i < traj.rho.size(); ++i) {
        const double cur = l2_norm(traj.rho[i]);
        CHECK(cur <= prev + 1e-12);
        prev = cur;
    }
}

TEST_CASE("shift-eigenfunction identity for constant sigma") {
    const int n = 32;
    RngStream rng(stream_key(504, 0, 0));
    Spectrum rho0 = random_profile(n, 6, rng);
    const double K = 0.9, J = 0.6, s = 0.5, T = 0.15;
    const Spectrum rhoT = limit_exact_constant_sigma(rho0, coef_1d(K, J), s, T);
    // (rho(T, . + TJ), e_k) = e^{lambda_k T} (rho0, e_k), lambda_k = -4 pi^2 k^2 K - s
    for (int k = -n / 2 + 1; k < n / 2; ++k) {
        const cplx shifted = rhoT.at(k) * std::exp(cplx(0.0, 2.0 * M_PI * k * J * T));
        const double lam = -4.0 * M_PI * M_PI * k * k * K - s;
        CHECK(std::abs(shifted - rho0.at(k) * std::exp(lam * T)) < 1e-12);
    }
}

TEST_CASE("weak residual: exact single-mode trajectory, plug-in value, refinement order") {
    const int n = 32;
    const AveragedCoefficients c = coef_1d(1.0, 0.0);
    Spectrum zero(1, n);

    // exact trajectory, xi a single mode: the weak identity is exact
    {
        Spectrum rho0(1, n);
        rho0.at(2) = cplx(0.4, 0.1);
        rho0.at(-2) = std::conj(rho0.at(2));
        rho0.at(0) = 1.0;
        LimitTrajectory traj = solve_limit(rho0, c, zero, 0.1, 2e-5);
        Spectrum xi(1, n);
        xi.at(2) = cplx(0.5, 0.0);
        xi.at(-2) = 0.5;
        const std::size_t it = traj.t.size() - 1;
        CHECK(weak_residual(traj, c, zero, xi, it % 2 == 0 ? it : it - 1) < 1e-10);
    }

    // constant-in-time trajectory with sigma = 0, J = 0: residual is exactly
    // |t (rho0, div(K grad xi))|
    {
        RngStream rng(stream_key(505, 0, 0));
        Spectrum rho0 = random_profile(n, 5, rng);
        Spectrum xi = random_profile(n, 5, rng);
        LimitTrajectory traj;
        const int steps = 10;
        const double T = 0.2;
        for (int i = 0; i <= steps; ++i) {
            traj.t.push_back(T * i / steps);
            traj.rho.push_back(rho0);
        }
        Spectrum op = limit_test_operator(xi, c, zero);
        const double expect = std::abs(T * inner(rho0, op));
        CHECK(weak_residual(traj, c, zero, xi, steps) == doctest::Approx(expect).epsilon(1e-12));
    }

    // split trajectory with variable sigma: residual decays at second order
    {
        RngStream rng(stream_key(506, 0, 0));
        Spectrum rho0 = random_profile(n, 4, rng);
        rho0.at(0) += 1.0;
        Spectrum sb = profile_from_coeffs({0.8, 0.5}, n);
        Spectrum xi = random_profile(n, 4, rng);
        std::vector<std::pair<double, double>> samples;
        for (double dt : {2e-3, 1e-3, 5e-4, 2.5e-4}) {
            LimitTrajectory traj = solve_limit(rho0, c, sb, 0.1, dt);
            const std::size_t it = traj.t.size() - 1;
            samples.push_back({dt, weak_residual(traj, c, sb, xi, it % 2 == 0 ? it : it - 1)});
        }
        // the symmetric splitting superconverges in the weak form; assert at
        // least the expected second order
        const RateFit fit = fit_rate(samples);
        CHECK(fit.slope > 1.7);
    }

    // too-coarse trajectories are rejected
    {
        LimitTrajectory traj;
        traj.t = {0.0, 0.1};
        traj.rho = {zero, zero};
        Spectrum xi(1, n);
        CHECK_THROWS(weak_residual(traj, c, zero, xi, 1));
    }
}

TEST_CASE("indefinite K is rejected") {
    const int n = 16;
    Spectrum rho0(1, n);
    Spectrum zero(1, n);
    AveragedCoefficients bad;
    bad.K[0][0] = -0.5;
    CHECK_THROWS(solve_limit(rho0, bad, zero, 0.1, 1e-2));
}
