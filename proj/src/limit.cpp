#include "kinavg/limit.hpp"

#include <cmath>
#include <stdexcept>

namespace kinavg {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;
constexpr double kFourPi2 = 39.478417604357434475337963999505;

void check_psd(const AveragedCoefficients& coef) {
    const auto ev = coef.eigenvalues();
    if (ev[0] < -1e-14) throw std::invalid_argument("solve_limit: K is indefinite");
}
}  // namespace

bool is_constant_profile(const Spectrum& g, double tol) {
    bool ok = true;
    g.for_each_mode([&](std::size_t i, int k1, int k2) {
        if ((k1 != 0 || k2 != 0) && std::abs(g[i]) > tol) ok = false;
    });
    return ok;
}

Spectrum limit_exact_constant_sigma(const Spectrum& rho0, const AveragedCoefficients& coef,
                                    double sigma_const, double T) {
    check_psd(coef);
    Spectrum out = rho0;
    out.for_each_mode([&](std::size_t i, int k1, int k2) {
        const double damp = kFourPi2 * coef.quad(k1, k2) + sigma_const;
        const double phase = -kTwoPi * (coef.J[0] * k1 + coef.J[1] * k2) * T;
        out[i] = rho0[i] * std::exp(-damp * T) * cplx(std::cos(phase), std::sin(phase));
    });
    return out;
}

LimitTrajectory solve_limit(const Spectrum& rho0, const AveragedCoefficients& coef,
                            const Spectrum& sigma_bar, double T, double dt, int stride) {
    check_psd(coef);
    const int n_steps = std::max(1, int(std::ceil(T / dt - 1e-9)));
    const double h = T / n_steps;

    LimitTrajectory traj;
    traj.t.push_back(0.0);
    traj.rho.push_back(rho0);

    if (is_constant_profile(sigma_bar)) {
        const double s0 = sigma_bar.at(0).real();
        for (int i = 1; i <= n_steps; ++i) {
            if (i % stride == 0 || i == n_steps) {
                traj.t.push_back(i * h);
                traj.rho.push_back(limit_exact_constant_sigma(rho0, coef, s0, i * h));
            }
        }
        return traj;
    }

    // Strang: half absorption, full diffusion-advection, half absorption.
    std::vector<double> absorb_half = to_grid(sigma_bar, 2);
    for (auto& v : absorb_half) v = std::exp(-v * 0.5 * h);
    const int ng = 2 * rho0.n();

    Spectrum rho = rho0;
    for (int i = 1; i <= n_steps; ++i) {
        std::vector<double> g = to_grid(rho, 2);
        for (std::size_t m = 0; m < g.size(); ++m) g[m] *= absorb_half[m];
        rho = from_grid(g, ng, rho.dim(), rho.n());
        rho = limit_exact_constant_sigma(rho, coef, 0.0, h);
        g = to_grid(rho, 2);
        for (std::size_t m = 0; m < g.size(); ++m) g[m] *= absorb_half[m];
        rho = from_grid(g, ng, rho.dim(), rho.n());
        if (i % stride == 0 || i == n_steps) {
            traj.t.push_back(i * h);
            traj.rho.push_back(rho);
        }
    }
    return traj;
}

Spectrum limit_test_operator(const Spectrum& xi, const AveragedCoefficients& coef,
                             const Spectrum& sigma_bar) {
    Spectrum out = xi;
    out.for_each_mode([&](std::size_t i, int k1, int k2) {
        const cplx diff = -kFourPi2 * coef.quad(k1, k2) * xi[i];
        const cplx adv = cplx(0.0, kTwoPi * (coef.J[0] * k1 + coef.J[1] * k2)) * xi[i];
        out[i] = diff + adv;
    });
    out -= multiply(sigma_bar, xi);
    return out;
}

double weak_residual(const LimitTrajectory& traj, const AveragedCoefficients& coef,
                     const Spectrum& sigma_bar, const Spectrum& xi, std::size_t it) {
    if (traj.t.size() < 3 || it >= traj.t.size() || it < 2 || it % 2 != 0)
        throw std::invalid_argument("weak_residual: trajectory too coarse for Simpson quadrature");
    const Spectrum op = limit_test_operator(xi, coef, sigma_bar);
    const double h = traj.t[1] - traj.t[0];
    for (std::size_t i = 0; i + 1 <= it; ++i)
        if (std::abs(traj.t[i + 1] - traj.t[i] - h) > 1e-12)
            throw std::invalid_argument("weak_residual: nonuniform trajectory grid");
    double integral = 0.0;
    for (std::size_t i = 0; i + 2 <= it; i += 2) {
        integral += h / 3.0 *
                    (inner(traj.rho[i], op) + 4.0 * inner(traj.rho[i + 1], op) +
                     inner(traj.rho[i + 2], op));
    }
    return std::abs(inner(traj.rho[it], xi) - inner(traj.rho[0], xi) - integral);
}

}  // namespace kinavg
