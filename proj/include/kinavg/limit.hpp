#pragma once

// Solver for the averaged equation
//
//     dt rho + J . grad rho + sigma_bar rho = div(K grad rho)      on T^d,
//
// and the weak-formulation residual used to certify trajectories. When
// sigma_bar is constant in x every Fourier mode decouples and the solution is
// exact:
//
//     rho_k(T) = rho_k(0) exp(-4 pi^2 (k.Kk) T - 2 pi i (J.k) T - sigma_bar T).
//
// Otherwise Strang splitting alternates the exact diffusion-advection flow in
// Fourier space with the exact pointwise absorption exp(-sigma_bar(x) dt).

#include <vector>

#include "kinavg/fourier.hpp"
#include "kinavg/velocity.hpp"

namespace kinavg {

struct LimitTrajectory {
    std::vector<double> t;
    std::vector<Spectrum> rho;

    const Spectrum& back() const { return rho.back(); }
};

// True when all nonconstant modes of sigma_bar are below tol.
bool is_constant_profile(const Spectrum& g, double tol = 1e-14);

// Exact per-mode solution; requires constant sigma_bar.
Spectrum limit_exact_constant_sigma(const Spectrum& rho0, const AveragedCoefficients& coef,
                                    double sigma_const, double T);

// General solve; stores ceil(T/dt) + 1 uniform snapshots (every `stride`
// steps when stride > 1). K must be positive semidefinite.
LimitTrajectory solve_limit(const Spectrum& rho0, const AveragedCoefficients& coef,
                            const Spectrum& sigma_bar, double T, double dt, int stride = 1);

// | (rho(t),xi) - (rho0,xi) - int_0^t (rho(s), div(K grad xi) + J.grad xi
//   - sigma_bar xi) ds |, Simpson quadrature on the stored trajectory up to
// stored index it (the index must be even and >= 2).
double weak_residual(const LimitTrajectory& traj, const AveragedCoefficients& coef,
                     const Spectrum& sigma_bar, const Spectrum& xi, std::size_t it);

// div(K grad xi) + J . grad xi - sigma_bar xi  (the weak-form test operator).
Spectrum limit_test_operator(const Spectrum& xi, const AveragedCoefficients& coef,
                             const Spectrum& sigma_bar);

}  // namespace kinavg
