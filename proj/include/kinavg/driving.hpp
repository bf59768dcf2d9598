#pragma once

// Fast driving process m_delta(t) = m(t / delta^2), where m is a scalar
// Ornstein-Uhlenbeck process
//
//     dm_t = -(m_t - m_bar) dt + dW_t,     m_0 = ell0,
//
// simulated exactly in distribution: no time-discretization bias. The
// reaction coefficient is affine in the driving state,
//
//     sigma(ell)(x) = sigma0(x) + ell * sigma1(x),
//
// so the invariant-measure average is sigma_bar = sigma0 + m_bar * sigma1 and
// the resolvent of the Poisson equation -Lm psi = theta - theta_bar is
// closed-form: (R0(ell) h)(x) = (ell - m_bar) * sigma1(x) * h(x).
//
// The compensator zeta_delta(t) = (1/delta) int_0^t (sigma(m_delta) -
// sigma_bar) ds factors as sigma1(x) times a scalar, accumulated by the
// trapezoid rule on the fast grid. The stopping time tau_delta fires at the
// first sample time where |m_delta| >= delta^-alpha or
// ||zeta_delta||_{C1_x} >= delta^-1; past it the path is frozen.

#include <cstdint>
#include <optional>
#include <vector>

#include "kinavg/fourier.hpp"
#include "kinavg/rng.hpp"

namespace kinavg {

struct OUProcess {
    double m_bar = 0.0;
    double ell0 = 0.0;
    double state = 0.0;
    double t_fast = 0.0;
};

// Exact one-step transition over fast duration h_fast, given a N(0,1) draw.
OUProcess ou_step(const OUProcess& p, double h_fast, double gauss);

class SigmaModel {
public:
    SigmaModel() = default;
    SigmaModel(Spectrum sigma0, Spectrum sigma1);

    const Spectrum& sigma0() const { return sigma0_; }
    const Spectrum& sigma1() const { return sigma1_; }

    Spectrum sigma(double ell) const;           // sigma0 + ell * sigma1
    Spectrum sigma_bar(double m_bar) const;     // sigma0 + m_bar * sigma1

    double sigma1_c0() const { return sigma1_c0_; }
    // C1 norm ||g||_C0 + ||grad g||_C0; equals the Lipschitz constant of
    // ell -> sigma(ell) in C1.
    double sigma1_c1() const { return sigma1_c1_; }
    double sigma_bar_c0(double m_bar) const;
    double sigma_bar_c1(double m_bar) const;

    bool is_zero() const;

private:
    Spectrum sigma0_, sigma1_;
    double sigma1_c0_ = 0.0, sigma1_c1_ = 0.0;
};

struct DrivingState {
    OUProcess ou;
    double zeta_scalar = 0.0;   // (1/delta) int_0^t (m_delta(s) - m_bar) ds
    std::optional<double> tau_hit;
    double alpha = 0.5;         // exponent in the |m| threshold delta^-alpha
    double delta = 0.0;

    double zeta_c1(const SigmaModel& s) const { return std::abs(zeta_scalar) * s.sigma1_c1(); }
};

// Threshold check at slow time t; freezes tau_hit at the first crossing.
DrivingState update_stopping(DrivingState state, const SigmaModel& s, double delta, double t);

struct DrivingPath {
    std::vector<double> t;            // slow-time grid
    std::vector<double> m;            // m_delta at grid points
    std::vector<double> zeta_scalar;  // compensator scalar at grid points
    std::optional<double> tau_hit;
};

// Path of m_delta on a uniform slow grid t_i = i * dt_slow, i = 0..n_steps.
// Each slow step is subdivided into exact OU substeps of fast duration at
// most dt_fast_factor (default 0.5).
DrivingPath sample_path(const OUProcess& p0, double delta, double dt_slow, int n_steps,
                        RngStream& rng, const SigmaModel& s, double alpha = 0.5,
                        double dt_fast_factor = 0.5);

// (R0(ell) h)(x) = (ell - m_bar) sigma1(x) h(x).
Spectrum resolvent_apply(const SigmaModel& s, double m_bar, double ell, const Spectrum& h);

// Incremental driving simulation used by the kinetic solver: advances the
// state by one slow step and reports the midpoint value of m_delta.
class DrivingSimulator {
public:
    DrivingSimulator(const OUProcess& p0, double delta, const SigmaModel& s, double alpha,
                     double dt_fast_factor = 0.5);

    // Advance slow time by dt; returns m_delta at the midpoint of the step.
    // Once the stopping time has fired the state stays frozen.
    double advance(double dt, RngStream& rng);

    const DrivingState& state() const { return st_; }
    double t_slow() const { return t_slow_; }

private:
    void substeps(double dt, RngStream& rng);

    DrivingState st_;
    const SigmaModel* sigma_;
    double t_slow_ = 0.0;
    double fast_factor_;
};

}  // namespace kinavg
