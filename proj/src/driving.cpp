#include "kinavg/driving.hpp"

#include <cmath>
#include <stdexcept>

namespace kinavg {

OUProcess ou_step(const OUProcess& p, double h_fast, double gauss) {
    if (!(h_fast > 0.0)) throw std::invalid_argument("ou_step: step must be positive");
    OUProcess out = p;
    const double decay = std::exp(-h_fast);
    const double sd = std::sqrt(0.5 * (1.0 - std::exp(-2.0 * h_fast)));
    out.state = p.m_bar + (p.state - p.m_bar) * decay + gauss * sd;
    out.t_fast = p.t_fast + h_fast;
    return out;
}

SigmaModel::SigmaModel(Spectrum sigma0, Spectrum sigma1)
    : sigma0_(std::move(sigma0)), sigma1_(std::move(sigma1)) {
    if (sigma0_.dim() != sigma1_.dim() || sigma0_.n() != sigma1_.n())
        throw std::invalid_argument("SigmaModel: profile shapes differ");
    sigma1_c0_ = sup_norm(sigma1_);
    sigma1_c1_ = sigma1_c0_ + sup_grad_norm(sigma1_);
}

Spectrum SigmaModel::sigma(double ell) const {
    Spectrum out = sigma0_;
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += ell * sigma1_[i];
    return out;
}

Spectrum SigmaModel::sigma_bar(double m_bar) const { return sigma(m_bar); }

double SigmaModel::sigma_bar_c0(double m_bar) const { return sup_norm(sigma(m_bar)); }

double SigmaModel::sigma_bar_c1(double m_bar) const {
    const Spectrum sb = sigma(m_bar);
    return sup_norm(sb) + sup_grad_norm(sb);
}

bool SigmaModel::is_zero() const {
    for (std::size_t i = 0; i < sigma0_.size(); ++i)
        if (std::abs(sigma0_[i].real()) + std::abs(sigma0_[i].imag()) > 0.0) return false;
    for (std::size_t i = 0; i < sigma1_.size(); ++i)
        if (std::abs(sigma1_[i].real()) + std::abs(sigma1_[i].imag()) > 0.0) return false;
    return true;
}

DrivingState update_stopping(DrivingState state, const SigmaModel& s, double delta, double t) {
    if (state.tau_hit) return state;
    const double m_threshold = std::pow(delta, -state.alpha);
    const double zeta_threshold = 1.0 / delta;
    if (std::abs(state.ou.state) >= m_threshold || state.zeta_c1(s) >= zeta_threshold)
        state.tau_hit = t;
    return state;
}

DrivingPath sample_path(const OUProcess& p0, double delta, double dt_slow, int n_steps,
                        RngStream& rng, const SigmaModel& s, double alpha,
                        double dt_fast_factor) {
    const double delta0 = std::min(1.0, p0.ell0 != 0.0 ? 1.0 / std::abs(p0.ell0) : 1.0);
    if (!(delta > 0.0) || delta >= delta0)
        throw std::invalid_argument("sample_path: delta outside (0, delta0)");
    DrivingSimulator sim(p0, delta, s, alpha, dt_fast_factor);
    DrivingPath path;
    path.t.push_back(0.0);
    path.m.push_back(p0.state);
    path.zeta_scalar.push_back(0.0);
    for (int i = 1; i <= n_steps; ++i) {
        sim.advance(dt_slow, rng);
        path.t.push_back(i * dt_slow);
        path.m.push_back(sim.state().ou.state);
        path.zeta_scalar.push_back(sim.state().zeta_scalar);
    }
    path.tau_hit = sim.state().tau_hit;
    return path;
}

Spectrum resolvent_apply(const SigmaModel& s, double m_bar, double ell, const Spectrum& h) {
    Spectrum out = multiply(s.sigma1(), h);
    out *= (ell - m_bar);
    return out;
}

DrivingSimulator::DrivingSimulator(const OUProcess& p0, double delta, const SigmaModel& s,
                                   double alpha, double dt_fast_factor)
    : sigma_(&s), fast_factor_(dt_fast_factor) {
    st_.ou = p0;
    st_.delta = delta;
    st_.alpha = alpha;
    st_ = update_stopping(st_, *sigma_, delta, 0.0);
}

void DrivingSimulator::substeps(double dt, RngStream& rng) {
    const double d2 = st_.delta * st_.delta;
    const int n_sub = std::max(1, int(std::ceil(dt / (fast_factor_ * d2) - 1e-12)));
    const double h_slow = dt / n_sub;
    const double h_fast = h_slow / d2;
    for (int i = 0; i < n_sub; ++i) {
        const double g = rng.normal();
        if (st_.tau_hit) continue;  // frozen path still consumes its draws
        const double m_prev = st_.ou.state;
        st_.ou = ou_step(st_.ou, h_fast, g);
        // trapezoid accumulation of (1/delta) int (m - m_bar) ds in slow time
        st_.zeta_scalar +=
            0.5 * (m_prev - st_.ou.m_bar + st_.ou.state - st_.ou.m_bar) * h_slow / st_.delta;
        st_ = update_stopping(st_, *sigma_, st_.delta, t_slow_ + (i + 1) * h_slow);
    }
    t_slow_ += dt;
}

double DrivingSimulator::advance(double dt, RngStream& rng) {
    substeps(0.5 * dt, rng);
    const double m_mid = st_.ou.state;
    substeps(0.5 * dt, rng);
    return m_mid;
}

}  // namespace kinavg
