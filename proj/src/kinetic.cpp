#include "kinavg/kinetic.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace kinavg {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;

bool finite_field(const KineticField& f) {
    for (const auto& g : f.node)
        for (std::size_t i = 0; i < g.size(); ++i)
            if (!std::isfinite(g[i].real()) || !std::isfinite(g[i].imag())) return false;
    return true;
}
}  // namespace

ParamBounds admissible_bounds(const VelocityModel& model, const SigmaModel& s, double m_bar,
                              double ell0, double T) {
    ParamBounds b;
    const double speeds = model.a_sup() + model.b_sup();
    const double sig_c1 = s.sigma_bar_c1(m_bar);
    b.eps0 = std::min(1.0, 1.0 / (4.0 * speeds * (1.0 + T * sig_c1)));
    b.delta0 = std::min(1.0, ell0 != 0.0 ? 1.0 / std::abs(ell0) : 1.0);
    return b;
}

void validate_params(const SolverParams& p, const VelocityModel& model, const SigmaModel& s,
                     double m_bar, double ell0) {
    const ParamBounds b = admissible_bounds(model, s, m_bar, ell0, p.T);
    if (!(p.epsilon > 0.0) || p.epsilon >= b.eps0) {
        std::ostringstream os;
        os << "epsilon = " << p.epsilon << " violates the admissibility bound eps0 = " << b.eps0
           << " (eps0 < min(1, (4 (||a||+||b||) (1 + T ||sigma_bar||_C1))^-1))";
        throw std::invalid_argument(os.str());
    }
    if (!(p.delta > 0.0) || p.delta >= b.delta0) {
        std::ostringstream os;
        os << "delta = " << p.delta << " violates the admissibility bound delta0 = " << b.delta0
           << " (delta0 < min(1, |ell0|^-1))";
        throw std::invalid_argument(os.str());
    }
    if (!is_pow2(p.n_modes)) throw std::invalid_argument("n_modes must be a power of two");
    if (p.dt_slow > 0.0 && p.dt_slow > effective_dt(p, s) + 1e-15)
        throw std::invalid_argument("dt_slow exceeds the accuracy rule min(c1 eps^2, c2 delta^2)");
}

double effective_dt(const SolverParams& p, const SigmaModel& s) {
    double dt = p.c1 * p.epsilon * p.epsilon;
    // The driving scale only constrains dt when the reaction actually
    // depends on the driving state.
    if (!s.is_zero()) dt = std::min(dt, p.c2 * p.delta * p.delta);
    if (p.dt_slow > 0.0) dt = std::min(dt, p.dt_slow);
    return dt;
}

KineticField transport_step(const KineticField& f, const VelocityModel& model, double eps,
                            double h) {
    if (!(h > 0.0)) throw std::invalid_argument("transport_step: h must be positive");
    KineticField out = f;
    for (int j = 0; j < f.n_nodes(); ++j) {
        const double c1 = model.a_field[j][0] / eps + model.b_field[j][0];
        const double c2 = model.a_field[j][1] / eps + model.b_field[j][1];
        Spectrum& g = out.node[j];
        g.for_each_mode([&](std::size_t i, int kx, int ky) {
            const double phase = -kTwoPi * (kx * c1 + ky * c2) * h;
            g[i] *= cplx(std::cos(phase), std::sin(phase));
        });
    }
    return out;
}

KineticField relaxation_step(const KineticField& f, const VelocityModel& model, double eps,
                             double h) {
    if (!(h > 0.0)) throw std::invalid_argument("relaxation_step: h must be positive");
    const Spectrum rho = density(f, model);
    const double decay = std::exp(-h / (eps * eps));
    KineticField out = f;
    for (int j = 0; j < f.n_nodes(); ++j) {
        const double M = model.maxwellian[j];
        for (std::size_t i = 0; i < rho.size(); ++i)
            out.node[j][i] = rho[i] * M + decay * (f.node[j][i] - rho[i] * M);
    }
    return out;
}

KineticField reaction_step(const KineticField& f, const SigmaModel& s, double ell, double h) {
    if (!(h > 0.0)) throw std::invalid_argument("reaction_step: h must be positive");
    if (s.is_zero()) return f;
    const Spectrum sig = s.sigma(ell);
    std::vector<double> w = to_grid(sig, 2);
    for (auto& v : w) v = std::exp(-v * h);
    const int ng = 2 * f.n;
    KineticField out = f;
    for (int j = 0; j < f.n_nodes(); ++j) {
        std::vector<double> g = to_grid(f.node[j], 2);
        for (std::size_t i = 0; i < g.size(); ++i) g[i] *= w[i];
        out.node[j] = from_grid(g, ng, f.dim, f.n);
    }
    return out;
}

double apriori_constant(const VelocityModel& model, const SigmaModel& s, double m_bar, double T) {
    const double speeds = model.a_sup() + model.b_sup();
    const double sig_c0 = s.sigma_bar_c0(m_bar);
    const double sig_c1 = s.sigma_bar_c1(m_bar);
    const double c0 = model.b_sup() * (1.0 + T * sig_c1) +
                      4.0 * speeds * speeds * (1.0 + T * sig_c1) * (1.0 + T * sig_c1);
    return std::exp(2.0 + 2.0 * T * sig_c0) * std::exp(2.0 * c0 * T);
}

PathDiagnostics solve_path(const KineticField& f0, const SolverParams& p,
                           const VelocityModel& model, const SigmaModel& s,
                           const OUProcess& driving0, RngStream& rng) {
    validate_params(p, model, s, driving0.m_bar, driving0.ell0);

    const double dt = effective_dt(p, s);
    // Round the step count up to a multiple of n_outputs so snapshots land on
    // the uniform grid T * i / n_outputs for every (eps, delta) cell.
    const int n_out = std::max(1, p.n_outputs);
    int n_steps = std::max(1, int(std::ceil(p.T / dt - 1e-9)));
    n_steps = n_out * ((n_steps + n_out - 1) / n_out);
    const double h = p.T / n_steps;
    const int stride = n_steps / n_out;

    PathDiagnostics out;
    const double eps2 = p.epsilon * p.epsilon;
    const double f0_norm = weighted_norm(f0, model);
    out.apriori_bound = p.apriori_slack *
                        apriori_constant(model, s, driving0.m_bar, p.T) * f0_norm * f0_norm;

    DrivingSimulator driving(driving0, p.delta, s, p.alpha);

    KineticField f = f0;
    double relax_integral = 0.0;
    double prev_lf2 = 0.0;
    {
        const double nlf = weighted_norm(bgk_apply(f, model), model);
        prev_lf2 = nlf * nlf;
        out.t.push_back(0.0);
        out.rho.push_back(density(f, model));
        out.norm_f.push_back(f0_norm);
        out.norm_Lf.push_back(nlf);
        out.relax_integral.push_back(0.0);
    }

    bool frozen = false;
    for (int step = 1; step <= n_steps; ++step) {
        const double m_mid = driving.advance(h, rng);
        // Stopped mode: f freezes at the last slow time <= tau_delta (tau is
        // detected on the fast grid, the field is quantized to the slow grid).
        const bool stopped = driving.state().tau_hit.has_value() &&
                             *driving.state().tau_hit < step * h - 1e-15;
        if (!(p.stopped_mode && (stopped || frozen))) {
            if (!s.is_zero()) f = reaction_step(f, s, m_mid, 0.5 * h);
            f = transport_step(f, model, p.epsilon, 0.5 * h);
            f = relaxation_step(f, model, p.epsilon, h);
            f = transport_step(f, model, p.epsilon, 0.5 * h);
            if (!s.is_zero()) f = reaction_step(f, s, m_mid, 0.5 * h);

            if (!finite_field(f)) {
                out.failed = true;
                std::ostringstream os;
                os << "non-finite field at t = " << step * h;
                out.failure = os.str();
                return out;
            }
            const double nlf = weighted_norm(bgk_apply(f, model), model);
            relax_integral += 0.5 * h * (prev_lf2 + nlf * nlf) / (2.0 * eps2);
            prev_lf2 = nlf * nlf;
        } else {
            frozen = true;
        }

        if (step % stride == 0 || step == n_steps) {
            const double nf = weighted_norm(f, model);
            out.t.push_back(step * h);
            out.rho.push_back(density(f, model));
            out.norm_f.push_back(nf);
            out.norm_Lf.push_back(std::sqrt(prev_lf2));
            out.relax_integral.push_back(relax_integral);
            if (p.check_apriori && nf * nf + relax_integral > out.apriori_bound)
                out.apriori_violated = true;
        }
    }
    out.tau_hit = driving.state().tau_hit;
    return out;
}

}  // namespace kinavg
