#include "kinavg/ptf.hpp"

#include <cmath>

#include "kinavg/limit.hpp"

namespace kinavg {

Chi Chi::sigmoid(double s) {
    Chi c;
    c.f = [s](double u) { return s * std::tanh(u / s); };
    c.d1 = [s](double u) {
        const double t = std::tanh(u / s);
        return 1.0 - t * t;
    };
    c.d2 = [s](double u) {
        const double t = std::tanh(u / s);
        return -2.0 * t * (1.0 - t * t) / s;
    };
    c.d3 = [s](double u) {
        const double t = std::tanh(u / s);
        return (1.0 - t * t) * (6.0 * t * t - 2.0) / (s * s);
    };
    return c;
}

Chi Chi::truncated_linear(double r, double width) {
    // chi' is the quintic smoothstep ramped down on [r, r+width]; chi is its
    // antiderivative, odd in u.
    auto ramp = [](double x) { return 1.0 - x * x * x * (10.0 + x * (-15.0 + 6.0 * x)); };
    auto ramp_d1 = [](double x) { return -30.0 * x * x * (1.0 - x) * (1.0 - x); };
    auto ramp_d2 = [](double x) { return -60.0 * x * (1.0 - x) * (1.0 - 2.0 * x); };
    auto ramp_int = [](double x) {  // int_0^x ramp
        return x - x * x * x * x * (2.5 + x * (-3.0 + x));
    };
    Chi c;
    c.f = [=](double u) {
        const double a = std::abs(u), sg = u < 0 ? -1.0 : 1.0;
        if (a <= r) return u;
        if (a >= r + width) return sg * (r + width * ramp_int(1.0));
        return sg * (r + width * ramp_int((a - r) / width));
    };
    c.d1 = [=](double u) {
        const double a = std::abs(u);
        if (a <= r) return 1.0;
        if (a >= r + width) return 0.0;
        return ramp((a - r) / width);
    };
    c.d2 = [=](double u) {
        const double a = std::abs(u), sg = u < 0 ? -1.0 : 1.0;
        if (a <= r || a >= r + width) return 0.0;
        return sg * ramp_d1((a - r) / width) / width;
    };
    c.d3 = [=](double u) {
        const double a = std::abs(u);
        if (a <= r || a >= r + width) return 0.0;
        return ramp_d2((a - r) / width) / (width * width);
    };
    return c;
}

KineticField apply_transport_a(const KineticField& f, const VelocityModel& model) {
    KineticField out = f;
    for (int j = 0; j < f.n_nodes(); ++j) out.node[j] = grad_dot(f.node[j], model.a_field[j].data());
    return out;
}

KineticField apply_transport_b(const KineticField& f, const VelocityModel& model) {
    KineticField out = f;
    for (int j = 0; j < f.n_nodes(); ++j) out.node[j] = grad_dot(f.node[j], model.b_field[j].data());
    return out;
}

KineticField multiply_field(const Spectrum& sigma, const KineticField& f) {
    KineticField out = f;
    for (int j = 0; j < f.n_nodes(); ++j) out.node[j] = multiply(sigma, f.node[j]);
    return out;
}

double eval_phi(const TestFunction& tf, const KineticField& f, const VelocityModel& model) {
    if (f.n_nodes() != model.n_nodes()) throw std::invalid_argument("eval_phi: grid mismatch");
    return tf.chi.f(inner(density(f, model), tf.xi));
}

double limit_generator(const TestFunction& tf, const Spectrum& rho,
                       const AveragedCoefficients& coef, const Spectrum& sigma_bar) {
    const Spectrum op = limit_test_operator(tf.xi, coef, sigma_bar);
    return tf.chi.d1(inner(rho, tf.xi)) * inner(rho, op);
}

// --- evaluator --------------------------------------------------------------

// Everything about f that the corrector algebra needs.
struct PtfEvaluator::FieldCtx {
    Spectrum rho;
    double u = 0;                // (rho, xi)
    double c1 = 0, c2 = 0, c3 = 0;  // chi', chi'', chi''' at u
    double p = 0;                // (f, A xi)_{L2}
    double q = 0;                // (f - rho M, A^2 xi + B xi)_{L2}
    double w1 = 0;               // (rho, sigma1 xi)  [so (rho, R0(l) xi) = (l - m_bar) w1]
    double s1 = 0;               // (f, A(sigma1 xi)) [so (f, A R0(l) xi) = (l - m_bar) s1]
};

// Same contractions for a direction field h (Gateaux direction).
struct PtfEvaluator::DirCtx {
    double hu = 0;   // (<h>, xi)
    double hp = 0;   // (h, A xi)
    double hq = 0;   // (h - <h> M, A^2 xi + B xi)
    double hw1 = 0;  // (<h>, sigma1 xi)
    double hs1 = 0;  // (h, A(sigma1 xi))
};

PtfEvaluator::PtfEvaluator(TestFunction tf, const VelocityModel& model, const SigmaModel& s,
                           double m_bar)
    : tf_(std::move(tf)), model_(&model), sigma_(&s), m_bar_(m_bar) {
    const int nn = model.n_nodes();
    a_xi_.reserve(nn);
    g2_xi_.reserve(nn);
    a_sxi_.reserve(nn);
    sxi_ = multiply(s.sigma1(), tf_.xi);
    for (int j = 0; j < nn; ++j) {
        Spectrum axi = grad_dot(tf_.xi, model.a_field[j].data());
        a_xi_.push_back(axi);
        Spectrum g2 = grad_dot(axi, model.a_field[j].data());
        g2 += grad_dot(tf_.xi, model.b_field[j].data());
        g2_xi_.push_back(std::move(g2));
        a_sxi_.push_back(grad_dot(sxi_, model.a_field[j].data()));
    }
    op_lim_ = limit_test_operator(tf_.xi, averaged_coefficients(model), s.sigma_bar(m_bar));
}

PtfEvaluator::FieldCtx PtfEvaluator::field_ctx(const KineticField& f) const {
    FieldCtx c;
    c.rho = density(f, *model_);
    c.u = inner(c.rho, tf_.xi);
    c.c1 = tf_.chi.d1(c.u);
    c.c2 = tf_.chi.d2(c.u);
    c.c3 = tf_.chi.d3(c.u);
    for (int j = 0; j < f.n_nodes(); ++j) {
        const double mu = model_->weights[j];
        c.p += mu * inner(f.node[j], a_xi_[j]);
        Spectrum dev = f.node[j];
        const double M = model_->maxwellian[j];
        for (std::size_t i = 0; i < dev.size(); ++i) dev[i] -= c.rho[i] * M;
        c.q += mu * inner(dev, g2_xi_[j]);
        c.s1 += mu * inner(f.node[j], a_sxi_[j]);
    }
    c.w1 = inner(c.rho, sxi_);
    return c;
}

PtfEvaluator::DirCtx PtfEvaluator::dir_ctx(const KineticField& h) const {
    DirCtx d;
    const Spectrum hrho = density(h, *model_);
    d.hu = inner(hrho, tf_.xi);
    d.hw1 = inner(hrho, sxi_);
    for (int j = 0; j < h.n_nodes(); ++j) {
        const double mu = model_->weights[j];
        d.hp += mu * inner(h.node[j], a_xi_[j]);
        Spectrum dev = h.node[j];
        const double M = model_->maxwellian[j];
        for (std::size_t i = 0; i < dev.size(); ++i) dev[i] -= hrho[i] * M;
        d.hq += mu * inner(dev, g2_xi_[j]);
        d.hs1 += mu * inner(h.node[j], a_sxi_[j]);
    }
    return d;
}

double PtfEvaluator::phi(const KineticField& f) const { return eval_phi(tf_, f, *model_); }

double PtfEvaluator::phi10(const KineticField& f) const {
    const FieldCtx c = field_ctx(f);
    return c.c1 * c.p;
}

double PtfEvaluator::phi20(const KineticField& f) const {
    const FieldCtx c = field_ctx(f);
    return 0.5 * c.c2 * c.p * c.p + c.c1 * c.q;
}

double PtfEvaluator::phi02(const KineticField& f, double ell) const {
    const FieldCtx c = field_ctx(f);
    return -c.c1 * (ell - m_bar_) * c.w1;
}

double PtfEvaluator::phi12(const KineticField& f, double ell) const {
    const FieldCtx c = field_ctx(f);
    return -(c.c2 * c.p * c.w1 + c.c1 * c.s1) * (ell - m_bar_);
}

double PtfEvaluator::phi_perturbed(const KineticField& f, double ell, double eps,
                                   double delta) const {
    const FieldCtx c = field_ctx(f);
    const double d2 = delta * delta;
    const double phi0 = tf_.chi.f(c.u);
    const double p10 = c.c1 * c.p;
    const double p20 = 0.5 * c.c2 * c.p * c.p + c.c1 * c.q;
    const double p02 = -c.c1 * (ell - m_bar_) * c.w1;
    const double p12 = -(c.c2 * c.p * c.w1 + c.c1 * c.s1) * (ell - m_bar_);
    return phi0 + eps * p10 + eps * eps * p20 + d2 * p02 + eps * d2 * p12;
}

GeneratorTable PtfEvaluator::generators(const KineticField& f, double ell) const {
    const FieldCtx c = field_ctx(f);
    const double lm = ell - m_bar_;
    const double w = lm * c.w1;
    const double s = lm * c.s1;

    // Gateaux derivatives of phi and the four correctors in direction h.
    auto d_phi = [&](const DirCtx& d) { return c.c1 * d.hu; };
    auto d_phi10 = [&](const DirCtx& d) { return c.c2 * d.hu * c.p + c.c1 * d.hp; };
    auto d_phi20 = [&](const DirCtx& d) {
        return 0.5 * c.c3 * d.hu * c.p * c.p + c.c2 * c.p * d.hp + c.c2 * d.hu * c.q +
               c.c1 * d.hq;
    };
    auto d_phi02 = [&](const DirCtx& d) { return -c.c2 * d.hu * w - c.c1 * lm * d.hw1; };
    auto d_phi12 = [&](const DirCtx& d) {
        return -c.c3 * d.hu * c.p * w - c.c2 * d.hp * w - c.c2 * c.p * lm * d.hw1 -
               c.c2 * d.hu * s - c.c1 * lm * d.hs1;
    };

    // Direction fields: Af, Lf, and sigma(ell) f + Bf.
    const DirCtx da = dir_ctx(apply_transport_a(f, *model_));
    const DirCtx dl = dir_ctx(bgk_apply(f, *model_));
    KineticField h0 = multiply_field(sigma_->sigma(ell), f);
    h0 += apply_transport_b(f, *model_);
    const DirCtx d0 = dir_ctx(h0);

    GeneratorTable t;
    t.phi = tf_.chi.f(c.u);
    t.phi10 = c.c1 * c.p;
    t.phi20 = 0.5 * c.c2 * c.p * c.p + c.c1 * c.q;
    t.phi02 = -c.c1 * w;
    t.phi12 = -(c.c2 * c.p * c.w1 + c.c1 * c.s1) * lm;

    t.L_limit = c.c1 * inner(c.rho, op_lim_);

    t.L0_phi = -d_phi(d0);
    t.L1_phi = -d_phi(da);
    t.L2_phi = d_phi(dl);
    t.Lm_phi = 0.0;

    t.L0_phi10 = -d_phi10(d0);
    t.L1_phi10 = -d_phi10(da);
    t.L2_phi10 = d_phi10(dl);
    t.Lm_phi10 = 0.0;

    t.L0_phi20 = -d_phi20(d0);
    t.L1_phi20 = -d_phi20(da);
    t.L2_phi20 = d_phi20(dl);
    t.Lm_phi20 = 0.0;

    t.L0_phi02 = -d_phi02(d0);
    t.L1_phi02 = -d_phi02(da);
    t.L2_phi02 = d_phi02(dl);
    // Affine ell-dependence: Lm maps a (ell - m_bar) to -a (ell - m_bar).
    t.Lm_phi02 = c.c1 * c.w1 * lm;

    t.L0_phi12 = -d_phi12(d0);
    t.L1_phi12 = -d_phi12(da);
    t.L2_phi12 = d_phi12(dl);
    t.Lm_phi12 = (c.c2 * c.p * c.w1 + c.c1 * c.s1) * lm;

    return t;
}

std::array<double, 5> PtfEvaluator::poisson_residuals(const KineticField& f, double ell) const {
    const GeneratorTable t = generators(f, ell);
    return {std::abs(t.L1_phi + t.L2_phi10),
            std::abs(t.L0_phi + t.L1_phi10 + t.L2_phi20 + t.Lm_phi02 - t.L_limit),
            std::abs(t.L2_phi02), std::abs(t.Lm_phi20),
            std::abs(t.L1_phi02 + t.L2_phi12)};
}

std::vector<ResidualSample> PtfEvaluator::residual_scaling(
    const KineticField& f, double ell, const std::vector<double>& eps_list,
    const std::vector<double>& delta_list) const {
    const GeneratorTable t = generators(f, ell);
    const double nf = weighted_norm(f, *model_);
    const double growth = 1.0 + nf * nf * nf;
    std::vector<ResidualSample> out;
    out.reserve(eps_list.size() * delta_list.size());
    for (double eps : eps_list) {
        for (double delta : delta_list) {
            const double e2 = eps * eps, d2 = delta * delta;
            double acc = 0.0;
            acc += t.L2_phi / e2 + t.Lm_phi / d2;
            acc += (t.L1_phi + t.L2_phi10) / eps + eps / d2 * t.Lm_phi10;
            acc += t.L0_phi + t.L1_phi10 + t.L2_phi20 + t.Lm_phi02;
            acc += d2 / e2 * t.L2_phi02 + e2 / d2 * t.Lm_phi20;
            acc += eps * (t.L0_phi10 + t.L1_phi20 + t.Lm_phi12);
            acc += d2 / eps * (t.L1_phi02 + t.L2_phi12);
            acc += e2 * t.L0_phi20 + d2 * (t.L0_phi02 + t.L1_phi12);
            acc += eps * d2 * t.L0_phi12;
            ResidualSample smp;
            smp.eps = eps;
            smp.delta = delta;
            smp.residual = std::abs(acc - t.L_limit);
            smp.bound_value =
                growth * (eps * (1.0 + std::abs(ell)) + d2 * (1.0 + ell * ell));
            out.push_back(smp);
        }
    }
    return out;
}

}  // namespace kinavg
