#pragma once

// Test functions phi(f, ell) = chi((rho, xi)_{L2_x}) that depend on the
// kinetic state only through the density, their four correctors, and the
// generator pieces
//
//     L0 phi = -D_f phi . (sigma(ell) f + Bf)
//     L1 phi = -D_f phi . (Af)
//     L2 phi =  D_f phi . (Lf)
//     Lm     =  generator of the driving process (OU),
//
// so that the perturbed function
//
//     phi_ed = phi + eps phi10 + eps^2 phi20 + delta^2 phi02 + eps delta^2 phi12
//
// satisfies L_ed phi_ed -> L phi as (eps, delta) -> 0. Closed forms, with
// u = (rho,xi), p = (f, A xi)_{L2}, r = R0(ell) xi:
//
//     phi10 = chi'(u) p
//     phi20 = 1/2 chi''(u) p^2 + chi'(u) (f - rho M, A^2 xi + B xi)
//     phi02 = -chi'(u) (rho, r)
//     phi12 = -chi''(u) p (rho, r) - chi'(u) (f, A r)
//
// All functional derivatives are evaluated by exact algebra on the spectral
// representation (a central-difference Gateaux oracle is kept in the tests).
// Under the affine reaction model every corrector is an affine polynomial in
// ell, so Lm evaluations are exact as well.

#include <array>
#include <functional>
#include <vector>

#include "kinavg/driving.hpp"
#include "kinavg/velocity.hpp"

namespace kinavg {

// chi with derivatives to order 3.
struct Chi {
    std::function<double(double)> f, d1, d2, d3;

    // s * tanh(u/s): bounded, smooth, all derivatives nonzero generically.
    static Chi sigmoid(double s);
    // Identity on [-r, r], C^3 transition to a constant on [r, r + width].
    static Chi truncated_linear(double r, double width);
};

struct TestFunction {
    Chi chi;
    Spectrum xi;
};

// A f and B f per velocity node (spectral derivatives).
KineticField apply_transport_a(const KineticField& f, const VelocityModel& model);
KineticField apply_transport_b(const KineticField& f, const VelocityModel& model);

// sigma(ell) * f per node, truncated to the field band.
KineticField multiply_field(const Spectrum& sigma, const KineticField& f);

// chi((rho, xi)).
double eval_phi(const TestFunction& tf, const KineticField& f, const VelocityModel& model);

// chi'((rho,xi)) * (rho, div(K grad xi) + J . grad xi - sigma_bar xi).
double limit_generator(const TestFunction& tf, const Spectrum& rho,
                       const AveragedCoefficients& coef, const Spectrum& sigma_bar);

// Every generator term needed by the corrector system and the residual
// expansion, evaluated at one (f, ell).
struct GeneratorTable {
    double L_limit = 0;                                          // L phi (limit generator)
    double L0_phi = 0, L1_phi = 0, L2_phi = 0, Lm_phi = 0;
    double L0_phi10 = 0, L1_phi10 = 0, L2_phi10 = 0, Lm_phi10 = 0;
    double L0_phi20 = 0, L1_phi20 = 0, L2_phi20 = 0, Lm_phi20 = 0;
    double L0_phi02 = 0, L1_phi02 = 0, L2_phi02 = 0, Lm_phi02 = 0;
    double L0_phi12 = 0, L1_phi12 = 0, L2_phi12 = 0, Lm_phi12 = 0;
    double phi = 0, phi10 = 0, phi20 = 0, phi02 = 0, phi12 = 0;
};

struct ResidualSample {
    double eps = 0, delta = 0;
    double residual = 0;     // |L_ed phi_ed - L phi| at (f, ell)
    double bound_value = 0;  // (1 + ||f||^3)(eps (1+|ell|) + delta^2 (1+|ell|^2))
};

class PtfEvaluator {
public:
    PtfEvaluator(TestFunction tf, const VelocityModel& model, const SigmaModel& s, double m_bar);

    double phi(const KineticField& f) const;
    double phi10(const KineticField& f) const;
    double phi20(const KineticField& f) const;
    double phi02(const KineticField& f, double ell) const;
    double phi12(const KineticField& f, double ell) const;
    double phi_perturbed(const KineticField& f, double ell, double eps, double delta) const;

    GeneratorTable generators(const KineticField& f, double ell) const;

    // Residuals of the corrector system, in order:
    //   |L1 phi + L2 phi10|,
    //   |L0 phi + L1 phi10 + L2 phi20 + Lm phi02 - L phi|,
    //   |L2 phi02|, |Lm phi20|, |L1 phi02 + L2 phi12|.
    std::array<double, 5> poisson_residuals(const KineticField& f, double ell) const;

    // Full multiscale assembly of |L_ed phi_ed - L phi| over the grid
    // eps_list x delta_list (all terms included, singular prefactors and all).
    std::vector<ResidualSample> residual_scaling(const KineticField& f, double ell,
                                                 const std::vector<double>& eps_list,
                                                 const std::vector<double>& delta_list) const;

    const TestFunction& test_function() const { return tf_; }
    double m_bar() const { return m_bar_; }

private:
    struct FieldCtx;
    struct DirCtx;
    FieldCtx field_ctx(const KineticField& f) const;
    DirCtx dir_ctx(const KineticField& h) const;

    TestFunction tf_;
    const VelocityModel* model_;
    const SigmaModel* sigma_;
    double m_bar_;

    std::vector<Spectrum> a_xi_;      // (a_j . grad) xi
    std::vector<Spectrum> g2_xi_;     // (a_j . grad)^2 xi + (b_j . grad) xi
    Spectrum sxi_;                    // sigma1 * xi  (so R0(ell) xi = (ell - m_bar) sxi)
    std::vector<Spectrum> a_sxi_;     // (a_j . grad)(sigma1 xi)
    Spectrum op_lim_;                 // div(K grad xi) + J . grad xi - sigma_bar xi
};

}  // namespace kinavg
