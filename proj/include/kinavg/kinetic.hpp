#pragma once

// Pathwise Fourier pseudo-spectral solver for the two-scale kinetic problem
//
//     dt f + (a(v)/eps + b(v)) . grad_x f + sigma(m_delta(t)) f
//         = (1/eps^2) (rho M - f)        on T^d,
//
// for one realization of the driving process. Strang splitting per slow step
// with every sub-flow exact:
//
//     half reaction | half transport | relaxation | half transport | half reaction
//
// with sigma frozen at the value of m_delta sampled at the step midpoint.
// Transport is a per-node phase multiplication, relaxation contracts f toward
// rho*M with factor exp(-h/eps^2) (rho is invariant: <Lf> = 0), and reaction
// is a pointwise exponential in real space on a 2x padded grid. Exact
// sub-flows make the stiffness in 1/eps^2 and 1/delta^2 a pure accuracy
// question; the step size rule lives in SolverParams.

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "kinavg/driving.hpp"
#include "kinavg/velocity.hpp"

namespace kinavg {

struct SolverParams {
    double epsilon = 0.1;
    double delta = 0.1;
    double dt_slow = 0.0;   // 0 = derive from the accuracy rule below
    double T = 1.0;
    int n_modes = 64;       // spatial modes per axis (power of two)
    double c1 = 0.5;        // dt <= c1 * eps^2   (resolve the relaxation scale)
    double c2 = 0.5;        // dt <= c2 * delta^2 (resolve driving decorrelation)
    double alpha = 0.5;     // stopping-time exponent, in (0, 1)
    bool stopped_mode = true;      // evolve the stopped process f^{tau_delta}
    bool check_apriori = true;     // assert the weighted-norm a priori bound
    double apriori_slack = 1.1;    // discretization slack on the bound
    int n_outputs = 64;            // number of stored snapshots (plus t = 0)
};

// Largest admissible epsilon and delta for this configuration:
//   eps0 = min(1, (4 (||a|| + ||b||) (1 + T ||sigma_bar||_C1))^-1),
//   delta0 = min(1, |ell0|^-1).
struct ParamBounds {
    double eps0 = 1.0;
    double delta0 = 1.0;
};
ParamBounds admissible_bounds(const VelocityModel& model, const SigmaModel& s, double m_bar,
                              double ell0, double T);

// Throws std::invalid_argument naming the violated bound.
void validate_params(const SolverParams& p, const VelocityModel& model, const SigmaModel& s,
                     double m_bar, double ell0);

// Effective slow step from the accuracy rule (or the explicit override).
double effective_dt(const SolverParams& p, const SigmaModel& s);

// --- exact sub-flows --------------------------------------------------------

KineticField transport_step(const KineticField& f, const VelocityModel& model, double eps,
                            double h);
KineticField relaxation_step(const KineticField& f, const VelocityModel& model, double eps,
                             double h);
KineticField reaction_step(const KineticField& f, const SigmaModel& s, double ell, double h);

// --- path solve -------------------------------------------------------------

struct PathDiagnostics {
    std::vector<double> t;              // stored output times
    std::vector<Spectrum> rho;          // density snapshots
    std::vector<double> norm_f;         // ||f||_{L2(M^-1)}
    std::vector<double> norm_Lf;        // ||Lf||_{L2(M^-1)}
    std::vector<double> relax_integral; // (1/2 eps^2) int_0^{t ^ tau} ||Lf||^2 ds
    std::optional<double> tau_hit;
    bool failed = false;
    std::string failure;                // diagnostic when failed
    double apriori_bound = 0.0;         // 1.1 * C(T) ||f0||^2, for reference
    bool apriori_violated = false;
};

// Constant C(T) of the weighted-norm a priori estimate, traced through the
// Gronwall argument:
//   C0(T) = ||b|| (1 + T ||sigma_bar||_C1) + 4 (||a|| + ||b||)^2 (1 + T ||sigma_bar||_C1)^2
//   C(T)  = exp(2 + 2 T ||sigma_bar||_C0) * exp(2 C0(T) T).
double apriori_constant(const VelocityModel& model, const SigmaModel& s, double m_bar, double T);

PathDiagnostics solve_path(const KineticField& f0, const SolverParams& p,
                           const VelocityModel& model, const SigmaModel& s,
                           const OUProcess& driving0, RngStream& rng);

}  // namespace kinavg
