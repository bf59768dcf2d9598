#pragma once

// Velocity measure space (V, mu), the Maxwellian equilibrium profile, the
// velocity fields a and b, the BGK relaxation operator Lf = rho*M - f, and the
// averaged transport coefficients
//
//     K = sum_j mu_j M_j a_j (x) a_j,     J = sum_j mu_j M_j b_j.
//
// Two model families are shipped: discrete velocities V = {+-1}^d with the
// counting measure and a(v) = v, and a 1-d continuous family with Gaussian
// Maxwellian and the relativistic speed profile a(v) = v / sqrt(1 + v^2),
// discretized by a Gauss rule built for that profile (see velocity.cpp).
//
// Moment sums are always taken in ascending node order so results are
// bit-for-bit reproducible.

#include <array>
#include <vector>

#include "kinavg/fourier.hpp"

namespace kinavg {

using Vec2 = std::array<double, 2>;

struct VelocityModel {
    int dim = 1;                      // spatial dimension d (1 or 2)
    std::vector<Vec2> nodes;          // velocity points v_j
    std::vector<double> weights;      // quadrature weights mu_j > 0
    std::vector<double> maxwellian;   // M_j > 0
    std::vector<Vec2> a_field;        // a(v_j)
    std::vector<Vec2> b_field;        // b(v_j)

    int n_nodes() const { return int(nodes.size()); }
    double a_sup() const;             // max_j |a_j|
    double b_sup() const;             // max_j |b_j|
};

struct AveragedCoefficients {
    double K[2][2] = {{0, 0}, {0, 0}};  // symmetric positive d x d matrix
    Vec2 J = {0, 0};

    // k . K k for a (signed) frequency vector
    double quad(double k1, double k2) const {
        return K[0][0] * k1 * k1 + 2.0 * K[0][1] * k1 * k2 + K[1][1] * k2 * k2;
    }
    std::array<double, 2> eigenvalues() const;
};

// V = {+-1}^d, counting measure, M_j = 2^-d, a(v) = v, b(v) = b_const.
VelocityModel make_discrete_model(int dim, Vec2 b_const = {0.0, 0.0});

// d = 1 continuous family; n_nodes >= 8, even. b = 0.
VelocityModel make_continuous_model(int dim, int n_nodes);

// Throws if normalization, centering or positivity fail (tolerance 1e-12).
void check_model_invariants(const VelocityModel& model);

AveragedCoefficients averaged_coefficients(const VelocityModel& model);

// --- kinetic fields -------------------------------------------------------

// f(x, v_j): one Spectrum of spatial Fourier coefficients per velocity node.
struct KineticField {
    int dim = 1;
    int n = 0;                     // spatial modes per axis
    std::vector<Spectrum> node;    // size = model.n_nodes()

    KineticField() = default;
    KineticField(int dim_, int n_, int n_nodes) : dim(dim_), n(n_), node(n_nodes, Spectrum(dim_, n_)) {}
    int n_nodes() const { return int(node.size()); }

    KineticField& operator+=(const KineticField& o);
    KineticField& operator-=(const KineticField& o);
    KineticField& operator*=(double s);
    friend KineticField operator+(KineticField a, const KineticField& b) { return a += b; }
    friend KineticField operator-(KineticField a, const KineticField& b) { return a -= b; }
    friend KineticField operator*(KineticField a, double s) { return a *= s; }
};

// rho = <f> = sum_j mu_j f(., v_j), mode by mode.
Spectrum density(const KineticField& f, const VelocityModel& model);

// Lf = rho*M - f.
KineticField bgk_apply(const KineticField& f, const VelocityModel& model);

// f = rho * M (local equilibrium).
KineticField equilibrium_field(const Spectrum& rho, const VelocityModel& model);

// ||f||_{L2(M^-1)} = (sum_j mu_j / M_j * sum_k |fhat_k(v_j)|^2)^{1/2}.
double weighted_norm(const KineticField& f, const VelocityModel& model);

}  // namespace kinavg
