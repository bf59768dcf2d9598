#pragma once

// Error metrics and fits: negative Sobolev norms on the torus, sup-in-time
// and time-integrated trajectory distances, and least-squares rate fitting.
// The H^{-s} convention is fixed once and for all:
//
//     ||rho||_{H^-s}^2 = sum_k (1 + 4 pi^2 |k|^2)^-s |rho_k|^2.

#include <span>
#include <vector>

#include "kinavg/fourier.hpp"
#include "kinavg/velocity.hpp"

namespace kinavg {

// varsigma must lie in (0, 1].
double h_neg_norm(const Spectrum& rho, double varsigma);

struct RateFit {
    double slope = 0;
    double intercept = 0;
    double r2 = 0;
};

// Least-squares fit of log(error) against log(scale); needs >= 4 positive samples.
RateFit fit_rate(std::span<const std::pair<double, double>> samples);

// Deterministic summation independent of accumulation order at call sites.
double pairwise_sum(std::span<const double> values);

struct ErrorRecord {
    double eps = 0, delta = 0;
    int replication = 0;
    double err_hneg_T = 0;    // ||rho(T) - rho_bar(T)||_{H^-s}
    double err_sup_hneg = 0;  // sup over stored times
    double err_l2_time = 0;   // (int_0^T ||rho - rho_bar||_{L2}^2 dt)^{1/2}
    bool tau_hit = false;
    bool apriori_ok = true;   // weighted-norm bound held at every output time
    bool failed = false;
};

}  // namespace kinavg
