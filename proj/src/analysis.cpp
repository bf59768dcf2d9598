#include "kinavg/analysis.hpp"

#include <cmath>
#include <stdexcept>

namespace kinavg {

namespace {
constexpr double kFourPi2 = 39.478417604357434475337963999505;
}

double h_neg_norm(const Spectrum& rho, double varsigma) {
    if (!(varsigma > 0.0) || varsigma > 1.0)
        throw std::invalid_argument("h_neg_norm: varsigma must be in (0, 1]");
    double s = 0.0;
    rho.for_each_mode([&](std::size_t i, int k1, int k2) {
        const double w = std::pow(1.0 + kFourPi2 * double(k1 * k1 + k2 * k2), -varsigma);
        s += w * std::norm(rho[i]);
    });
    return std::sqrt(s);
}

RateFit fit_rate(std::span<const std::pair<double, double>> samples) {
    if (samples.size() < 4) throw std::invalid_argument("fit_rate: need at least 4 samples");
    double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
    const double n = double(samples.size());
    for (const auto& [scale, err] : samples) {
        if (!(scale > 0.0) || !(err > 0.0))
            throw std::invalid_argument("fit_rate: samples must be positive");
        const double x = std::log(scale), y = std::log(err);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        syy += y * y;
    }
    RateFit fit;
    const double den = n * sxx - sx * sx;
    fit.slope = (n * sxy - sx * sy) / den;
    fit.intercept = (sy - fit.slope * sx) / n;
    const double ss_tot = syy - sy * sy / n;
    double ss_res = 0.0;
    for (const auto& [scale, err] : samples) {
        const double d = std::log(err) - (fit.intercept + fit.slope * std::log(scale));
        ss_res += d * d;
    }
    fit.r2 = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
    return fit;
}

double pairwise_sum(std::span<const double> values) {
    if (values.size() <= 8) {
        double s = 0.0;
        for (double v : values) s += v;
        return s;
    }
    const std::size_t half = values.size() / 2;
    return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

}  // namespace kinavg
