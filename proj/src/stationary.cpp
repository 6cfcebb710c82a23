#include "mfg/stationary.hpp"

#include <algorithm>
#include <cmath>

namespace mfg {

TruncatedSpeedLaw::TruncatedSpeedLaw(const DiffusionModel& diffusion,
                                     double barrier)
    : diffusion_(diffusion), z_(barrier) {
    if (!(z_ > 0.0))
        throw AssumptionError("TruncatedSpeedLaw: barrier must be > 0");

    if (auto p = diffusion_.gbm_params()) {
        const double alpha = 2.0 * p->first / (p->second * p->second) + 1.0;
        if (alpha <= 0.0)
            throw AssumptionError(
                "TruncatedSpeedLaw: speed measure not integrable (alpha <= 0)");
        alpha_ = alpha;
        // Pareto(alpha) on [z, inf); mass_ kept as the raw speed-measure
        // integral so density * mass_ reproduces m'.
        auto q = num::integrate_to_inf(
            [&](double y) { return diffusion_.speed_density(y); }, z_);
        mass_ = q.value;
        return;
    }

    auto q = num::integrate_to_inf(
        [&](double y) { return diffusion_.speed_density(y); }, z_);
    if (q.truncated_tail || !std::isfinite(q.value) || q.value <= 0.0)
        throw AssumptionError(
            "TruncatedSpeedLaw: speed measure does not normalize on [z, inf)");
    mass_ = q.value;

    // locate the 1 - 1e-9 quantile by doubling, then tabulate cdf on a log
    // grid and invert it
    double hi = 2.0 * z_;
    auto tail = [&](double x) {
        return num::integrate_to_inf(
                   [&](double y) { return diffusion_.speed_density(y); }, x)
                   .value /
               mass_;
    };
    while (tail(hi) > 1e-9 && hi < z_ * 1e12) hi *= 2.0;
    x_max_ = hi;

    const std::size_t n = 4096;
    std::vector<double> lx(n), u(n);
    const double t0 = std::log(z_), t1 = std::log(x_max_);
    double acc = 0.0;
    lx[0] = t0;
    u[0] = 0.0;
    for (std::size_t i = 1; i < n; ++i) {
        lx[i] = t0 + (t1 - t0) * static_cast<double>(i) /
                         static_cast<double>(n - 1);
        acc += num::integrate(
            [&](double y) { return diffusion_.speed_density(y); },
            std::exp(lx[i - 1]), std::exp(lx[i]), 1e-12);
        u[i] = std::min(acc / mass_, 1.0);
    }
    // strictly increasing u is required for the inverse table
    std::vector<double> lx2, u2;
    lx2.reserve(n);
    u2.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (i > 0 && u[i] <= u2.back()) continue;
        lx2.push_back(lx[i]);
        u2.push_back(u[i]);
    }
    cdf_tab_.emplace(lx2, u2);
    quant_tab_.emplace(u2, lx2);
}

double TruncatedSpeedLaw::density(double x) const {
    if (x < z_) return 0.0;
    if (alpha_) return *alpha_ * std::pow(z_ / x, *alpha_) / x;
    return diffusion_.speed_density(x) / mass_;
}

double TruncatedSpeedLaw::cdf(double x) const {
    if (x <= z_) return 0.0;
    if (alpha_) return 1.0 - std::pow(z_ / x, *alpha_);
    if (x >= x_max_) return 1.0;
    return std::clamp((*cdf_tab_)(std::log(x)), 0.0, 1.0);
}

double TruncatedSpeedLaw::quantile(double u) const {
    if (!(u >= 0.0 && u < 1.0))
        throw AssumptionError("TruncatedSpeedLaw::quantile: u must be in [0,1)");
    if (alpha_) return z_ * std::pow(1.0 - u, -1.0 / *alpha_);
    return std::exp((*quant_tab_)(u));
}

double TruncatedSpeedLaw::sample(std::mt19937_64& engine) const {
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    return quantile(unif(engine));
}

double TruncatedSpeedLaw::mean_power(double p) const {
    if (alpha_) {
        if (p >= *alpha_)
            throw AssumptionError(
                "TruncatedSpeedLaw::mean_power: moment diverges (p >= alpha)");
        return *alpha_ / (*alpha_ - p) * std::pow(z_, p);
    }
    return mean_of([p](double x) { return std::pow(x, p); });
}

double TruncatedSpeedLaw::mean_of(
    const std::function<double(double)>& g) const {
    auto q = num::integrate_to_inf(
        [&](double y) { return g(y) * density(y); }, z_);
    if (q.truncated_tail)
        throw NumericalError(
            "TruncatedSpeedLaw::mean_of: integral did not converge");
    return q.value;
}

}  // namespace mfg
