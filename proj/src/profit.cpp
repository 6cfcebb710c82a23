#include "mfg/profit.hpp"

#include <cmath>

namespace mfg {

ProfitModel ProfitModel::isoelastic(double beta) {
    if (!(beta > 0.0 && beta < 1.0))
        throw AssumptionError("isoelastic profit: beta must lie in (0,1)");
    ProfitModel m;
    m.kind_ = ProfitKind::isoelastic;
    m.beta_ = beta;
    m.pi_ = [beta](double x, double t) {
        return std::pow(x, beta) * std::pow(t, -(1.0 + beta));
    };
    m.pi_x_ = [beta](double x, double t) {
        return beta * std::pow(x, beta - 1.0) * std::pow(t, -(1.0 + beta));
    };
    m.pi_xtheta_ = [beta](double x, double t) {
        return -beta * (1.0 + beta) * std::pow(x, beta - 1.0) *
               std::pow(t, -(2.0 + beta));
    };
    m.f_ = [beta](double x) { return std::pow(x, beta); };
    m.F_ = [beta](double y) { return std::pow(y, 1.0 / beta); };
    m.F_inv_ = [beta](double t) { return std::pow(t, beta); };
    return m;
}

ProfitModel ProfitModel::custom(Fn2 pi, Fn2 pi_x, Fn2 pi_xtheta, Fn1 F, Fn1 f,
                                Fn1 F_inv) {
    ProfitModel m;
    m.kind_ = ProfitKind::custom;
    m.pi_ = std::move(pi);
    m.pi_x_ = std::move(pi_x);
    m.pi_xtheta_ = std::move(pi_xtheta);
    m.F_ = std::move(F);
    m.f_ = std::move(f);
    m.F_inv_ = std::move(F_inv);
    return m;
}

double ProfitModel::aggregate(double mean_of_f) const {
    if (!std::isfinite(mean_of_f))
        throw AssumptionError("aggregate: non-finite mean of f");
    return F_(mean_of_f);
}

std::optional<double> ProfitModel::beta() const {
    if (kind_ != ProfitKind::isoelastic) return std::nullopt;
    return beta_;
}

double x_hat(const ProfitModel& profit, const DiffusionModel& diffusion,
             double theta, double r) {
    if (!(theta > 0.0)) throw AssumptionError("x_hat: theta must be positive");
    auto net_marginal = [&](double x) {
        return profit.pi_x(x, theta) - r + diffusion.drift_prime(x);
    };
    // theta-scaled initial guess; expand geometrically to the hard bounds.
    double guess = 1.0;
    if (auto beta = profit.beta()) {
        const double denom = r - diffusion.drift_prime(1.0);
        if (denom > 0.0)
            guess = std::pow(*beta / (denom * std::pow(theta, 1.0 + *beta)),
                             1.0 / (1.0 - *beta));
    }
    if (!(guess > 0.0) || !std::isfinite(guess)) guess = 1.0;
    std::pair<double, double> br;
    try {
        br = num::expand_bracket(net_marginal, guess, 1e-8, 1e8);
    } catch (const AssumptionError&) {
        throw AssumptionError(
            "x_hat: marginal net profit has no sign change in [1e-8, 1e8]");
    }
    return num::bisect(net_marginal, br.first, br.second, 1e-12).x;
}

}  // namespace mfg
