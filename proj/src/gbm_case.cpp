#include "mfg/gbm_case.hpp"

#include <cmath>

#include "mfg/numerics.hpp"

namespace mfg::gbm {

std::pair<double, double> exponents(const CaseStudyParams& p) {
    const double s2 = p.sigma * p.sigma;
    const double a = p.delta / s2 + 0.5;
    const double q = std::sqrt(a * a + 2.0 * p.r / s2);
    return {a - q, a + q};
}

GbmEquilibrium discounted_equilibrium(const CaseStudyParams& p) {
    if (!(p.r > 0.0))
        throw AssumptionError("discounted_equilibrium: requires r > 0");
    const double s2 = p.sigma * p.sigma;
    const double beta = p.beta;
    const auto [m, n] = exponents(p);
    const double nbar = 1.0 + 2.0 * p.delta / s2;
    const double rho =
        std::pow((nbar - beta) / nbar, (1.0 - beta * beta) / (2.0 * beta)) *
        std::pow(s2 * (n - beta) * (1.0 - m) / (2.0 * beta), (1.0 + beta) / 2.0);
    const double H = 2.0 * rho / (s2 * (n - beta) * (beta - m));
    GbmEquilibrium e;
    e.rho_star = rho;
    e.theta_star = std::pow(rho, -1.0 / (1.0 + beta));
    e.x_star = std::pow(H * beta * (beta - m) / (1.0 - m), 1.0 / (1.0 - beta));
    return e;
}

GbmEquilibrium ergodic_equilibrium(const CaseStudyParams& p) {
    const double s2 = p.sigma * p.sigma;
    const double beta = p.beta;
    const double n = 1.0 + 2.0 * p.delta / s2;
    // gamma in the printed formula is the volatility sigma (the r -> 0 limit
    // of the discounted expression requires it).
    const double rho =
        std::pow((n - beta) / n, (1.0 - beta * beta) / (2.0 * beta)) *
        std::pow(s2 * (n - beta) / (2.0 * beta), (1.0 + beta) / 2.0);
    GbmEquilibrium e;
    e.rho_star = rho;
    e.theta_star = std::pow(rho, -1.0 / (1.0 + beta));
    e.x_star = std::pow(2.0 * rho * beta / (s2 * (n - beta)), 1.0 / (1.0 - beta));
    e.lambda_star = -p.delta * e.x_star + std::pow(e.x_star, beta) * rho;
    return e;
}

}  // namespace mfg::gbm
