#pragma once

#include <optional>
#include <utility>

namespace mfg {

/// Parameters of the GBM / isoelastic-profit case study. r = 0 selects the
/// ergodic problem.
struct CaseStudyParams {
    double delta = 2.0;
    double sigma = 1.0;
    double beta = 0.6;
    double r = 0.0;
};

/// Closed-form equilibrium of the case study; the exact oracle for the
/// general solver.
struct GbmEquilibrium {
    double rho_star = 0.0;    // equilibrium price index theta^-(1+beta)
    double theta_star = 0.0;  // population aggregate
    double x_star = 0.0;      // reflection barrier
    std::optional<double> lambda_star;  // ergodic value, ergodic case only
};

namespace gbm {

/// Characteristic exponents (m(r), n(r)) with m < 0 < 1 < n for r > 0 and
/// m(0) = 0, n(0) = 1 + 2 delta / sigma^2.
std::pair<double, double> exponents(const CaseStudyParams& p);

/// Discounted equilibrium (requires p.r > 0).
GbmEquilibrium discounted_equilibrium(const CaseStudyParams& p);

/// Ergodic equilibrium (p.r ignored); lambda_star filled from the general
/// value formula b(x*) + pi(x*, theta*).
GbmEquilibrium ergodic_equilibrium(const CaseStudyParams& p);

}  // namespace gbm
}  // namespace mfg
