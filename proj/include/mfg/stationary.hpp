#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <random>

#include "mfg/diffusion.hpp"

namespace mfg {

/// Stationary law of the diffusion reflected at a lower barrier z: the
/// normalized speed measure restricted to [z, inf). For gbm models this is
/// a Pareto law with tail exponent alpha = 2 delta / sigma^2 + 1, handled in
/// closed form; otherwise the cdf is tabulated on a log grid and inverted
/// monotonically.
class TruncatedSpeedLaw {
public:
    TruncatedSpeedLaw(const DiffusionModel& diffusion, double barrier);

    double barrier() const { return z_; }
    double normalization() const { return mass_; }

    double density(double x) const;  // zero below the barrier
    double cdf(double x) const;
    double quantile(double u) const;  // u in [0, 1)
    double sample(std::mt19937_64& engine) const;

    /// E[g(X)] under the stationary law, by quadrature (or closed form for
    /// pure powers under the Pareto branch via mean_power).
    double mean_of(const std::function<double(double)>& g) const;
    double mean_power(double exponent) const;  // E[X^p], requires p < alpha
    double mean() const { return mean_power(1.0); }

    std::optional<double> pareto_alpha() const { return alpha_; }

private:
    DiffusionModel diffusion_;
    double z_;
    double mass_ = 0.0;                   // integral of m' over [z, inf)
    std::optional<double> alpha_;         // Pareto tail exponent (gbm)
    std::optional<num::Pchip> cdf_tab_;   // general branch: cdf over ln x
    std::optional<num::Pchip> quant_tab_; // inverse cdf: u -> ln x
    double x_max_ = 0.0;                  // tabulation end (general branch)
};

}  // namespace mfg
