#pragma once

#include <cmath>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mfg/numerics.hpp"

namespace mfg {

enum class DiffusionKind { gbm, affine, custom };

/// Grid-sampled assumption checks for a diffusion on (0, inf).
struct ValidationReport {
    double discount_gap = 0.0;        // inf over grid of r - b'(x)
    bool discount_gap_ok = false;     // gap > 0 (discounted) / b' < 0 (ergodic)
    double speed_tail_mass = 0.0;     // estimated int_a^inf m'(y) dy at grid front
    bool positively_recurrent = false;
    double x_b_sigma = 0.0;           // largest grid x with 2xb(x)+sigma^2(x) > 0
    bool natural_boundaries_checked = false;  // constructive only for built-ins
    std::vector<std::string> failures;
    bool ok() const { return failures.empty(); }
};

/// A regular one-dimensional diffusion on (0, inf) with C^1 coefficients.
/// Exposes the scale density S', the speed density m', and the hatted
/// variants S_hat' = S'/sigma^2 and m_hat' = 2/S' of the derivative process.
/// Immutable after construction.
class DiffusionModel {
public:
    static DiffusionModel gbm(double delta, double sigma, double x_anchor = 1.0);
    static DiffusionModel affine(double kappa, double lambda, double sigma,
                                 double x_anchor = 1.0);
    /// Tabulated coefficients on an increasing grid; derivatives must be
    /// supplied, not differenced.
    static DiffusionModel custom(std::vector<double> x, std::vector<double> b,
                                 std::vector<double> b_prime,
                                 std::vector<double> sigma,
                                 std::vector<double> sigma_prime,
                                 double x_anchor = 1.0);

    double drift(double x) const { return b_(x); }
    double drift_prime(double x) const { return b_prime_(x); }
    double vol(double x) const;
    double vol_prime(double x) const { return sigma_prime_(x); }

    double x_anchor() const { return x_anchor_; }
    DiffusionKind kind() const { return kind_; }

    /// S'(x) = exp(-int_{x_anchor}^x 2 b/sigma^2); S'(x_anchor) = 1.
    double scale_density(double x) const { return std::exp(log_scale_density(x)); }
    double log_scale_density(double x) const;
    /// m'(x) = 2 / (sigma^2(x) S'(x)).
    double speed_density(double x) const;
    /// S_hat'(x) = S'(x)/sigma^2(x).
    double scale_density_hat(double x) const;
    /// m_hat'(x) = 2/S'(x).
    double speed_density_hat(double x) const;

    /// Returns a copy anchored at a different reference point (used by the
    /// anchor-invariance tests).
    DiffusionModel with_anchor(double x_anchor) const;

    /// Grid-sampled checks of the standing assumptions. ergodic = true
    /// checks b' < 0 instead of r - b' > 0.
    ValidationReport validate(double r, std::span<const double> grid,
                              bool ergodic = false) const;

    /// GBM shortcut parameters when kind() == gbm.
    std::optional<std::pair<double, double>> gbm_params() const;  // {delta, sigma}

private:
    DiffusionModel() = default;

    DiffusionKind kind_ = DiffusionKind::custom;
    double x_anchor_ = 1.0;
    std::function<double(double)> b_, b_prime_, sigma_, sigma_prime_;
    // Closed-form log scale density when available; otherwise a cached
    // cumulative quadrature of 2b/sigma^2 shared between copies.
    std::function<double(double)> log_scale_;
    double delta_ = 0.0, sigma_const_ = 0.0;  // gbm shortcut
};

}  // namespace mfg
