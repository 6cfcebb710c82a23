#pragma once

#include <functional>
#include <optional>

#include "mfg/diffusion.hpp"

namespace mfg {

enum class ProfitKind { isoelastic, custom };

/// Running profit pi(x, theta) with partials, plus the aggregator pair
/// (F, f) mapping the stationary mean of f into the population term
/// theta = F(int f dmu). Immutable after construction.
class ProfitModel {
public:
    /// pi(x,theta) = x^beta theta^-(1+beta), f(x) = x^beta, F(y) = y^(1/beta).
    static ProfitModel isoelastic(double beta);

    using Fn2 = std::function<double(double, double)>;
    using Fn1 = std::function<double(double)>;
    static ProfitModel custom(Fn2 pi, Fn2 pi_x, Fn2 pi_xtheta, Fn1 F, Fn1 f,
                              Fn1 F_inv);

    double pi(double x, double theta) const { return pi_(x, theta); }
    double pi_x(double x, double theta) const { return pi_x_(x, theta); }
    double pi_xtheta(double x, double theta) const { return pi_xtheta_(x, theta); }
    double F(double y) const { return F_(y); }
    double f(double x) const { return f_(x); }
    double F_inv(double theta) const { return F_inv_(theta); }

    /// theta(mu) = F(int f dmu); input is the mean of f already computed.
    double aggregate(double mean_of_f) const;

    ProfitKind kind() const { return kind_; }
    std::optional<double> beta() const;

private:
    ProfitModel() = default;
    ProfitKind kind_ = ProfitKind::custom;
    double beta_ = 0.0;
    Fn2 pi_, pi_x_, pi_xtheta_;
    Fn1 F_, f_, F_inv_;
};

/// The unique sign-change point of x -> pi_x(x,theta) - r + b'(x): positive
/// marginal net profit below, negative above. Ergodic mode uses r = 0.
double x_hat(const ProfitModel& profit, const DiffusionModel& diffusion,
             double theta, double r);

}  // namespace mfg
