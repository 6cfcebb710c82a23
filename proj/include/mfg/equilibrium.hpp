#pragma once

#include <memory>
#include <optional>

#include "mfg/fundamental.hpp"
#include "mfg/profit.hpp"
#include "mfg/stationary.hpp"

namespace mfg {

enum class Mode { discounted, ergodic };

struct SolverConfig {
    double bisect_tol = 1e-12;     // relative, both nested bisections
    double quad_rel_tol = 1e-10;
    double x_lo = 1e-6;            // fundamental-solution domain
    double x_hi = 1e6;
    double theta_cap = 1e8;        // give up above this aggregate
    int max_expand = 60;
    SolveMethod fundamental_method = SolveMethod::automatic;
};

struct EquilibriumSolution {
    Mode mode = Mode::discounted;
    double r = 0.0;
    double x_star = 0.0;           // reflection barrier
    double theta_star = 0.0;       // equilibrium aggregate
    double ergodic_value = 0.0;    // lambda* (ergodic mode only)
    double K_residual = 0.0;       // barrier optimality integral at solution
    double Q_residual = 0.0;       // aggregate consistency gap at solution
    int iterations = 0;            // outer bisection steps
};

/// Discounted value function of the representative player at equilibrium:
/// v = vbar + A phi_r, where vbar is the resolvent of the running profit and
/// A matches the smooth-fit condition at the barrier.
class ValueFunction {
public:
    double operator()(double x) const;
    double deriv(double x) const;
    double second_deriv(double x) const;
    double coeff_A() const;
    double barrier() const;

private:
    friend class EquilibriumProblem;
    struct Data;
    std::shared_ptr<const Data> d_;
};

class EquilibriumProblem {
public:
    EquilibriumProblem(DiffusionModel diffusion, ProfitModel profit,
                       SolverConfig config = {});

    /// Barrier optimality integral K(x, theta); the equilibrium barrier is
    /// its root in x. Decreasing from +inf near 0 to a negative value at the
    /// profit-drift break-even point.
    double K_integral(double x, double theta, double r, Mode mode) const;

    /// Root of K in x for fixed aggregate (errors if no sign change).
    double barrier_for(double theta, double r, Mode mode) const;

    /// Aggregate consistency gap Q(theta) = E[f(X)] - F^{-1}(theta) under
    /// the stationary law reflected at barrier_for(theta).
    double Q_gap(double theta, double r, Mode mode) const;

    EquilibriumSolution solve(Mode mode, double r = 0.0) const;

    /// Stationary law at a solved equilibrium.
    TruncatedSpeedLaw stationary_law(const EquilibriumSolution& eq) const;

    /// Discounted value function at a solved equilibrium (discounted mode).
    ValueFunction value_function(const EquilibriumSolution& eq) const;

    const DiffusionModel& diffusion() const { return diffusion_; }
    const ProfitModel& profit() const { return profit_; }
    const SolverConfig& config() const { return config_; }

private:
    const FundamentalSolution& phi_hat(double r, Mode mode) const;

    DiffusionModel diffusion_;
    ProfitModel profit_;
    SolverConfig config_;
    // cache of the hatted decreasing solution keyed by (r, mode)
    struct Cache;
    std::shared_ptr<Cache> cache_;
};

}  // namespace mfg
