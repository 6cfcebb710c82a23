#include "mfg/equilibrium.hpp"

#include <cmath>
#include <map>
#include <mutex>

namespace mfg {

struct EquilibriumProblem::Cache {
    std::mutex mu;
    std::map<std::pair<double, int>, FundamentalSolution> phi_hat;
};

EquilibriumProblem::EquilibriumProblem(DiffusionModel diffusion,
                                       ProfitModel profit, SolverConfig config)
    : diffusion_(std::move(diffusion)),
      profit_(std::move(profit)),
      config_(config),
      cache_(std::make_shared<Cache>()) {}

const FundamentalSolution& EquilibriumProblem::phi_hat(double r,
                                                       Mode mode) const {
    const double r_eff = (mode == Mode::ergodic) ? 0.0 : r;
    std::lock_guard<std::mutex> lock(cache_->mu);
    auto key = std::make_pair(r_eff, static_cast<int>(mode));
    auto it = cache_->phi_hat.find(key);
    if (it == cache_->phi_hat.end()) {
        it = cache_->phi_hat
                 .emplace(key, solve_fundamental(
                                   diffusion_, r_eff, Branch::phi_decreasing,
                                   /*hatted=*/true, {config_.x_lo, config_.x_hi},
                                   0.0, config_.fundamental_method))
                 .first;
    }
    return it->second;
}

double EquilibriumProblem::K_integral(double x, double theta, double r,
                                      Mode mode) const {
    if (!(x > 0.0 && theta > 0.0))
        throw AssumptionError("K_integral: need x > 0 and theta > 0");
    const double r_eff = (mode == Mode::ergodic) ? 0.0 : r;
    const auto& ph = phi_hat(r, mode);
    const double log_ph_x = ph.log_value(x);
    auto integrand = [&](double y) {
        const double ratio = std::exp(ph.log_value(y) - log_ph_x);
        const double net =
            profit_.pi_x(y, theta) - r_eff + diffusion_.drift_prime(y);
        return ratio * net * diffusion_.speed_density_hat(y);
    };
    auto q = num::integrate_to_inf(integrand, x, config_.quad_rel_tol);
    if (q.truncated_tail)
        throw NumericalError("K_integral: improper integral did not converge");
    return q.value;
}

double EquilibriumProblem::barrier_for(double theta, double r,
                                       Mode mode) const {
    const double r_eff = (mode == Mode::ergodic) ? 0.0 : r;
    // K is positive near 0 and negative at the marginal break-even point
    // xh, so the root lies in (0, xh)
    const double xh = x_hat(profit_, diffusion_, theta, r_eff);
    auto K = [&](double x) { return K_integral(x, theta, r, mode); };
    double lo = xh;
    double K_lo = K(xh);
    if (K_lo < 0.0) {
        for (int i = 0; i < config_.max_expand && K_lo < 0.0; ++i) {
            lo *= 0.5;
            K_lo = K(lo);
        }
        if (K_lo < 0.0)
            throw NumericalError("barrier_for: no sign change in K below x_hat");
    } else {
        throw NumericalError(
            "barrier_for: K(x_hat) >= 0; barrier assumptions violated");
    }
    auto root = num::bisect(K, lo, 2.0 * lo, config_.bisect_tol);
    if (!root.converged)
        throw NumericalError("barrier_for: bisection on K did not converge");
    return root.x;
}

double EquilibriumProblem::Q_gap(double theta, double r, Mode mode) const {
    const double z = barrier_for(theta, r, mode);
    TruncatedSpeedLaw law(diffusion_, z);
    const double mean_f = law.mean_of([&](double y) { return profit_.f(y); });
    return mean_f - profit_.F_inv(theta);
}

EquilibriumSolution EquilibriumProblem::solve(Mode mode, double r) const {
    if (mode == Mode::discounted && !(r > 0.0))
        throw AssumptionError("solve: discounted mode needs r > 0");

    // Q > 0 wherever f(x*(theta)) >= F^{-1}(theta) (the law sits above the
    // barrier and f is increasing), and Q is strictly decreasing beyond that
    // region, so any sign-change bracket isolates the unique root.
    auto Q = [&](double theta) { return Q_gap(theta, r, mode); };
    std::pair<double, double> br;
    try {
        br = num::expand_bracket(Q, 1.0, 1e-8, config_.theta_cap, 4.0);
    } catch (const AssumptionError&) {
        throw NumericalError(
            "solve: no equilibrium aggregate in [1e-8, cap]; the consistency "
            "gap never changes sign");
    }
    auto root = num::bisect(Q, br.first, br.second, config_.bisect_tol);
    if (!root.converged)
        throw NumericalError("solve: bisection on consistency gap failed");

    EquilibriumSolution eq;
    eq.mode = mode;
    eq.r = (mode == Mode::ergodic) ? 0.0 : r;
    eq.theta_star = root.x;
    eq.iterations = root.iters;
    eq.x_star = barrier_for(eq.theta_star, r, mode);
    eq.K_residual = K_integral(eq.x_star, eq.theta_star, r, mode);
    eq.Q_residual = Q_gap(eq.theta_star, r, mode);

    if (mode == Mode::ergodic)
        eq.ergodic_value = diffusion_.drift(eq.x_star) +
                           profit_.pi(eq.x_star, eq.theta_star);
    return eq;
}

TruncatedSpeedLaw EquilibriumProblem::stationary_law(
    const EquilibriumSolution& eq) const {
    return TruncatedSpeedLaw(diffusion_, eq.x_star);
}

// ---- discounted value function -------------------------------------------

struct ValueFunction::Data {
    DiffusionModel diffusion;
    ProfitModel profit;
    FundamentalSolution phi, psi;
    double r = 0.0, theta = 0.0, w = 0.0, A = 0.0, x_star = 0.0;
    double quad_rel_tol = 1e-10;

    // resolvent of the running profit for the unreflected process:
    // vbar = w^-1 [ phi(x) int_0^x psi pi m' + psi(x) int_x^inf phi pi m' ]
    double lower(double x) const {
        return num::integrate_from_zero(
                   [&](double y) {
                       return psi.value(y) * profit.pi(y, theta) *
                              diffusion.speed_density(y);
                   },
                   x, quad_rel_tol)
            .value;
    }
    double upper(double x) const {
        return num::integrate_to_inf(
                   [&](double y) {
                       return phi.value(y) * profit.pi(y, theta) *
                              diffusion.speed_density(y);
                   },
                   x, quad_rel_tol)
            .value;
    }
    double vbar(double x) const {
        return (phi.value(x) * lower(x) + psi.value(x) * upper(x)) / w;
    }
    double vbar_prime(double x) const {
        // the boundary terms of the two integrals cancel
        return (phi.deriv(x) * lower(x) + psi.deriv(x) * upper(x)) / w;
    }
    double vbar_second(double x) const {
        const double s = diffusion.vol(x);
        return 2.0 *
               (r * vbar(x) - diffusion.drift(x) * vbar_prime(x) -
                profit.pi(x, theta)) /
               (s * s);
    }
};

double ValueFunction::operator()(double x) const {
    // below the barrier the player pushes up immediately at unit cost
    if (x < d_->x_star)
        return (*this)(d_->x_star) - (d_->x_star - x);
    return d_->vbar(x) + d_->A * d_->phi.value(x);
}

double ValueFunction::deriv(double x) const {
    if (x < d_->x_star) return 1.0;
    return d_->vbar_prime(x) + d_->A * d_->phi.deriv(x);
}

double ValueFunction::second_deriv(double x) const {
    if (x < d_->x_star) return 0.0;
    return d_->vbar_second(x) + d_->A * d_->phi.second_deriv(x);
}

double ValueFunction::coeff_A() const { return d_->A; }
double ValueFunction::barrier() const { return d_->x_star; }

ValueFunction EquilibriumProblem::value_function(
    const EquilibriumSolution& eq) const {
    if (eq.mode != Mode::discounted)
        throw AssumptionError("value_function: discounted mode only");
    auto d = std::make_shared<ValueFunction::Data>(ValueFunction::Data{
        diffusion_, profit_,
        solve_fundamental(diffusion_, eq.r, Branch::phi_decreasing, false,
                          {config_.x_lo, config_.x_hi}, 0.0,
                          config_.fundamental_method),
        solve_fundamental(diffusion_, eq.r, Branch::psi_increasing, false,
                          {config_.x_lo, config_.x_hi}, 0.0,
                          config_.fundamental_method),
        eq.r, eq.theta_star, 0.0, 0.0, eq.x_star, config_.quad_rel_tol});
    d->w = wronskian(d->psi, d->phi, diffusion_, diffusion_.x_anchor());
    // smooth fit: v'' vanishes at the barrier together with v' = 1
    d->A = -d->vbar_second(eq.x_star) / d->phi.second_deriv(eq.x_star);
    ValueFunction v;
    v.d_ = d;
    return v;
}

}  // namespace mfg
