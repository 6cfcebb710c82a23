#pragma once

#include <cmath>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <utility>
#include <vector>

#include "mfg/diffusion.hpp"

namespace mfg {

enum class Branch { phi_decreasing, psi_increasing };
enum class SolveMethod { automatic, closed_form_gbm, ode_shooting };

/// One fundamental solution of L u = r u (plain) or of the derivative-process
/// equation L_hat u = (r - b') u (hatted). Value is pinned to 1 at the
/// normalization point; solutions are only defined up to a positive factor.
/// Beyond the computed domain the solution is extended as an exact power law
/// matching the boundary log-slope. Immutable and shareable.
class FundamentalSolution {
public:
    double value(double x) const { return std::exp(log_value(x)); }
    double log_value(double x) const;
    double deriv(double x) const;         // du/dx
    double second_deriv(double x) const;  // from the defining ODE
    /// Log-log slope ell(x) = x u'(x) / u(x).
    double log_slope(double x) const;

    double r() const { return r_; }
    Branch branch() const { return branch_; }
    SolveMethod method() const { return method_; }
    bool hatted() const { return hatted_; }
    double normalization_point() const { return x_norm_; }
    std::pair<double, double> domain() const { return {x_lo_, x_hi_}; }

    /// ODE residual |1/2 sigma^2 u'' + B u' - R u| / (|R u| + 1) measured
    /// with the interpolated log-slope (independent of the ODE right-hand
    /// side at x). Zero by definition for the closed-form branch.
    double residual(double x) const;

    /// CSV rows (x, value, derivative, residual) on the internal grid.
    void dump_csv(std::ostream& os) const;

private:
    friend FundamentalSolution solve_fundamental(const DiffusionModel&, double,
                                                 Branch, bool,
                                                 std::pair<double, double>,
                                                 double, SolveMethod);
    FundamentalSolution() = default;

    double drift_coeff(double x) const;      // B(x)
    double potential_coeff(double x) const;  // R(x)

    double r_ = 0.0;
    Branch branch_ = Branch::phi_decreasing;
    SolveMethod method_ = SolveMethod::closed_form_gbm;
    bool hatted_ = false;
    double x_norm_ = 1.0;
    double x_lo_ = 0.0, x_hi_ = 0.0;
    double exponent_ = 0.0;  // closed-form power

    // ode_shooting storage: log-grid t = ln x with ln u and ell = d ln u/dt.
    struct OdeData {
        std::vector<double> t, lnu, ell, ell_dot;
        double lnu_norm = 0.0;
        DiffusionModel diffusion;
    };
    std::shared_ptr<const OdeData> ode_;
};

/// Solve for the decreasing (phi) or increasing (psi) fundamental solution.
/// hatted = true solves the derivative-process equation directly (required
/// for the ergodic r = 0 case). For gbm models the closed form is used
/// unless ode_shooting is forced.
FundamentalSolution solve_fundamental(
    const DiffusionModel& diffusion, double r, Branch branch, bool hatted,
    std::pair<double, double> domain, double normalization_point = 0.0,
    SolveMethod method = SolveMethod::automatic);

/// Wronskian w_r = [psi' phi - phi' psi] / S', constant in x; evaluated at
/// three points and averaged, with a consistency check on the spread.
double wronskian(const FundamentalSolution& psi, const FundamentalSolution& phi,
                 const DiffusionModel& diffusion, double x_probe,
                 double max_rel_spread = 1e-6);

struct McEstimate {
    double estimate = 0.0;
    double std_error = 0.0;
    bool horizon_warning = false;  // >1% of paths hit the truncation horizon
};

/// Monte Carlo estimate of phi_hat_r(y)/phi_hat_r(a) from the probabilistic
/// representation E[exp(int_0^{tau_a} (b'(X_hat_s) - r) ds)], simulating
/// X_hat (drift b + sigma sigma') until first passage below a.
McEstimate phi_hat_mc(const DiffusionModel& diffusion, double r, double y,
                      double a, std::size_t paths, std::uint64_t seed,
                      double dt = 1e-3, double horizon = 200.0);

}  // namespace mfg
