#include "mfg/fundamental.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <random>

namespace mfg {

namespace {

// Hermite interpolation on a uniform grid, value y with slope s.
double hermite(const std::vector<double>& t, const std::vector<double>& y,
               const std::vector<double>& s, double tq) {
    const double h = t[1] - t[0];
    if (tq <= t.front()) return y.front() + s.front() * (tq - t.front());
    if (tq >= t.back()) return y.back() + s.back() * (tq - t.back());
    std::size_t i = std::min<std::size_t>(
        static_cast<std::size_t>((tq - t.front()) / h), t.size() - 2);
    const double u = (tq - t[i]) / h;
    const double u2 = u * u, u3 = u2 * u;
    return y[i] * (2 * u3 - 3 * u2 + 1) + h * s[i] * (u3 - 2 * u2 + u) +
           y[i + 1] * (-2 * u3 + 3 * u2) + h * s[i + 1] * (u3 - u2);
}

double hermite_deriv(const std::vector<double>& t, const std::vector<double>& y,
                     const std::vector<double>& s, double tq) {
    const double h = t[1] - t[0];
    if (tq <= t.front()) return s.front();
    if (tq >= t.back()) return s.back();
    std::size_t i = std::min<std::size_t>(
        static_cast<std::size_t>((tq - t.front()) / h), t.size() - 2);
    const double u = (tq - t[i]) / h;
    const double u2 = u * u;
    return (y[i] * (6 * u2 - 6 * u) + h * s[i] * (3 * u2 - 4 * u + 1) +
            y[i + 1] * (-6 * u2 + 6 * u) + h * s[i + 1] * (3 * u2 - 2 * u)) / h;
}

}  // namespace

double FundamentalSolution::drift_coeff(double x) const {
    const DiffusionModel& d = ode_->diffusion;
    return hatted_ ? d.drift(x) + d.vol(x) * d.vol_prime(x) : d.drift(x);
}

double FundamentalSolution::potential_coeff(double x) const {
    const DiffusionModel& d = ode_->diffusion;
    return hatted_ ? r_ - d.drift_prime(x) : r_;
}

double FundamentalSolution::log_value(double x) const {
    if (!(x > 0.0)) throw AssumptionError("FundamentalSolution: x must be > 0");
    if (method_ == SolveMethod::closed_form_gbm)
        return exponent_ * std::log(x / x_norm_);
    const double t = std::log(x);
    return hermite(ode_->t, ode_->lnu, ode_->ell, t) - ode_->lnu_norm;
}

double FundamentalSolution::log_slope(double x) const {
    if (method_ == SolveMethod::closed_form_gbm) return exponent_;
    return hermite(ode_->t, ode_->ell, ode_->ell_dot, std::log(x));
}

double FundamentalSolution::deriv(double x) const {
    return value(x) * log_slope(x) / x;
}

double FundamentalSolution::second_deriv(double x) const {
    if (method_ == SolveMethod::closed_form_gbm)
        return value(x) * exponent_ * (exponent_ - 1.0) / (x * x);
    // from the defining equation: u'' = 2 (R u - B u') / sigma^2
    const double s = ode_->diffusion.vol(x);
    return 2.0 * (potential_coeff(x) * value(x) - drift_coeff(x) * deriv(x)) /
           (s * s);
}

double FundamentalSolution::residual(double x) const {
    // closed-form exponents satisfy the equation identically
    if (method_ == SolveMethod::closed_form_gbm) return 0.0;
    const double t = std::log(x);
    const double u = value(x);
    const double ell = hermite(ode_->t, ode_->ell, ode_->ell_dot, t);
    const double ell_dot = hermite_deriv(ode_->t, ode_->ell, ode_->ell_dot, t);
    const double up = u * ell / x;
    const double upp = u * (ell * ell + ell_dot - ell) / (x * x);
    const double B = drift_coeff(x);
    const double R = potential_coeff(x);
    const double s = ode_->diffusion.vol(x);
    const double lhs = 0.5 * s * s * upp + B * up - R * u;
    return std::abs(lhs) / (std::abs(R * u) + 1.0);
}

void FundamentalSolution::dump_csv(std::ostream& os) const {
    os << "x,value,derivative,residual\n";
    if (!ode_) return;
    for (std::size_t i = 0; i < ode_->t.size(); i += 8) {
        const double x = std::exp(ode_->t[i]);
        os << x << ',' << value(x) << ',' << deriv(x) << ',' << residual(x)
           << '\n';
    }
}

FundamentalSolution solve_fundamental(const DiffusionModel& diffusion, double r,
                                      Branch branch, bool hatted,
                                      std::pair<double, double> domain,
                                      double normalization_point,
                                      SolveMethod method) {
    FundamentalSolution fs;
    fs.r_ = r;
    fs.branch_ = branch;
    fs.hatted_ = hatted;
    fs.x_norm_ = normalization_point > 0.0 ? normalization_point
                                           : diffusion.x_anchor();
    fs.x_lo_ = domain.first;
    fs.x_hi_ = domain.second;
    if (!(fs.x_lo_ > 0.0 && fs.x_lo_ < fs.x_norm_ && fs.x_norm_ < fs.x_hi_))
        throw AssumptionError(
            "solve_fundamental: need 0 < x_lo < normalization point < x_hi");

    if (method == SolveMethod::automatic)
        method = diffusion.gbm_params() ? SolveMethod::closed_form_gbm
                                        : SolveMethod::ode_shooting;
    fs.method_ = method;

    if (method == SolveMethod::closed_form_gbm) {
        auto p = diffusion.gbm_params();
        if (!p)
            throw AssumptionError("closed_form_gbm requested for non-gbm model");
        const double s2 = p->second * p->second;
        const double a = p->first / s2 + 0.5;
        const double q = std::sqrt(a * a + 2.0 * r / s2);
        const double k = (branch == Branch::phi_decreasing) ? a - q : a + q;
        fs.exponent_ = hatted ? k - 1.0 : k;
        return fs;
    }

    // ODE shooting in t = ln x on the Riccati system
    //   d(ln u)/dt = ell,
    //   d(ell)/dt  = ell + (2 x^2 / sigma^2) R - (2 x / sigma^2) B ell - ell^2,
    // started at the far boundary with the local characteristic root (WKB
    // matching): the frozen-coefficient quadratic
    //   (sigma^2/2) ell^2 + (B x - sigma^2/2) ell - R x^2 = 0
    // has one negative and one positive root; phi takes the negative one at
    // x_hi (decay), psi the positive one at x_lo (growth). Contamination by
    // the other mode dies off exponentially in the integration direction.
    auto data = std::make_shared<FundamentalSolution::OdeData>(
        FundamentalSolution::OdeData{{}, {}, {}, {}, 0.0, diffusion});
    fs.ode_ = data;
    auto* ode = data.get();

    auto B = [&](double x) { return fs.drift_coeff(x); };
    auto R = [&](double x) { return fs.potential_coeff(x); };
    auto rhs_ell = [&](double t, double ell) {
        const double x = std::exp(t);
        const double s = diffusion.vol(x);
        const double s2 = s * s;
        return ell + 2.0 * x * x / s2 * R(x) - 2.0 * x / s2 * B(x) * ell -
               ell * ell;
    };
    auto char_root = [&](double x, bool negative) {
        const double s = diffusion.vol(x);
        const double a2 = 0.5 * s * s;
        const double a1 = B(x) * x - 0.5 * s * s;
        const double a0 = -R(x) * x * x;
        const double disc = a1 * a1 - 4.0 * a2 * a0;
        if (disc < 0.0)
            throw NumericalError("solve_fundamental: complex local exponents");
        const double sq = std::sqrt(disc);
        return negative ? (-a1 - sq) / (2.0 * a2) : (-a1 + sq) / (2.0 * a2);
    };

    const double t_lo = std::log(fs.x_lo_), t_hi = std::log(fs.x_hi_);
    const double span = t_hi - t_lo;
    const std::size_t n_steps =
        std::max<std::size_t>(8000, static_cast<std::size_t>(span * 2400.0));
    const double h = span / static_cast<double>(n_steps);

    ode->t.resize(n_steps + 1);
    ode->lnu.resize(n_steps + 1);
    ode->ell.resize(n_steps + 1);
    ode->ell_dot.resize(n_steps + 1);
    for (std::size_t i = 0; i <= n_steps; ++i)
        ode->t[i] = t_lo + h * static_cast<double>(i);

    const bool forward = (branch == Branch::psi_increasing);
    const double hs = forward ? h : -h;
    std::size_t idx = forward ? 0 : n_steps;
    double t = forward ? t_lo : t_hi;
    double lnu = 0.0;
    double ell = char_root(std::exp(t), /*negative=*/!forward);
    ode->lnu[idx] = lnu;
    ode->ell[idx] = ell;
    ode->ell_dot[idx] = rhs_ell(t, ell);
    for (std::size_t s = 0; s < n_steps; ++s) {
        // classic RK4 on (lnu, ell)
        const double k1l = ell;
        const double k1e = rhs_ell(t, ell);
        const double k2l = ell + 0.5 * hs * k1e;
        const double k2e = rhs_ell(t + 0.5 * hs, ell + 0.5 * hs * k1e);
        const double k3l = ell + 0.5 * hs * k2e;
        const double k3e = rhs_ell(t + 0.5 * hs, ell + 0.5 * hs * k2e);
        const double k4l = ell + hs * k3e;
        const double k4e = rhs_ell(t + hs, ell + hs * k3e);
        lnu += hs / 6.0 * (k1l + 2.0 * k2l + 2.0 * k3l + k4l);
        ell += hs / 6.0 * (k1e + 2.0 * k2e + 2.0 * k3e + k4e);
        t += hs;
        if (!std::isfinite(lnu) || !std::isfinite(ell))
            throw NumericalError(
                "solve_fundamental: integration lost stability at x=" +
                std::to_string(std::exp(t)));
        idx = forward ? idx + 1 : idx - 1;
        ode->lnu[idx] = lnu;
        ode->ell[idx] = ell;
        ode->ell_dot[idx] = rhs_ell(t, ell);
    }

    // monotonicity sanity: phi decreasing (ell < 0), psi increasing
    const double mid_ell = ode->ell[n_steps / 2];
    if (branch == Branch::phi_decreasing && mid_ell >= 0.0)
        throw NumericalError("solve_fundamental: phi branch not decreasing");
    if (branch == Branch::psi_increasing && mid_ell <= 0.0)
        throw NumericalError("solve_fundamental: psi branch not increasing");

    ode->lnu_norm = hermite(ode->t, ode->lnu, ode->ell, std::log(fs.x_norm_));
    return fs;
}

double wronskian(const FundamentalSolution& psi, const FundamentalSolution& phi,
                 const DiffusionModel& diffusion, double x_probe,
                 double max_rel_spread) {
    if (psi.r() != phi.r())
        throw AssumptionError("wronskian: solutions have different r");
    auto w_at = [&](double x) {
        return (psi.deriv(x) * phi.value(x) - phi.deriv(x) * psi.value(x)) /
               diffusion.scale_density(x);
    };
    const double w1 = w_at(0.5 * x_probe);
    const double w2 = w_at(x_probe);
    const double w3 = w_at(2.0 * x_probe);
    const double mean = (w1 + w2 + w3) / 3.0;
    const double spread =
        std::max({std::abs(w1 - mean), std::abs(w2 - mean), std::abs(w3 - mean)});
    if (spread > max_rel_spread * std::abs(mean))
        throw NumericalError("wronskian: not constant across probe points");
    return mean;
}

McEstimate phi_hat_mc(const DiffusionModel& diffusion, double r, double y,
                      double a, std::size_t paths, std::uint64_t seed,
                      double dt, double horizon) {
    if (!(a > 0.0 && y >= a))
        throw AssumptionError("phi_hat_mc: need 0 < a <= y");
    McEstimate out;
    if (y == a) {
        out.estimate = 1.0;
        return out;
    }
    const double sq = std::sqrt(dt);
    const std::size_t max_steps = static_cast<std::size_t>(horizon / dt);
    double sum = 0.0, sum2 = 0.0;
    std::size_t truncated = 0;
    for (std::size_t p = 0; p < paths; ++p) {
        std::uint64_t st = seed + 0x9e3779b97f4a7c15ULL * (p + 1);
        std::mt19937_64 eng(num::splitmix64(st));
        std::normal_distribution<double> gauss(0.0, 1.0);
        std::uniform_real_distribution<double> unif(0.0, 1.0);
        double x = y;
        double integ = 0.0;
        bool hit = false;
        for (std::size_t s = 0; s < max_steps; ++s) {
            integ += (diffusion.drift_prime(x) - r) * dt;
            const double drift_hat =
                diffusion.drift(x) + diffusion.vol(x) * diffusion.vol_prime(x);
            const double vol = diffusion.vol(x);
            const double x_next = x + drift_hat * dt + vol * sq * gauss(eng);
            if (x_next <= a) {
                hit = true;
                break;
            }
            // Brownian-bridge probability of dipping below a within the
            // step; kills the O(sqrt(dt)) discrete-monitoring bias of the
            // first-passage time.
            const double p_cross = std::exp(-2.0 * (x - a) * (x_next - a) /
                                            (vol * vol * dt));
            if (unif(eng) < p_cross) {
                hit = true;
                break;
            }
            x = x_next;
        }
        if (!hit) ++truncated;
        const double w = std::exp(integ);
        sum += w;
        sum2 += w * w;
    }
    const double n = static_cast<double>(paths);
    out.estimate = sum / n;
    out.std_error =
        std::sqrt(std::max(0.0, sum2 / n - out.estimate * out.estimate) / n);
    out.horizon_warning = truncated > paths / 100;
    return out;
}

}  // namespace mfg
