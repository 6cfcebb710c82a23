#include "mfg/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

namespace mfg::num {

namespace {

// Gauss-Kronrod 15-point nodes/weights on [-1, 1] (7-point Gauss embedded).
constexpr double kKronrodNodes[8] = {
    0.991455371120813, 0.949107912342759, 0.864864423359769,
    0.741531185599394, 0.586087235467691, 0.405845151377397,
    0.207784955007898, 0.0};
constexpr double kKronrodWeights[8] = {
    0.022935322010529, 0.063092092629979, 0.104790010322250,
    0.140653259715525, 0.169004726639267, 0.190350578064785,
    0.204432940075298, 0.209482141084728};
constexpr double kGaussWeights[4] = {
    0.129484966168870, 0.279705391489277, 0.381830050505119,
    0.417959183673469};

struct Gk15 {
    double integral;
    double error;
};

Gk15 gk15(const Fn& f, double a, double b) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    double fc = f(c);
    double gauss = fc * kGaussWeights[3];
    double kron = fc * kKronrodWeights[7];
    for (int i = 0; i < 7; ++i) {
        const double dx = h * kKronrodNodes[i];
        const double flo = f(c - dx);
        const double fhi = f(c + dx);
        kron += kKronrodWeights[i] * (flo + fhi);
        if (i % 2 == 1) gauss += kGaussWeights[i / 2] * (flo + fhi);
    }
    kron *= h;
    gauss *= h;
    double err = std::abs(kron - gauss);
    // Standard QUADPACK-style error sharpening.
    if (err > 0.0) err = std::pow(200.0 * err, 1.5);
    return {kron, std::min(err, std::abs(kron - gauss) * 200.0 + 1e-300)};
}

// Hard cap on integrand evaluations per integrate() call. The per-split
// tolerance halving can otherwise blow up exponentially on integrands with
// extreme dynamic range; past the budget the current panel estimates are
// accepted and their error folded into the estimate.
constexpr long kMaxEvals = 60000;

void adapt(const Fn& f, double a, double b, double tol, int depth,
           int max_depth, double& acc, double& err_acc, long& evals) {
    Gk15 whole = gk15(f, a, b);
    evals += 15;
    if (depth >= max_depth || evals >= kMaxEvals) {
        if (!std::isfinite(whole.integral))
            throw NumericalError("quadrature: non-finite integrand");
        acc += whole.integral;
        err_acc += whole.error;
        return;
    }
    if (whole.error <= tol || whole.error <= 1e-16 * std::abs(whole.integral)) {
        acc += whole.integral;
        err_acc += whole.error;
        return;
    }
    const double c = 0.5 * (a + b);
    adapt(f, a, c, 0.5 * tol, depth + 1, max_depth, acc, err_acc, evals);
    adapt(f, c, b, 0.5 * tol, depth + 1, max_depth, acc, err_acc, evals);
}

}  // namespace

double integrate(const Fn& f, double a, double b, double rel_tol,
                 double abs_tol, int max_depth) {
    if (a == b) return 0.0;
    Gk15 first = gk15(f, a, b);
    if (!std::isfinite(first.integral))
        throw NumericalError("quadrature: non-finite integrand on [" +
                             std::to_string(a) + ", " + std::to_string(b) + "]");
    double tol = std::max(abs_tol, rel_tol * std::abs(first.integral));
    double acc = 0.0, err = 0.0;
    long evals = 0;
    adapt(f, a, b, tol, 0, max_depth, acc, err, evals);
    return acc;
}

QuadResult integrate_to_inf(const Fn& f, double a, double rel_tol,
                            double tail_mass, int max_decades) {
    QuadResult res;
    double lo = a;
    double abs_acc = 0.0;
    for (int k = 0; k < max_decades; ++k) {
        const double hi = lo * 10.0;
        const double block = integrate(f, lo, hi, rel_tol, 1e-300);
        res.value += block;
        abs_acc += std::abs(block);
        res.evals += 15;
        lo = hi;
        if (k >= 2 && std::abs(block) <= tail_mass * std::max(abs_acc, 1e-300)) {
            res.error_estimate = std::abs(block);
            return res;
        }
    }
    res.truncated_tail = true;
    res.error_estimate = abs_acc * tail_mass;
    if (!std::isfinite(res.value))
        throw NumericalError("integrate_to_inf: tail does not decay");
    return res;
}

QuadResult integrate_from_zero(const Fn& f, double a, double rel_tol,
                               double tail_mass, int max_decades) {
    QuadResult res;
    double hi = a;
    double abs_acc = 0.0;
    for (int k = 0; k < max_decades; ++k) {
        const double lo = hi * 0.1;
        const double block = integrate(f, lo, hi, rel_tol, 1e-300);
        res.value += block;
        abs_acc += std::abs(block);
        hi = lo;
        if (k >= 2 && std::abs(block) <= tail_mass * std::max(abs_acc, 1e-300)) {
            res.error_estimate = std::abs(block);
            return res;
        }
    }
    res.truncated_tail = true;
    res.error_estimate = abs_acc * tail_mass;
    return res;
}

RootResult bisect(const Fn& f, double lo, double hi, double rel_tol,
                  int max_iter) {
    double flo = f(lo);
    double fhi = f(hi);
    if (flo == 0.0) return {lo, 0, true};
    if (fhi == 0.0) return {hi, 0, true};
    if (flo * fhi > 0.0)
        throw AssumptionError("bisect: endpoints do not bracket a root");
    RootResult r;
    for (int i = 0; i < max_iter; ++i) {
        const double mid = 0.5 * (lo + hi);
        const double fm = f(mid);
        r.iters = i + 1;
        if (fm == 0.0 || (hi - lo) <= rel_tol * std::abs(mid)) {
            r.x = mid;
            r.converged = true;
            return r;
        }
        if (flo * fm < 0.0) {
            hi = mid;
        } else {
            lo = mid;
            flo = fm;
        }
    }
    r.x = 0.5 * (lo + hi);
    r.converged = (hi - lo) <= 16.0 * rel_tol * std::abs(r.x);
    return r;
}

std::pair<double, double> expand_bracket(const Fn& f, double guess,
                                         double hard_lo, double hard_hi,
                                         double factor) {
    double lo = guess / factor;
    double hi = guess * factor;
    double flo = f(lo), fhi = f(hi);
    while (flo * fhi > 0.0) {
        bool moved = false;
        if (lo > hard_lo) {
            lo = std::max(hard_lo, lo / factor);
            flo = f(lo);
            moved = true;
        }
        if (flo * fhi <= 0.0) break;
        if (hi < hard_hi) {
            hi = std::min(hard_hi, hi * factor);
            fhi = f(hi);
            moved = true;
        }
        if (!moved)
            throw AssumptionError("expand_bracket: no sign change within bounds");
    }
    return {lo, hi};
}

Pchip::Pchip(std::vector<double> x, std::vector<double> y)
    : x_(std::move(x)), y_(std::move(y)) {
    const std::size_t n = x_.size();
    if (n < 2 || y_.size() != n)
        throw AssumptionError("Pchip: need >= 2 nodes with matching values");
    std::vector<double> h(n - 1), delta(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        h[i] = x_[i + 1] - x_[i];
        if (h[i] <= 0.0) throw AssumptionError("Pchip: abscissa not increasing");
        delta[i] = (y_[i + 1] - y_[i]) / h[i];
    }
    d_.assign(n, 0.0);
    for (std::size_t i = 1; i + 1 < n; ++i) {
        if (delta[i - 1] * delta[i] > 0.0) {
            const double w1 = 2.0 * h[i] + h[i - 1];
            const double w2 = h[i] + 2.0 * h[i - 1];
            d_[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
        }
    }
    // One-sided ends (Fritsch-Carlson boundary formula with clamping).
    auto end_slope = [](double h0, double h1, double d0, double d1) {
        double d = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
        if (d * d0 <= 0.0) return 0.0;
        if (d0 * d1 <= 0.0 && std::abs(d) > 3.0 * std::abs(d0)) return 3.0 * d0;
        return d;
    };
    d_[0] = (n == 2) ? delta[0] : end_slope(h[0], h[1], delta[0], delta[1]);
    d_[n - 1] = (n == 2) ? delta[n - 2]
                         : end_slope(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
}

std::size_t Pchip::locate(double x) const {
    auto it = std::upper_bound(x_.begin(), x_.end(), x);
    if (it == x_.begin()) return 0;
    std::size_t i = static_cast<std::size_t>(it - x_.begin()) - 1;
    return std::min(i, x_.size() - 2);
}

double Pchip::operator()(double x) const {
    if (x <= x_.front()) return y_.front() + d_.front() * (x - x_.front());
    if (x >= x_.back()) return y_.back() + d_.back() * (x - x_.back());
    const std::size_t i = locate(x);
    const double h = x_[i + 1] - x_[i];
    const double t = (x - x_[i]) / h;
    const double t2 = t * t, t3 = t2 * t;
    return y_[i] * (2 * t3 - 3 * t2 + 1) + h * d_[i] * (t3 - 2 * t2 + t) +
           y_[i + 1] * (-2 * t3 + 3 * t2) + h * d_[i + 1] * (t3 - t2);
}

double Pchip::deriv(double x) const {
    if (x <= x_.front()) return d_.front();
    if (x >= x_.back()) return d_.back();
    const std::size_t i = locate(x);
    const double h = x_[i + 1] - x_[i];
    const double t = (x - x_[i]) / h;
    const double t2 = t * t;
    return (y_[i] * (6 * t2 - 6 * t) + h * d_[i] * (3 * t2 - 4 * t + 1) +
            y_[i + 1] * (-6 * t2 + 6 * t) + h * d_[i + 1] * (3 * t2 - 2 * t)) / h;
}

std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

}  // namespace mfg::num
