#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace mfg {

/// Raised when a quadrature, ODE integration, or root search cannot meet
/// its accuracy contract.
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

/// Raised when model inputs violate a structural assumption (no sign
/// change, degenerate volatility, bad brackets, ...).
class AssumptionError : public std::runtime_error {
public:
    explicit AssumptionError(const std::string& what) : std::runtime_error(what) {}
};

namespace num {

using Fn = std::function<double(double)>;

struct QuadResult {
    double value = 0.0;
    double error_estimate = 0.0;
    long evals = 0;
    bool truncated_tail = false;  // improper integral cut before mass target
};

/// Adaptive Gauss-Kronrod (G7,K15) over a finite interval.
double integrate(const Fn& f, double a, double b,
                 double rel_tol = 1e-10, double abs_tol = 1e-14,
                 int max_depth = 40);

/// Improper integral over [a, inf). Integrates decade blocks in log space
/// until the last block contributes less than tail_mass of the accumulated
/// absolute mass.
QuadResult integrate_to_inf(const Fn& f, double a,
                            double rel_tol = 1e-10, double tail_mass = 1e-10,
                            int max_decades = 60);

/// Improper integral over (0, a]. Decade blocks shrinking toward zero.
QuadResult integrate_from_zero(const Fn& f, double a,
                               double rel_tol = 1e-10, double tail_mass = 1e-10,
                               int max_decades = 60);

struct RootResult {
    double x = 0.0;
    int iters = 0;
    bool converged = false;
};

/// Bisection on [lo, hi]; f(lo) and f(hi) must differ in sign.
/// Converges to rel_tol on the bracket width relative to |x|.
RootResult bisect(const Fn& f, double lo, double hi,
                  double rel_tol = 1e-12, int max_iter = 200);

/// Geometric bracket expansion around guess until f changes sign.
/// Returns {lo, hi} with f(lo)*f(hi) <= 0; throws AssumptionError when the
/// hard bounds are hit without a sign change.
std::pair<double, double> expand_bracket(const Fn& f, double guess,
                                         double hard_lo, double hard_hi,
                                         double factor = 10.0);

/// Monotone cubic (Fritsch-Carlson) interpolant on a strictly increasing
/// abscissa grid. Extrapolates linearly beyond the ends.
class Pchip {
public:
    Pchip() = default;
    Pchip(std::vector<double> x, std::vector<double> y);
    double operator()(double x) const;
    double deriv(double x) const;
    double x_min() const { return x_.front(); }
    double x_max() const { return x_.back(); }

private:
    std::vector<double> x_, y_, d_;  // nodes, values, node slopes
    std::size_t locate(double x) const;
};

/// splitmix64 step; used to derive independent RNG stream seeds.
std::uint64_t splitmix64(std::uint64_t& state);

}  // namespace num
}  // namespace mfg
