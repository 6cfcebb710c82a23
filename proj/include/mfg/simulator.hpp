#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "mfg/profit.hpp"
#include "mfg/stationary.hpp"

namespace mfg {

struct SimConfig {
    double dt = 1e-3;
    double horizon = 100.0;       // T
    double burn_in = 5.0;         // statistics collected on [burn_in, T]
    std::size_t n_paths = 1;      // independent replications
    std::uint64_t seed = 0;
    double r = 0.0;               // 0 => ergodic payoffs
    int workers = 1;              // thread count; results do not depend on it
    std::size_t hist_bins = 400;  // occupancy histogram resolution
    double hist_span = 1e3;       // bins cover [z, z * hist_span], log-spaced
    // initial state: draw from the stationary law at init_barrier when set,
    // otherwise start at x0
    double x0 = 1.0;
    std::optional<double> init_barrier;

    void validate() const;  // dt <= T/1000, burn_in < T, dt/T/n_paths positive
};

/// Time-occupancy histogram on log-spaced bins; mass sums to 1 (overflow is
/// folded into the last bin).
struct Histogram {
    std::vector<double> edges;  // hist_bins + 1 ascending edges
    std::vector<double> mass;
};

/// Kolmogorov-Smirnov distance between the histogram (as a piecewise cdf
/// evaluated at bin edges) and a reference cdf.
double ks_distance(const Histogram& h,
                   const std::function<double(double)>& cdf);

struct ReflectedPathStats {
    double terminal = 0.0;
    double nu_total = 0.0;            // cumulative push over [0, T]
    double nu_after_burn_in = 0.0;    // push over [burn_in, T]
    double discounted_nu = 0.0;       // int_0^T e^{-rt} dnu
    double time_avg_second_moment = 0.0;  // over [burn_in, T]
    Histogram occupancy;              // time-weighted, after burn_in
};

/// One path of the diffusion reflected at a lower barrier z via symmetrized
/// Euler-Maruyama: after a plain Euler step landing at Y < z the state is
/// mirrored to 2z - Y and the push 2(z - Y) is credited to nu. (Plain
/// projection to the barrier under-counts time spent near z badly enough to
/// distort the occupancy law at the tolerances we target.)
ReflectedPathStats simulate_reflected(const DiffusionModel& diffusion,
                                      double barrier, double x0,
                                      const SimConfig& cfg,
                                      std::uint64_t stream = 0);

struct SimulationReport {
    double theta_n = 0.0;             // time-avg of F(mean_{j != 1} f(X^j))
    double theta_n_half_width = 0.0;  // 95% over replications
    double payoff = 0.0;              // player 1: ergodic G or discounted J
    double payoff_half_width = 0.0;
    double nu_rate = 0.0;             // player 1 nu_T / T
    double time_avg_second_moment = 0.0;  // player 1
    Histogram occupancy;              // player 1, pooled over replications
    bool divergent = false;           // non-finite aggregate encountered
    std::size_t replications = 0;
};

/// Symmetric N-player game: every player reflects at barriers[i], interacts
/// through the leave-one-out aggregate theta^N_{-i}. Statistics are reported
/// for player 1 with 95% half-widths across replications. Deterministic in
/// (seed, cfg, N) regardless of cfg.workers.
SimulationReport nplayer_run(const DiffusionModel& diffusion,
                             const ProfitModel& profit,
                             const std::vector<double>& barriers,
                             const SimConfig& cfg);

struct DeviationResult {
    double epsilon = 0.0;             // max over grid of clipped payoff gain
    double half_width = 0.0;          // 95% half-width of the best gain
    double best_barrier = 0.0;
    bool noise_floor = false;         // |epsilon| indistinguishable from 0
    std::vector<double> grid;         // barriers actually evaluated
    std::vector<double> gains;        // payoff difference per grid point
    std::vector<double> gain_half_widths;
};

/// epsilon-Nash gap estimate: opponents pinned at equilibrium_barrier, the
/// deviator (player 1) tries each barrier in the grid; gains are measured
/// against the deviator also playing equilibrium_barrier, with common random
/// numbers across grid points so the baseline noise cancels.
DeviationResult deviation_epsilon(const DiffusionModel& diffusion,
                                  const ProfitModel& profit, std::size_t n,
                                  double equilibrium_barrier,
                                  const std::vector<double>& deviation_grid,
                                  const SimConfig& cfg);

}  // namespace mfg
