#include "mfg/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <thread>

namespace mfg {

void SimConfig::validate() const {
    if (!(dt > 0.0) || !(horizon > 0.0) || !(dt <= horizon / 1000.0))
        throw AssumptionError("SimConfig: need 0 < dt <= T/1000");
    if (!(burn_in >= 0.0 && burn_in < horizon))
        throw AssumptionError("SimConfig: need 0 <= burn_in < T");
    if (n_paths == 0) throw AssumptionError("SimConfig: n_paths must be >= 1");
    if (workers < 1) throw AssumptionError("SimConfig: workers must be >= 1");
    if (hist_bins < 2 || !(hist_span > 1.0))
        throw AssumptionError("SimConfig: bad histogram settings");
    if (!(x0 > 0.0)) throw AssumptionError("SimConfig: x0 must be > 0");
    if (r < 0.0) throw AssumptionError("SimConfig: r must be >= 0");
}

namespace {

std::mt19937_64 make_engine(std::uint64_t seed, std::uint64_t rep,
                            std::uint64_t player) {
    std::uint64_t s = seed ^ ((rep + 1) * 0x9e3779b97f4a7c15ULL);
    const std::uint64_t a = num::splitmix64(s);
    s ^= (player + 1) * 0xbf58476d1ce4e5b9ULL;
    const std::uint64_t b = num::splitmix64(s);
    return std::mt19937_64(a ^ (b * 0x94d049bb133111ebULL));
}

std::vector<double> log_edges(double z, double span, std::size_t bins) {
    std::vector<double> e(bins + 1);
    const double l0 = std::log(z), l1 = std::log(z * span);
    for (std::size_t i = 0; i <= bins; ++i)
        e[i] = std::exp(l0 + (l1 - l0) * static_cast<double>(i) /
                                 static_cast<double>(bins));
    e.front() = z;
    return e;
}

// symmetrized reflected Euler step; returns the push credited to nu
inline double step_reflect(const DiffusionModel& d, double& x, double z,
                           double dt, double sq_dt, double g) {
    const double y = x + d.drift(x) * dt + d.vol(x) * sq_dt * g;
    if (y >= z) {
        x = y;
        return 0.0;
    }
    x = 2.0 * z - y;
    return 2.0 * (z - y);
}

// dispatch rep indices to a small pool; each rep writes its own slot, so the
// outcome is independent of the worker count
template <typename Fn>
void for_each_rep(std::size_t n_reps, int workers, Fn&& body) {
    const int w = std::max(1, std::min<int>(workers, static_cast<int>(n_reps)));
    if (w == 1) {
        for (std::size_t i = 0; i < n_reps; ++i) body(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(w);
    for (int t = 0; t < w; ++t)
        pool.emplace_back([&, t] {
            for (std::size_t i = static_cast<std::size_t>(t); i < n_reps;
                 i += static_cast<std::size_t>(w))
                body(i);
        });
    for (auto& th : pool) th.join();
}

struct RepStats {
    double theta_avg = 0.0;
    double payoff = 0.0;
    double nu_rate = 0.0;
    double m2 = 0.0;
    std::vector<double> hist_mass;
    bool divergent = false;
};

// one replication of the N-player game; player 0 is the reported player
RepStats run_rep(const DiffusionModel& d, const ProfitModel& p,
                 const std::vector<double>& barriers, const SimConfig& cfg,
                 std::uint64_t rep, const std::vector<double>& edges,
                 const TruncatedSpeedLaw* init_law) {
    const std::size_t n = barriers.size();
    const std::size_t steps =
        static_cast<std::size_t>(std::llround(cfg.horizon / cfg.dt));
    const std::size_t burn_steps =
        static_cast<std::size_t>(std::llround(cfg.burn_in / cfg.dt));
    const double sq_dt = std::sqrt(cfg.dt);
    const bool discounted = cfg.r > 0.0;
    const double l0 = std::log(edges.front());
    const double lw = std::log(edges.back()) - l0;
    const std::size_t bins = edges.size() - 1;

    std::vector<std::mt19937_64> eng;
    eng.reserve(n);
    std::vector<double> x(n), fx(n);
    for (std::size_t j = 0; j < n; ++j) {
        eng.push_back(make_engine(cfg.seed, rep, j));
        x[j] = init_law ? init_law->sample(eng[j]) : cfg.x0;
        fx[j] = p.f(x[j]);
    }
    std::normal_distribution<double> gauss(0.0, 1.0);

    RepStats out;
    out.hist_mass.assign(bins, 0.0);
    double f_sum = 0.0;
    for (double v : fx) f_sum += v;
    double theta_sum = 0.0, pi_sum = 0.0, m2_sum = 0.0;
    double nu0_total = 0.0, nu0_burn = 0.0;
    double disc_payoff = 0.0;

    for (std::size_t s = 0; s < steps; ++s) {
        const double theta_m1 =
            (n > 1) ? p.F((f_sum - fx[0]) / static_cast<double>(n - 1)) : 0.0;
        if (!std::isfinite(theta_m1)) {
            out.divergent = true;
            break;
        }
        const bool live = s >= burn_steps;
        const double pi0 = (n > 1) ? p.pi(x[0], theta_m1) : 0.0;
        if (live) {
            theta_sum += theta_m1;
            pi_sum += pi0;
            m2_sum += x[0] * x[0];
            std::size_t b = static_cast<std::size_t>(
                std::max(0.0, (std::log(x[0]) - l0) / lw *
                                  static_cast<double>(bins)));
            out.hist_mass[std::min(b, bins - 1)] += 1.0;
        }
        const double disc = discounted
                                ? std::exp(-cfg.r * (static_cast<double>(s) *
                                                     cfg.dt))
                                : 0.0;
        if (discounted) disc_payoff += disc * pi0 * cfg.dt;
        for (std::size_t j = 0; j < n; ++j) {
            const double push =
                step_reflect(d, x[j], barriers[j], cfg.dt, sq_dt, gauss(eng[j]));
            if (!std::isfinite(x[j]))
                throw NumericalError("nplayer_run: state blew up at step " +
                                     std::to_string(s));
            fx[j] = p.f(x[j]);
            if (j == 0) {
                nu0_total += push;
                if (live) nu0_burn += push;
                if (discounted) disc_payoff -= disc * push;
            }
        }
        f_sum = 0.0;
        for (double v : fx) f_sum += v;
    }

    const double live_steps = static_cast<double>(steps - burn_steps);
    const double live_time = live_steps * cfg.dt;
    out.theta_avg = theta_sum / live_steps;
    out.m2 = m2_sum / live_steps;
    out.nu_rate = nu0_total / cfg.horizon;
    out.payoff = discounted ? disc_payoff
                            : (pi_sum * cfg.dt - nu0_burn) / live_time;
    double mass = 0.0;
    for (double v : out.hist_mass) mass += v;
    if (mass > 0.0)
        for (double& v : out.hist_mass) v /= mass;
    return out;
}

struct MeanHw {
    double mean = 0.0, hw = 0.0;
};

MeanHw mean_half_width(const std::vector<double>& v) {
    const double n = static_cast<double>(v.size());
    MeanHw m;
    for (double x : v) m.mean += x;
    m.mean /= n;
    if (v.size() < 2) return m;
    double s2 = 0.0;
    for (double x : v) s2 += (x - m.mean) * (x - m.mean);
    s2 /= (n - 1.0);
    m.hw = 1.96 * std::sqrt(s2 / n);
    return m;
}

std::vector<RepStats> run_all(const DiffusionModel& d, const ProfitModel& p,
                              const std::vector<double>& barriers,
                              const SimConfig& cfg) {
    cfg.validate();
    const double z0 = barriers.at(0);
    const std::vector<double> edges =
        log_edges(z0, cfg.hist_span, cfg.hist_bins);
    std::optional<TruncatedSpeedLaw> init_law;
    if (cfg.init_barrier) init_law.emplace(d, *cfg.init_barrier);
    std::vector<RepStats> reps(cfg.n_paths);
    for_each_rep(cfg.n_paths, cfg.workers, [&](std::size_t i) {
        reps[i] = run_rep(d, p, barriers, cfg, i, edges,
                          init_law ? &*init_law : nullptr);
    });
    return reps;
}

}  // namespace

double ks_distance(const Histogram& h,
                   const std::function<double(double)>& cdf) {
    double cum = 0.0, d = std::abs(cdf(h.edges.front()));
    for (std::size_t i = 0; i < h.mass.size(); ++i) {
        cum += h.mass[i];
        d = std::max(d, std::abs(cum - cdf(h.edges[i + 1])));
    }
    return d;
}

ReflectedPathStats simulate_reflected(const DiffusionModel& diffusion,
                                      double barrier, double x0,
                                      const SimConfig& cfg,
                                      std::uint64_t stream) {
    cfg.validate();
    if (!(barrier > 0.0 && x0 >= barrier))
        throw AssumptionError("simulate_reflected: need 0 < z <= x0");
    const std::size_t steps =
        static_cast<std::size_t>(std::llround(cfg.horizon / cfg.dt));
    const std::size_t burn_steps =
        static_cast<std::size_t>(std::llround(cfg.burn_in / cfg.dt));
    const double sq_dt = std::sqrt(cfg.dt);

    ReflectedPathStats out;
    out.occupancy.edges = log_edges(barrier, cfg.hist_span, cfg.hist_bins);
    out.occupancy.mass.assign(cfg.hist_bins, 0.0);
    const double l0 = std::log(barrier);
    const double lw = std::log(out.occupancy.edges.back()) - l0;

    auto eng = make_engine(cfg.seed, stream, 0);
    std::normal_distribution<double> gauss(0.0, 1.0);
    double x = x0, m2 = 0.0;
    for (std::size_t s = 0; s < steps; ++s) {
        if (s >= burn_steps) {
            m2 += x * x;
            std::size_t b = static_cast<std::size_t>(std::max(
                0.0,
                (std::log(x) - l0) / lw * static_cast<double>(cfg.hist_bins)));
            out.occupancy.mass[std::min(b, cfg.hist_bins - 1)] += 1.0;
        }
        const double push = step_reflect(diffusion, x, barrier, cfg.dt, sq_dt,
                                         gauss(eng));
        if (!std::isfinite(x))
            throw NumericalError("simulate_reflected: state blew up at step " +
                                 std::to_string(s));
        out.nu_total += push;
        if (s >= burn_steps) out.nu_after_burn_in += push;
        if (cfg.r > 0.0)
            out.discounted_nu +=
                std::exp(-cfg.r * static_cast<double>(s) * cfg.dt) * push;
    }
    out.terminal = x;
    const double live_steps = static_cast<double>(steps - burn_steps);
    out.time_avg_second_moment = m2 / live_steps;
    for (double& v : out.occupancy.mass) v /= live_steps;
    return out;
}

SimulationReport nplayer_run(const DiffusionModel& diffusion,
                             const ProfitModel& profit,
                             const std::vector<double>& barriers,
                             const SimConfig& cfg) {
    if (barriers.size() < 2)
        throw AssumptionError("nplayer_run: need at least 2 players");
    for (double z : barriers)
        if (!(z > 0.0))
            throw AssumptionError("nplayer_run: barriers must be > 0");
    auto reps = run_all(diffusion, profit, barriers, cfg);

    SimulationReport rep;
    rep.replications = reps.size();
    std::vector<double> thetas, payoffs;
    rep.occupancy.edges = log_edges(barriers[0], cfg.hist_span, cfg.hist_bins);
    rep.occupancy.mass.assign(cfg.hist_bins, 0.0);
    for (const auto& s : reps) {
        if (s.divergent) {
            rep.divergent = true;
            continue;
        }
        thetas.push_back(s.theta_avg);
        payoffs.push_back(s.payoff);
        rep.nu_rate += s.nu_rate;
        rep.time_avg_second_moment += s.m2;
        for (std::size_t b = 0; b < cfg.hist_bins; ++b)
            rep.occupancy.mass[b] += s.hist_mass[b];
    }
    if (thetas.empty()) {
        rep.divergent = true;
        return rep;
    }
    const double k = static_cast<double>(thetas.size());
    rep.nu_rate /= k;
    rep.time_avg_second_moment /= k;
    for (double& v : rep.occupancy.mass) v /= k;
    auto mt = mean_half_width(thetas);
    auto mp = mean_half_width(payoffs);
    rep.theta_n = mt.mean;
    rep.theta_n_half_width = mt.hw;
    rep.payoff = mp.mean;
    rep.payoff_half_width = mp.hw;
    return rep;
}

DeviationResult deviation_epsilon(const DiffusionModel& diffusion,
                                  const ProfitModel& profit, std::size_t n,
                                  double equilibrium_barrier,
                                  const std::vector<double>& deviation_grid,
                                  const SimConfig& cfg) {
    if (n < 2) throw AssumptionError("deviation_epsilon: need n >= 2");
    if (deviation_grid.empty())
        throw AssumptionError("deviation_epsilon: empty deviation grid");

    std::vector<double> barriers(n, equilibrium_barrier);
    auto base = run_all(diffusion, profit, barriers, cfg);

    DeviationResult out;
    out.grid = deviation_grid;
    out.best_barrier = equilibrium_barrier;
    for (double z_dev : deviation_grid) {
        barriers[0] = z_dev;
        auto dev = run_all(diffusion, profit, barriers, cfg);
        std::vector<double> diff;
        diff.reserve(dev.size());
        for (std::size_t i = 0; i < dev.size(); ++i) {
            if (base[i].divergent || dev[i].divergent) continue;
            diff.push_back(dev[i].payoff - base[i].payoff);
        }
        auto m = mean_half_width(diff);
        out.gains.push_back(m.mean);
        out.gain_half_widths.push_back(m.hw);
        if (m.mean > out.epsilon) {
            out.epsilon = m.mean;
            out.half_width = m.hw;
            out.best_barrier = z_dev;
        }
    }
    if (out.epsilon <= 0.0) {
        out.epsilon = 0.0;
        // report the noise level of the best (least negative) gain
        std::size_t best = 0;
        for (std::size_t i = 1; i < out.gains.size(); ++i)
            if (out.gains[i] > out.gains[best]) best = i;
        out.half_width = out.gain_half_widths[best];
    }
    out.noise_floor = out.epsilon <= out.half_width;
    return out;
}

}  // namespace mfg
