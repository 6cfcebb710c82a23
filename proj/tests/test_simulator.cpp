#include <cmath>

#include "doctest.h"
#include "mfg/simulator.hpp"

using namespace mfg;

namespace {

constexpr double kZ = 0.4403937845562152;   // ergodic barrier
constexpr double kTheta = 0.5449668192793592;

SimConfig short_cfg() {
    SimConfig c;
    c.dt = 1e-3;
    c.horizon = 50.0;
    c.burn_in = 5.0;
    c.seed = 99;
    return c;
}

}  // namespace

TEST_CASE("config validation") {
    SimConfig c = short_cfg();
    CHECK_NOTHROW(c.validate());
    c.dt = 1.0;  // violates dt <= T/1000
    CHECK_THROWS_AS(c.validate(), AssumptionError);
    c = short_cfg();
    c.burn_in = 60.0;
    CHECK_THROWS_AS(c.validate(), AssumptionError);
    c = short_cfg();
    c.n_paths = 0;
    CHECK_THROWS_AS(c.validate(), AssumptionError);
}

TEST_CASE("reflected path basics") {
    auto d = DiffusionModel::gbm(2.0, 1.0);
    auto c = short_cfg();
    auto st = simulate_reflected(d, kZ, kZ, c);
    CHECK(st.terminal >= kZ);
    CHECK(st.nu_total > 0.0);
    CHECK(st.nu_after_burn_in <= st.nu_total);
    double mass = 0.0, below = 0.0;
    for (std::size_t i = 0; i < st.occupancy.mass.size(); ++i) {
        mass += st.occupancy.mass[i];
        if (st.occupancy.edges[i + 1] < kZ - 1e-12)
            below += st.occupancy.mass[i];
    }
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(below == 0.0);
    CHECK_THROWS_AS(simulate_reflected(d, kZ, 0.1, c), AssumptionError);
}

TEST_CASE("occupancy approaches the truncated speed law") {
    auto d = DiffusionModel::gbm(2.0, 1.0);
    SimConfig c = short_cfg();
    c.horizon = 400.0;
    c.burn_in = 20.0;
    auto st = simulate_reflected(d, kZ, kZ, c);
    TruncatedSpeedLaw law(d, kZ);
    const double ks =
        ks_distance(st.occupancy, [&](double x) { return law.cdf(x); });
    CHECK(ks < 0.05);
    // a-priori second-moment sanity with slack factor 2
    CHECK(st.time_avg_second_moment < 2.0 * (law.mean_power(2.0) + kZ * kZ));
}

TEST_CASE("long-run control rate matches the speed-measure integral") {
    auto d = DiffusionModel::gbm(2.0, 1.0);
    TruncatedSpeedLaw law(d, kZ);
    // -int b dm_z = delta E[X] for gbm
    const double oracle = 2.0 * law.mean();
    SimConfig c = short_cfg();
    c.dt = 5e-4;
    c.horizon = 200.0;
    c.burn_in = 10.0;
    std::vector<double> rates;
    for (std::uint64_t s = 0; s < 8; ++s)
        rates.push_back(simulate_reflected(d, kZ, kZ, c, s).nu_total /
                        c.horizon);
    double mean = 0.0, var = 0.0;
    for (double v : rates) mean += v;
    mean /= rates.size();
    for (double v : rates) var += (v - mean) * (v - mean);
    var /= (rates.size() - 1.0);
    const double hw = 1.96 * std::sqrt(var / rates.size());
    CHECK(std::abs(mean - oracle) < 3.0 * hw + 0.01 * oracle);
}

TEST_CASE("near-degenerate volatility: path decays to the barrier and sticks") {
    // sigma = 0 exactly is excluded by the model nondegeneracy invariant, so
    // the degenerate smoke test runs at sigma = 1e-12
    std::vector<double> x, b, bp, s, sp;
    for (int i = 0; i < 200; ++i) {
        const double v = 0.01 * std::pow(1e4, i / 199.0);
        x.push_back(v);
        b.push_back(-2.0 * v);
        bp.push_back(-2.0);
        s.push_back(1e-12);
        sp.push_back(0.0);
    }
    auto d = DiffusionModel::custom(x, b, bp, s, sp);
    SimConfig c;
    c.dt = 1e-3;
    c.horizon = 10.0;
    c.burn_in = 0.0;
    const double z = 0.5;
    auto st = simulate_reflected(d, z, 1.0, c);
    // the mirror step leaves the state within O(z dt) above the barrier
    CHECK(st.terminal >= z);
    CHECK(st.terminal <= z * (1.0 + 3.0 * c.dt));
    // after the hit nu accrues at rate -b(z) = 2 z; hit time = ln(1/z)/2
    const double t_hit = 0.5 * std::log(1.0 / z);
    const double expected = 2.0 * z * (c.horizon - t_hit);
    CHECK(st.nu_total == doctest::Approx(expected).epsilon(1e-2));
}

TEST_CASE("n-player game near equilibrium") {
    auto d = DiffusionModel::gbm(2.0, 1.0);
    auto p = ProfitModel::isoelastic(0.6);
    SimConfig c;
    c.dt = 1e-3;
    c.horizon = 10.0;
    c.burn_in = 1.0;
    c.n_paths = 20;
    c.seed = 5;
    c.init_barrier = kZ;
    std::vector<double> bars(20, kZ);
    auto rep = nplayer_run(d, p, bars, c);
    CHECK(rep.replications == 20);
    CHECK_FALSE(rep.divergent);
    CHECK(rep.theta_n_half_width > 0.0);
    CHECK(std::abs(rep.theta_n - kTheta) < 5.0 * rep.theta_n_half_width);
    CHECK(rep.nu_rate > 0.0);
    CHECK_THROWS_AS(nplayer_run(d, p, {kZ}, c), AssumptionError);
}

TEST_CASE("determinism across worker counts and reruns") {
    auto d = DiffusionModel::gbm(2.0, 1.0);
    auto p = ProfitModel::isoelastic(0.6);
    SimConfig c;
    c.dt = 1e-3;
    c.horizon = 5.0;
    c.burn_in = 0.5;
    c.n_paths = 6;
    c.seed = 123;
    std::vector<double> bars(4, kZ);
    auto a = nplayer_run(d, p, bars, c);
    auto b = nplayer_run(d, p, bars, c);
    c.workers = 3;
    auto w = nplayer_run(d, p, bars, c);
    CHECK(a.theta_n == b.theta_n);
    CHECK(a.payoff == b.payoff);
    CHECK(a.theta_n == w.theta_n);
    CHECK(a.payoff == w.payoff);
    CHECK(a.occupancy.mass == w.occupancy.mass);
}

TEST_CASE("deviating to the equilibrium barrier gains nothing") {
    auto d = DiffusionModel::gbm(2.0, 1.0);
    auto p = ProfitModel::isoelastic(0.6);
    SimConfig c;
    c.dt = 1e-3;
    c.horizon = 5.0;
    c.burn_in = 0.5;
    c.n_paths = 5;
    c.seed = 31;
    c.init_barrier = kZ;
    auto dev = deviation_epsilon(d, p, 5, kZ, {kZ}, c);
    CHECK(dev.epsilon == 0.0);  // common random numbers make this exact
    CHECK(dev.noise_floor);
}

TEST_CASE("ks distance helper") {
    Histogram h;
    h.edges = {1.0, 2.0, 4.0};
    h.mass = {0.5, 0.5};
    auto cdf = [](double x) { return std::min(1.0, std::max(0.0, (x - 1.0) / 3.0)); };
    // |0.5 - 1/3| at the middle edge
    CHECK(ks_distance(h, cdf) == doctest::Approx(0.5 - 1.0 / 3.0));
}
