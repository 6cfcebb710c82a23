#include <cmath>

#include "doctest.h"
#include "mfg/equilibrium.hpp"
#include "mfg/gbm_case.hpp"

using namespace mfg;

namespace {
EquilibriumProblem default_problem(SolveMethod m = SolveMethod::automatic) {
    SolverConfig cfg;
    cfg.fundamental_method = m;
    return EquilibriumProblem(DiffusionModel::gbm(2.0, 1.0),
                              ProfitModel::isoelastic(0.6), cfg);
}
}  // namespace

TEST_CASE("ergodic equilibrium matches the closed form") {
    auto prob = default_problem();
    auto eq = prob.solve(Mode::ergodic);
    auto oracle = gbm::ergodic_equilibrium({});
    CHECK(eq.x_star == doctest::Approx(oracle.x_star).epsilon(1e-9));
    CHECK(eq.theta_star == doctest::Approx(oracle.theta_star).epsilon(1e-9));
    CHECK(eq.ergodic_value == doctest::Approx(*oracle.lambda_star).epsilon(1e-9));
    CHECK(std::abs(eq.K_residual) < 1e-9);
    CHECK(std::abs(eq.Q_residual) < 1e-9);
    CHECK(eq.iterations > 0);
}

TEST_CASE("discounted equilibrium matches the closed form") {
    auto prob = default_problem();
    for (double r : {0.25, 0.5, 1.0}) {
        auto eq = prob.solve(Mode::discounted, r);
        auto oracle = gbm::discounted_equilibrium({2.0, 1.0, 0.6, r});
        CHECK(eq.x_star == doctest::Approx(oracle.x_star).epsilon(1e-9));
        CHECK(eq.theta_star ==
              doctest::Approx(oracle.theta_star).epsilon(1e-9));
    }
    CHECK_THROWS_AS(prob.solve(Mode::discounted, 0.0), AssumptionError);
}

TEST_CASE("shooting-based pipeline agrees without the closed form") {
    auto prob = default_problem(SolveMethod::ode_shooting);
    auto eq = prob.solve(Mode::ergodic);
    auto oracle = gbm::ergodic_equilibrium({});
    CHECK(eq.x_star == doctest::Approx(oracle.x_star).epsilon(1e-8));
    CHECK(eq.theta_star == doctest::Approx(oracle.theta_star).epsilon(1e-8));
}

TEST_CASE("solver outputs do not depend on the scale anchor") {
    SolverConfig cfg;
    EquilibriumProblem p1(DiffusionModel::gbm(2.0, 1.0),
                          ProfitModel::isoelastic(0.6), cfg);
    EquilibriumProblem p2(DiffusionModel::gbm(2.0, 1.0, 3.0),
                          ProfitModel::isoelastic(0.6), cfg);
    auto e1 = p1.solve(Mode::discounted, 0.5);
    auto e2 = p2.solve(Mode::discounted, 0.5);
    CHECK(e1.x_star == doctest::Approx(e2.x_star).epsilon(1e-9));
    CHECK(e1.theta_star == doctest::Approx(e2.theta_star).epsilon(1e-9));
}

TEST_CASE("barrier equation shape: decreasing with a unique root below x_hat") {
    auto prob = default_problem();
    const double theta = 0.4884540576434344, r = 0.5;
    const double xh =
        x_hat(prob.profit(), prob.diffusion(), theta, r);
    CHECK(prob.K_integral(xh, theta, r, Mode::discounted) < 0.0);
    CHECK(prob.K_integral(0.05, theta, r, Mode::discounted) > 0.0);
    const double xs = prob.barrier_for(theta, r, Mode::discounted);
    CHECK(xs > 0.0);
    CHECK(xs < xh);
    CHECK(std::abs(prob.K_integral(xs, theta, r, Mode::discounted)) < 1e-9);
}

TEST_CASE("consistency gap changes sign across the equilibrium aggregate") {
    auto prob = default_problem();
    CHECK(prob.Q_gap(0.4, 0.0, Mode::ergodic) > 0.0);
    CHECK(prob.Q_gap(0.7, 0.0, Mode::ergodic) < 0.0);
}

TEST_CASE("discounted value function at equilibrium") {
    auto prob = default_problem();
    auto eq = prob.solve(Mode::discounted, 0.5);
    auto v = prob.value_function(eq);
    const double xs = eq.x_star;

    // frozen oracle from the closed-form resolvent of the case study
    CHECK(v.coeff_A() == doctest::Approx(0.8648629540273818).epsilon(1e-8));
    CHECK(v(xs) == doctest::Approx(2.0243040314805105).epsilon(1e-8));
    CHECK(v(1.0) == doctest::Approx(2.5939253).epsilon(1e-6));

    // smooth fit and the boundary identity r v(x*) = b(x*) + pi(x*, theta*)
    CHECK(v.deriv(xs) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(std::abs(v.second_deriv(xs)) < 1e-8);
    const double rhs = prob.diffusion().drift(xs) +
                       prob.profit().pi(xs, eq.theta_star);
    CHECK(0.5 * v(xs) == doctest::Approx(rhs).epsilon(1e-9));

    // gradient constraint 0 <= v' <= 1 on (x*, 10 x*]
    for (double x = xs; x <= 10.0 * xs; x += 0.3 * xs) {
        CHECK(v.deriv(x) <= 1.0 + 1e-9);
        CHECK(v.deriv(x) >= 0.0);
    }
    // below the barrier: unit-slope continuation
    CHECK(v(0.5 * xs) == doctest::Approx(v(xs) - 0.5 * xs).epsilon(1e-10));

    CHECK_THROWS_AS(prob.value_function(prob.solve(Mode::ergodic)),
                    AssumptionError);
}

TEST_CASE("stationary law at the solved equilibrium closes the loop") {
    auto prob = default_problem();
    auto eq = prob.solve(Mode::ergodic);
    auto law = prob.stationary_law(eq);
    const double mean_f =
        law.mean_of([&](double x) { return prob.profit().f(x); });
    CHECK(prob.profit().aggregate(mean_f) ==
          doctest::Approx(eq.theta_star).epsilon(1e-9));
}
