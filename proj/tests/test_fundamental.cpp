#include <cmath>
#include <sstream>

#include "doctest.h"
#include "mfg/fundamental.hpp"

using namespace mfg;

namespace {

DiffusionModel tabulated_gbm(double delta, double sigma) {
    std::vector<double> x, b, bp, s, sp;
    for (int i = 0; i < 2000; ++i) {
        const double v = 1e-4 * std::pow(1e8, i / 1999.0);
        x.push_back(v);
        b.push_back(-delta * v);
        bp.push_back(-delta);
        s.push_back(sigma * v);
        sp.push_back(sigma);
    }
    return DiffusionModel::custom(x, b, bp, s, sp);
}

const std::pair<double, double> kDom{1e-5, 1e5};

}  // namespace

TEST_CASE("closed-form gbm branch") {
    auto d = DiffusionModel::gbm(2.0, 1.0);
    const double m = -0.19258240356725187, n = 5.192582403567252;
    auto phi = solve_fundamental(d, 0.5, Branch::phi_decreasing, false, kDom);
    auto psi = solve_fundamental(d, 0.5, Branch::psi_increasing, false, kDom);
    CHECK(phi.method() == SolveMethod::closed_form_gbm);
    CHECK(phi.value(1.0) == doctest::Approx(1.0));
    CHECK(phi.value(2.0) == doctest::Approx(std::pow(2.0, m)).epsilon(1e-14));
    CHECK(psi.value(2.0) == doctest::Approx(std::pow(2.0, n)).epsilon(1e-14));
    CHECK(phi.deriv(2.0) ==
          doctest::Approx(m * std::pow(2.0, m - 1.0)).epsilon(1e-14));
    CHECK(phi.log_slope(7.0) == doctest::Approx(m));
    CHECK(phi.residual(3.0) == 0.0);
    // hatted solutions shift the exponent by one
    auto ph = solve_fundamental(d, 0.5, Branch::phi_decreasing, true, kDom);
    CHECK(ph.value(2.0) ==
          doctest::Approx(std::pow(2.0, m - 1.0)).epsilon(1e-14));
    // ergodic hatted decreasing solution: exponent m(0) - 1 = -1
    auto ph0 = solve_fundamental(d, 0.0, Branch::phi_decreasing, true, kDom);
    CHECK(ph0.value(2.0) == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("shooting matches the closed form") {
    auto d = DiffusionModel::gbm(2.0, 1.0);
    for (bool hatted : {false, true}) {
        for (auto branch : {Branch::phi_decreasing, Branch::psi_increasing}) {
            auto cf = solve_fundamental(d, 0.5, branch, hatted, kDom);
            auto ode = solve_fundamental(d, 0.5, branch, hatted, kDom, 0.0,
                                         SolveMethod::ode_shooting);
            double worst = 0.0;
            for (double x = 0.1; x <= 10.0; x *= 1.03)
                worst = std::max(worst,
                                 std::abs(ode.value(x) / cf.value(x) - 1.0));
            CHECK(worst < 1e-7);
            CHECK(ode.residual(0.7) < 1e-8);
            CHECK(ode.residual(4.2) < 1e-8);
        }
    }
}

TEST_CASE("monotonicity and power-law extension") {
    auto d = DiffusionModel::gbm(2.0, 1.0);
    auto phi = solve_fundamental(d, 0.5, Branch::phi_decreasing, false, kDom,
                                 0.0, SolveMethod::ode_shooting);
    double prev = phi.value(1e-4);
    for (double x = 2e-4; x < 1e4; x *= 1.5) {
        const double v = phi.value(x);
        CHECK(v < prev);
        prev = v;
    }
    // beyond the computed domain the log-slope freezes
    CHECK(phi.log_slope(1e7) == doctest::Approx(phi.log_slope(1e5)));
    CHECK(phi.value(1e7) / phi.value(1e6) ==
          doctest::Approx(std::pow(10.0, phi.log_slope(1e5))).epsilon(1e-9));
}

TEST_CASE("wronskian is constant and order-checked") {
    auto d = DiffusionModel::gbm(2.0, 1.0);
    auto phi = solve_fundamental(d, 0.5, Branch::phi_decreasing, false, kDom);
    auto psi = solve_fundamental(d, 0.5, Branch::psi_increasing, false, kDom);
    // for gbm normalized at 1: w = n - m
    CHECK(wronskian(psi, phi, d, 1.0) ==
          doctest::Approx(5.385164807134504).epsilon(1e-10));
    auto phi2 = solve_fundamental(d, 0.25, Branch::phi_decreasing, false, kDom);
    CHECK_THROWS_AS(wronskian(psi, phi2, d, 1.0), AssumptionError);
}

TEST_CASE("tabulated model: shooting solution satisfies the equation") {
    auto c = tabulated_gbm(2.0, 1.0);
    auto d = DiffusionModel::gbm(2.0, 1.0);
    auto ode = solve_fundamental(c, 0.5, Branch::phi_decreasing, false,
                                 {1e-3, 1e3}, 0.0, SolveMethod::ode_shooting);
    auto cf = solve_fundamental(d, 0.5, Branch::phi_decreasing, false, kDom);
    double worst = 0.0;
    for (double x = 0.1; x <= 10.0; x *= 1.1)
        worst = std::max(worst, std::abs(ode.value(x) / cf.value(x) - 1.0));
    CHECK(worst < 1e-6);
    CHECK(ode.residual(2.0) < 1e-7);
}

TEST_CASE("integral identity for the hatted decreasing solution") {
    const double r = 0.5, a = 0.5, b = 2.0;
    auto check_model = [&](const DiffusionModel& d, SolveMethod method,
                           double tol) {
        auto ph = solve_fundamental(d, r, Branch::phi_decreasing, true,
                                    {1e-3, 1e3}, 0.0, method);
        const double lhs = ph.deriv(b) / d.scale_density_hat(b) -
                           ph.deriv(a) / d.scale_density_hat(a);
        const double rhs = num::integrate(
            [&](double y) {
                return ph.value(y) * (r - d.drift_prime(y)) *
                       d.speed_density_hat(y);
            },
            a, b, 1e-13);
        CHECK(lhs == doctest::Approx(rhs).epsilon(tol));
    };
    check_model(DiffusionModel::gbm(2.0, 1.0), SolveMethod::closed_form_gbm,
                1e-9);
    check_model(DiffusionModel::gbm(2.0, 1.0), SolveMethod::ode_shooting, 1e-7);
    check_model(tabulated_gbm(2.0, 1.0), SolveMethod::ode_shooting, 1e-6);
}

TEST_CASE("probabilistic representation cross-check") {
    auto d = DiffusionModel::gbm(2.0, 1.0);
    auto ph = solve_fundamental(d, 0.5, Branch::phi_decreasing, true, kDom);
    const double exact = ph.value(1.0) / ph.value(0.5);
    auto mc = phi_hat_mc(d, 0.5, 1.0, 0.5, 20000, 20240817);
    CHECK(std::abs(mc.estimate - exact) < 3.0 * mc.std_error);
    CHECK_FALSE(mc.horizon_warning);
    CHECK(mc.std_error > 0.0);
}

TEST_CASE("diagnostics dump") {
    auto d = DiffusionModel::gbm(2.0, 1.0);
    auto phi = solve_fundamental(d, 0.5, Branch::phi_decreasing, false,
                                 {1e-2, 1e2}, 0.0, SolveMethod::ode_shooting);
    std::ostringstream os;
    phi.dump_csv(os);
    CHECK(os.str().substr(0, 28) == "x,value,derivative,residual\n");
    CHECK(os.str().size() > 1000);
}

TEST_CASE("domain and precondition errors") {
    auto d = DiffusionModel::gbm(2.0, 1.0);
    CHECK_THROWS_AS(solve_fundamental(d, 0.5, Branch::phi_decreasing, false,
                                      {2.0, 1.0}),
                    AssumptionError);
    CHECK_THROWS_AS(solve_fundamental(tabulated_gbm(2.0, 1.0), 0.5,
                                      Branch::phi_decreasing, false, kDom, 0.0,
                                      SolveMethod::closed_form_gbm),
                    AssumptionError);
    auto phi = solve_fundamental(d, 0.5, Branch::phi_decreasing, false, kDom);
    CHECK_THROWS_AS(phi.log_value(-1.0), AssumptionError);
}
