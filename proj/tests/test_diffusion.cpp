#include <cmath>
#include <vector>

#include "doctest.h"
#include "mfg/diffusion.hpp"

using namespace mfg;

namespace {

std::vector<double> log_grid(double lo, double hi, int n) {
    std::vector<double> g(n);
    for (int i = 0; i < n; ++i)
        g[i] = lo * std::pow(hi / lo, i / (n - 1.0));
    return g;
}

// sample a gbm's coefficients into a tabulated model
DiffusionModel tabulated_gbm(double delta, double sigma) {
    auto x = log_grid(1e-4, 1e4, 2000);
    std::vector<double> b, bp, s, sp;
    for (double v : x) {
        b.push_back(-delta * v);
        bp.push_back(-delta);
        s.push_back(sigma * v);
        sp.push_back(sigma);
    }
    return DiffusionModel::custom(x, b, bp, s, sp);
}

}  // namespace

TEST_CASE("gbm scale and speed densities") {
    auto d = DiffusionModel::gbm(2.0, 1.0);
    CHECK(d.scale_density(1.0) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(d.scale_density(2.0) == doctest::Approx(16.0).epsilon(1e-12));
    CHECK(d.scale_density(0.5) == doctest::Approx(0.0625).epsilon(1e-12));
    CHECK(d.speed_density(1.0) == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(d.speed_density(2.0) == doctest::Approx(0.03125).epsilon(1e-12));
}

TEST_CASE("hatted characteristics identities") {
    // grids kept inside the range where exp(log S') is representable
    const std::pair<DiffusionModel, std::pair<double, double>> models[] = {
        {DiffusionModel::gbm(2.0, 1.0), {1e-3, 1e3}},
        {DiffusionModel::affine(1.0, 0.8, 0.5), {0.05, 50.0}}};
    for (const auto& [d, range] : models) {
        for (double x : log_grid(range.first, range.second, 400)) {
            CHECK(std::abs(d.speed_density_hat(x) * d.scale_density(x) - 2.0) <=
                  1e-12 * d.speed_density_hat(x) * d.scale_density(x) + 1e-300);
            const double sh = d.scale_density(x) / (d.vol(x) * d.vol(x));
            CHECK(std::abs(d.scale_density_hat(x) - sh) <= 1e-12 * sh);
        }
    }
}

TEST_CASE("gbm speed measure tail vs closed form") {
    auto d = DiffusionModel::gbm(2.0, 1.0);
    for (double a : {0.5, 1.0, 3.0}) {
        auto q = num::integrate_to_inf(
            [&](double y) { return d.speed_density(y); }, a);
        const double exact = 2.0 * std::pow(a, -5.0) / 5.0;
        CHECK(q.value == doctest::Approx(exact).epsilon(1e-6));
    }
}

TEST_CASE("tabulated coefficients reproduce the closed-form branch") {
    auto d = DiffusionModel::gbm(2.0, 1.0);
    auto c = tabulated_gbm(2.0, 1.0);
    for (double x : log_grid(0.01, 100.0, 60)) {
        CHECK(c.scale_density(x) ==
              doctest::Approx(d.scale_density(x)).epsilon(1e-8));
        CHECK(c.speed_density(x) ==
              doctest::Approx(d.speed_density(x)).epsilon(1e-8));
    }
    CHECK(c.kind() == DiffusionKind::custom);
    CHECK_FALSE(c.gbm_params().has_value());
}

TEST_CASE("affine scale density matches direct quadrature") {
    auto d = DiffusionModel::affine(1.5, 0.7, 0.4);
    for (double x : {0.3, 0.9, 2.5}) {
        const double num_val = std::exp(-num::integrate(
            [&](double z) {
                return 2.0 * d.drift(z) / (d.vol(z) * d.vol(z));
            },
            1.0, x, 1e-12));
        CHECK(d.scale_density(x) == doctest::Approx(num_val).epsilon(1e-9));
    }
}

TEST_CASE("anchor changes scale density by a constant factor only") {
    auto d1 = DiffusionModel::gbm(2.0, 1.0);
    auto d2 = d1.with_anchor(2.0);
    const double ratio = d2.scale_density(1.0) / d1.scale_density(1.0);
    for (double x : {0.2, 0.7, 3.0, 40.0})
        CHECK(d2.scale_density(x) / d1.scale_density(x) ==
              doctest::Approx(ratio).epsilon(1e-12));
}

TEST_CASE("assumption validation on a grid") {
    auto d = DiffusionModel::gbm(2.0, 1.0);
    auto grid = log_grid(1e-3, 1e3, 400);

    auto rep = d.validate(0.5, grid);
    CHECK(rep.ok());
    CHECK(rep.discount_gap == doctest::Approx(2.5).epsilon(1e-12));
    CHECK(rep.discount_gap_ok);
    CHECK(rep.positively_recurrent);
    CHECK(rep.x_b_sigma == 0.0);  // 2xb + sigma^2 = -3x^2 < 0 everywhere
    CHECK(rep.natural_boundaries_checked);

    auto erg = d.validate(0.0, grid, /*ergodic=*/true);
    CHECK(erg.ok());
    CHECK(erg.discount_gap_ok);

    // upward drift: speed measure tail diverges and the discount gap fails
    auto bad = DiffusionModel::gbm(-1.0, 1.0).validate(0.5, grid);
    CHECK_FALSE(bad.positively_recurrent);
    CHECK_FALSE(bad.ok());

    // custom models cannot check natural boundaries constructively
    CHECK_FALSE(tabulated_gbm(2.0, 1.0).validate(0.5, grid)
                    .natural_boundaries_checked);
}

TEST_CASE("degenerate volatility is rejected") {
    auto x = log_grid(0.1, 10.0, 50);
    std::vector<double> b(x.size(), -1.0), bp(x.size(), 0.0),
        s(x.size(), 0.0), sp(x.size(), 0.0);
    CHECK_THROWS_AS(DiffusionModel::custom(x, b, bp, s, sp), AssumptionError);
    CHECK_THROWS_AS(DiffusionModel::gbm(2.0, -1.0), AssumptionError);
}
