#include <cmath>

#include "doctest.h"
#include "mfg/numerics.hpp"

using namespace mfg;
using namespace mfg::num;

TEST_CASE("adaptive quadrature on finite intervals") {
    CHECK(integrate([](double x) { return std::exp(x); }, 0.0, 1.0) ==
          doctest::Approx(std::exp(1.0) - 1.0).epsilon(1e-12));
    CHECK(integrate([](double x) { return std::sin(x); }, 0.0, M_PI) ==
          doctest::Approx(2.0).epsilon(1e-12));
    // integrable endpoint spike
    CHECK(integrate([](double x) { return 1.0 / std::sqrt(1.0 - x); }, 0.0,
                    1.0 - 1e-14) == doctest::Approx(2.0).epsilon(1e-6));
}

TEST_CASE("improper integrals by decade blocks") {
    auto q = integrate_to_inf([](double x) { return 1.0 / (x * x); }, 1.0);
    CHECK(q.value == doctest::Approx(1.0).epsilon(1e-10));
    CHECK_FALSE(q.truncated_tail);

    auto p = integrate_to_inf([](double x) { return std::exp(-x); }, 0.5);
    CHECK(p.value == doctest::Approx(std::exp(-0.5)).epsilon(1e-10));

    auto z = integrate_from_zero([](double x) { return 1.0 / std::sqrt(x); },
                                 1.0);
    CHECK(z.value == doctest::Approx(2.0).epsilon(1e-9));

    // divergent tail is flagged, not silently summed
    auto d = integrate_to_inf([](double x) { return 1.0 / x; }, 1.0);
    CHECK(d.truncated_tail);
}

TEST_CASE("bisection and bracket expansion") {
    auto r = bisect([](double x) { return x * x - 2.0; }, 0.0, 2.0);
    CHECK(r.converged);
    CHECK(r.x == doctest::Approx(std::sqrt(2.0)).epsilon(1e-11));

    CHECK_THROWS_AS(bisect([](double x) { return x + 3.0; }, 0.0, 1.0),
                    AssumptionError);

    auto br = expand_bracket([](double x) { return std::log(x); }, 5.0, 1e-12,
                             1e12);
    CHECK(br.first < 1.0);
    CHECK(br.second >= 1.0);
    CHECK_THROWS_AS(
        expand_bracket([](double x) { return x + 1.0; }, 1.0, 1e-6, 1e6),
        AssumptionError);
}

TEST_CASE("monotone cubic interpolation") {
    std::vector<double> x = {0.0, 1.0, 2.0, 4.0, 8.0};
    std::vector<double> y;
    for (double v : x) y.push_back(v * v);
    Pchip p(x, y);
    CHECK(p(1.0) == doctest::Approx(1.0));
    CHECK(p(3.0) == doctest::Approx(9.0).epsilon(0.05));
    // monotone data stays monotone between nodes
    double prev = p(0.0);
    for (double t = 0.05; t <= 8.0; t += 0.05) {
        CHECK(p(t) >= prev - 1e-12);
        prev = p(t);
    }
    CHECK(p.deriv(2.0) == doctest::Approx(4.0).epsilon(0.2));
}

TEST_CASE("splitmix64 reference value") {
    std::uint64_t s = 0;
    CHECK(splitmix64(s) == 0xE220A8397B1DCDAFull);
}
