#include <catch2/catch.hpp>

#include <cmath>
#include <random>

#include "kneadlab/power_law_map.hpp"

using namespace kneadlab;

TEST_CASE("eval matches direct arithmetic") {
    CHECK(eval(PowerLawMap(2.0, 2.0), 0.0) == 2.0);
    CHECK(eval(PowerLawMap(1.0, 3.0), -1.0) == Approx(0.0).margin(1e-15));
    // independent route: std::pow instead of exp(r log|x|)
    double expected = 1.5 - std::pow(0.5, 2.5);
    CHECK(eval(PowerLawMap(1.5, 2.5), 0.5) == Approx(expected).epsilon(1e-13));
    CHECK(eval(PowerLawMap(1.5, 2.5), 0.5) == Approx(1.3232233047033630).epsilon(1e-12));
}

TEST_CASE("phase derivative") {
    CHECK(phase_derivative(PowerLawMap(1.0, 2.0), 3.0) == Approx(-6.0));
    CHECK(phase_derivative(PowerLawMap(1.0, 2.0), 0.0) == 0.0);
    CHECK(phase_derivative(PowerLawMap(1.0, 3.7), 0.0) == 0.0);
    // -r sgn(x) |x|^{r-1} at x = -0.25, r = 2.5: +2.5 * 0.25^{1.5} = 0.3125
    CHECK(phase_derivative(PowerLawMap(1.0, 2.5), -0.25) == Approx(0.3125).epsilon(1e-13));

    SECTION("sign law: sign f'(x) = -sgn(x)") {
        std::mt19937_64 rng(7);
        std::uniform_real_distribution<double> xs(-3.0, 3.0);
        std::uniform_real_distribution<double> rs(1.1, 4.0);
        for (int i = 0; i < 200; ++i) {
            double x = xs(rng);
            if (x == 0.0) continue;
            double d = phase_derivative(PowerLawMap(1.0, rs(rng)), x);
            CHECK(std::signbit(d) == !std::signbit(x));
        }
    }
}

TEST_CASE("critical orbit values and parameter derivatives") {
    OrbitBuffer orbit = critical_orbit(PowerLawMap(2.0, 2.0), 3, true);
    REQUIRE(orbit.depth() == 3);
    CHECK(orbit.values[0] == 2.0);
    CHECK(orbit.values[1] == Approx(-2.0).margin(1e-12));
    CHECK(orbit.values[2] == Approx(-2.0).margin(1e-12));
    // D_1 = 1, D_2 = 1 + f'(2) = -3, D_3 = 1 + f'(-2)(-3) = -11
    CHECK(orbit.param_derivs[0] == 1.0);
    CHECK(orbit.param_derivs[1] == Approx(-3.0).margin(1e-12));
    CHECK(orbit.param_derivs[2] == Approx(-11.0).margin(1e-11));

    OrbitBuffer superstable = critical_orbit(PowerLawMap(1.0, 2.0), 2);
    CHECK(superstable.values[0] == 1.0);
    CHECK(superstable.values[1] == 0.0);

    CHECK_THROWS_AS(critical_orbit(PowerLawMap(2.1, 2.0), 10), OrbitEscaped);
}

TEST_CASE("orbit reconstruction property") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> rs(1.2, 3.5);
    for (int trial = 0; trial < 50; ++trial) {
        double r = rs(rng);
        std::uniform_real_distribution<double> as(0.3, a_full(r));
        PowerLawMap map(as(rng), r);
        OrbitBuffer orbit = critical_orbit(map, 50);
        for (int i = 0; i + 1 < orbit.depth(); ++i) {
            double expected = eval(map, orbit.values[i]);
            double scale = std::max(1.0, std::fabs(expected));
            CHECK(std::fabs(orbit.values[i + 1] - expected) <= 1e-12 * scale);
        }
    }
}

TEST_CASE("parameter derivative agrees with central differences") {
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> rs(1.4, 3.0);
    const double h = 1e-6;
    int checked = 0;
    for (int attempt = 0; attempt < 10000 && checked < 25; ++attempt) {
        double r = rs(rng);
        std::uniform_real_distribution<double> as(0.6, a_full(r) - 2.0 * h);
        double a = as(rng);
        const int n = 12;
        OrbitBuffer orbit = critical_orbit(PowerLawMap(a, r), n, true);
        double min_abs = 1e30;
        for (double w : orbit.values) min_abs = std::min(min_abs, std::fabs(w));
        if (min_abs <= 1e-3) continue;  // derivative check needs a smooth window
        ++checked;
        double wp = critical_orbit(PowerLawMap(a + h, r), n).values.back();
        double wm = critical_orbit(PowerLawMap(a - h, r), n).values.back();
        double fd = (wp - wm) / (2.0 * h);
        double dn = orbit.param_derivs.back();
        CHECK(std::fabs(fd - dn) <= 1e-4 * std::max(1.0, std::fabs(dn)));
    }
}

TEST_CASE("orbit derivative product in signed log form") {
    SignedLogProduct empty = orbit_derivative_product(PowerLawMap(2.0, 2.0), 1);
    CHECK(empty.sign == 1);
    CHECK(empty.log_magnitude == 0.0);

    // f'(2) f'(-2) = (-4)(+4) = -16
    SignedLogProduct p = orbit_derivative_product(PowerLawMap(2.0, 2.0), 3);
    CHECK(p.sign == -1);
    CHECK(p.log_magnitude == Approx(std::log(16.0)).epsilon(1e-12));
    CHECK(p.value() == Approx(-16.0).epsilon(1e-12));

    // orbit hits 0 at step 2
    SignedLogProduct zero = orbit_derivative_product(PowerLawMap(1.0, 2.0), 3);
    CHECK(zero.sign == 0);
    CHECK(zero.value() == 0.0);

    SECTION("sign equals parity of positive orbit points") {
        std::mt19937_64 rng(17);
        std::uniform_real_distribution<double> rs(1.3, 3.0);
        for (int trial = 0; trial < 40; ++trial) {
            double r = rs(rng);
            std::uniform_real_distribution<double> as(0.6, a_full(r));
            PowerLawMap map(as(rng), r);
            const int n = 14;
            OrbitBuffer orbit = critical_orbit(map, n - 1);
            bool has_zero = false;
            int positives = 0;
            for (double w : orbit.values) {
                if (w == 0.0) has_zero = true;
                else if (w > 0.0) ++positives;
            }
            if (has_zero) continue;
            SignedLogProduct prod = orbit_derivative_product(map, n);
            CHECK(prod.sign == (positives % 2 == 0 ? 1 : -1));
        }
    }
}

TEST_CASE("core interval") {
    Interval full = core_interval(PowerLawMap(2.0, 2.0));
    CHECK(full.lo == Approx(-2.0).margin(1e-14));
    CHECK(full.hi == 2.0);

    Interval cube = core_interval(PowerLawMap(1.0, 3.0));
    CHECK(cube.lo == Approx(0.0).margin(1e-14));
    CHECK(cube.hi == 1.0);

    CHECK_THROWS_AS(core_interval(PowerLawMap(2.1, 2.0)), NotSelfMap);

    CHECK(a_full(2.0) == Approx(2.0));
    CHECK(a_full(1.5) == Approx(4.0));
    CHECK(a_full(3.0) == Approx(std::sqrt(2.0)));
}

TEST_CASE("map construction rejects bad parameters") {
    CHECK_THROWS_AS(PowerLawMap(1.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(PowerLawMap(1.0, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(PowerLawMap(0.0, 2.0), std::invalid_argument);
    CHECK_THROWS_AS(PowerLawMap(-1.0, 2.0), std::invalid_argument);
}
