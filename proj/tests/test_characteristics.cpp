#include "eqflow/characteristics.hpp"
#include "eqflow/errors.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace eqflow;

TEST_CASE("arrival parameter s0") {
    CHECK(s0_of_theta(0.0) == 0.0);
    // 50-digit reference value of atanh(sin 0.016)
    CHECK(std::abs(s0_of_theta(0.016) - 0.016000682710360582517) <= 1e-15);
    CHECK(s0_of_theta(-0.3) == doctest::Approx(-s0_of_theta(0.3)));
    CHECK(std::tanh(s0_of_theta(1.2)) == doctest::Approx(std::sin(1.2)).epsilon(1e-15));
    CHECK_THROWS_AS(s0_of_theta(std::numbers::pi / 2), DomainError);
    CHECK_THROWS_AS(s0_of_theta(-2.0), DomainError);
}

TEST_CASE("closed-form characteristics") {
    const double R = 6.37e6;
    const auto p0 = characteristic_point(R, 0.016, 0.0);
    CHECK(p0.r == doctest::Approx(R * std::cos(0.016)).epsilon(1e-15));
    CHECK(p0.theta == 0.0);

    const auto path = make_characteristic(R, 0.016);
    const auto end = path.at(path.s0);
    CHECK(std::abs(end.r / R - 1) <= 1e-12);
    CHECK(std::abs(end.theta / 0.016 - 1) <= 1e-12);
    CHECK(path.c1 + path.c2 == doctest::Approx(R * std::cos(0.016)));
}

TEST_CASE("invariant r cos(theta) along paths") {
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> ur(0.5, 1.1), ut(-0.5, 0.5), us(-1.0, 1.0);
    for (int i = 0; i < 100; ++i) {
        const auto path = make_characteristic(ur(rng), ut(rng));
        const double s = us(rng);
        const double inv = path.invariant(s);
        CHECK(std::abs(inv / (path.r_base * std::cos(path.theta_base)) - 1) <= 1e-14);
    }
}

TEST_CASE("integrated characteristic equations match the closed form") {
    const double R = 6.37e6;
    const auto c = verify_characteristic_odes(R, 0.016, 0.0, s0_of_theta(0.016), 1e-12);
    CHECK(c.max_residual() <= 1e-8 * R);
    CHECK(c.max_invariant_rel <= 1e-12);
    CHECK(c.steps > 0);

    const auto none = verify_characteristic_odes(R, 0.016, 0.0, 0.0, 1e-12);
    CHECK(none.max_residual() == 0.0);

    // backwards and through the equator
    const auto back = verify_characteristic_odes(1.0, 0.4, -0.6, 0.5, 1e-12);
    CHECK(back.max_residual() <= 1e-9);
}

TEST_CASE("closed form against a fixed-step RK4 oracle") {
    // r' = r sin(theta), theta' = cos(theta), started on the equator
    const double y0 = std::cos(0.3);
    const double s1 = s0_of_theta(0.3);
    const auto y = oracle::rk4(
        [](double, const std::array<double, 2>& u) {
            return std::array<double, 2>{u[0] * std::sin(u[1]), std::cos(u[1])};
        },
        0.0, s1, {y0, 0.0}, 20000);
    const auto cf = characteristic_point(1.0, 0.3, s1);
    CHECK(y[0] == doctest::Approx(cf.r).epsilon(1e-13));
    CHECK(y[1] == doctest::Approx(cf.theta).epsilon(1e-13));
}
