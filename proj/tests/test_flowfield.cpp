#include "eqflow/errors.hpp"
#include "eqflow/flowfield.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace eqflow;

namespace {

Parameters physical() {
    Parameters p;
    p.Omega = 7.29e-5;
    p.g = 9.81;
    p.sigma = 0.0728;
    p.P_atm = 101325;
    p.R = 6.37e6;
    p.a = 6.36e6;
    p.eps = 0.016;
    return p;
}

Parameters desk() {
    Parameters p;
    p.tol_ode = 1e-12;
    return p;
}

FlowField stratified(FlowOptions opts = {}) {
    const Parameters p = desk();
    return FlowField(p, make_latitude_quadratic_density(p, 1.0, 0.5, 1.0), make_linear_profile(p, 0.02), opts);
}

}  // namespace

TEST_CASE("velocity closed form without stratification or profile") {
    const Parameters p = physical();
    const FlowField f(p, make_constant_density(p, 1000.0), make_zero_profile(p));
    CHECK(std::abs(f.azimuthal_velocity(6.37e6, 0.0) - (-232.19)) <= 0.01);
    for (double t : {0.0, 0.005, 0.016})
        CHECK(f.azimuthal_velocity(6.365e6, t) == doctest::Approx(-p.Omega * 6.365e6 * std::cos(t) / 2).epsilon(1e-14));
    CHECK(std::abs(f.U(p.R, 0.01)) <= 1e-12 * p.Omega * p.R);
}

TEST_CASE("velocity is even in theta for an even density") {
    const FlowField f = stratified();
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> ur(0.5, 1.1), ut(0.0, 0.5);
    for (int i = 0; i < 20; ++i) {
        const double r = ur(rng), t = ut(rng);
        CHECK(f.azimuthal_velocity(r, -t) == doctest::Approx(f.azimuthal_velocity(r, t)).epsilon(1e-9));
    }
}

TEST_CASE("pressure constant") {
    Parameters p = physical();
    p.A = 2.0e5;
    const FlowField zero(p, make_constant_density(p, 1000.0), make_zero_profile(p));
    CHECK(zero.pressure_constant(0.0) == 2.0e5);
    CHECK(zero.pressure_constant(0.012) == 2.0e5);

    const FlowField lin(p, make_constant_density(p, 1000.0), make_linear_profile(p, 1.0));
    const double expect = -p.a * (1 - std::cos(0.016));
    CHECK((lin.pressure_constant(0.016) - 2.0e5) == doctest::Approx(expect).epsilon(1e-9));
}

TEST_CASE("hydrostatic pressure") {
    Parameters p = physical();
    p.A = 5.0e7;
    const FlowField f(p, make_constant_density(p, 1000.0), make_zero_profile(p));
    CHECK(f.pressure(p.a + 1e3, 0.0) == doctest::Approx(5.0e7 - 9.81e6).epsilon(1e-13));
    CHECK(f.pressure(p.a + 1e3, 0.015) == doctest::Approx(5.0e7 - 9.81e6).epsilon(1e-13));
    const auto g = f.pressure_gradients(p.R, 0.01);
    CHECK(g.p_r == doctest::Approx(-9.81 * 1000).epsilon(1e-14));
    CHECK(g.p_theta == 0.0);
    CHECK_THROWS_AS(f.pressure(p.a - 10.0, 0.0), DomainError);
    CHECK_THROWS_AS(f.pressure(p.R, 0.02), DomainError);
}

TEST_CASE("default gauge") {
    const Parameters p = physical();
    const FlowField f(p, make_constant_density(p, 1025.0), make_zero_profile(p));
    const double A = f.A();
    CHECK(A == doctest::Approx(p.P_atm + p.sigma / p.R + p.g * 1025.0 * (p.R - p.a)).epsilon(1e-14));
    // A ~ 1e8 Pa cancels against the gravity integral
    CHECK(f.pressure(p.R, 0.0) == doctest::Approx(p.P_atm + p.sigma / p.R).epsilon(1e-12));
}

TEST_CASE("latitude derivative of pressure vanishes on the equator") {
    const FlowField f = stratified();
    for (double r : {0.6, 0.9, 1.05}) {
        const auto g = f.pressure_gradients(r, 0.0);
        CHECK(std::abs(g.p_theta) <= 1e-14);
        CHECK(std::abs(g.p_theta_coriolis) <= 1e-14);
    }
}

TEST_CASE("stratification integral") {
    const Parameters p = physical();
    const FlowField c(p, make_constant_density(p, 1000.0), make_zero_profile(p));
    CHECK(c.stratification().identically_zero());
    CHECK(c.stratification_integral(p.R, 0.01) == 0.0);

    const auto rho = make_latitude_quadratic_density(p, 1000.0, 0.0, 1.0);
    const oracle::QuadraticDensity od{1000.0, 0.0, 1.0, p.R};
    const double y = p.R * std::cos(0.01);
    const double ref = oracle::strat_H(od, p.g, y, 0.01, 1000000);
    for (auto mode : {StratificationMode::table, StratificationMode::direct}) {
        const FlowField f(p, rho, make_zero_profile(p), FlowOptions{mode, 64, 33});
        CHECK(f.stratification_integral(y, 0.0) == 0.0);
        CHECK(f.stratification_integral(y, 0.01) == doctest::Approx(ref).epsilon(1e-9));
    }
}

TEST_CASE("tabulated and direct stratification agree") {
    const FlowField t = stratified();
    const FlowField d = stratified(FlowOptions{StratificationMode::direct, 64, 33});
    CHECK(t.stratification().tabulated());
    CHECK_FALSE(d.stratification().tabulated());
    std::mt19937 rng(9);
    std::uniform_real_distribution<double> uy(0.5 * std::cos(0.5), 1.1), ut(0.0, 0.5);
    for (int i = 0; i < 20; ++i) {
        const double y = uy(rng), th = ut(rng);
        CHECK(t.stratification_integral(y, th) == doctest::Approx(d.stratification_integral(y, th)).scale(1).epsilon(1e-10));
    }
    CHECK(t.pressure(0.95, 0.3) == doctest::Approx(d.pressure(0.95, 0.3)).epsilon(1e-10));
}

TEST_CASE("finite-difference fallback gives the analytic stratification") {
    const Parameters p = desk();
    const auto analytic = make_latitude_quadratic_density(p, 1.0, 0.5, 1.0);
    const auto fd = DensityModel("fd", analytic.domain(), [analytic](double r, double t) { return analytic.rho(r, t); },
                                 std::nullopt, false);
    const FlowField A(p, analytic, make_linear_profile(p, 0.02));
    const FlowField B(p, fd, make_linear_profile(p, 0.02));
    for (double th : {0.1, 0.3, 0.5}) {
        CHECK(B.stratification_integral(0.8, th) == doctest::Approx(A.stratification_integral(0.8, th)).epsilon(1e-8));
        CHECK(B.azimuthal_velocity(0.9, th) == doctest::Approx(A.azimuthal_velocity(0.9, th)).epsilon(1e-9));
    }
}

TEST_CASE("Euler residuals") {
    SUBCASE("hydrostatic cancellation") {
        const Parameters p = physical();
        const FlowField f(p, make_constant_density(p, 1000.0), make_zero_profile(p));
        const auto res = euler_residuals(f, f.sample(make_field_grid(p.a, p.r_max(), 20, p.eps, 20)));
        CHECK(res.max_R1_rel <= 1e-10);
        CHECK(res.max_R2_rel <= 1e-10);
    }
    SUBCASE("stratified desk scale on a 50x50 grid") {
        const FlowField f = stratified();
        const auto& p = f.params();
        const auto res = euler_residuals(f, f.sample(make_field_grid(p.a, p.r_max(), 50, p.eps, 50)));
        CHECK(std::max(res.max_R1_rel, res.max_R2_rel) <= 1e-8);
        CHECK(res.R3 == 0.0);
        CHECK(res.mass_radial == 0.0);
        CHECK(res.kinematic_surface == 0.0);
    }
    SUBCASE("grid mismatch") {
        const FlowField f = stratified();
        auto s = f.sample(make_field_grid(0.5, 1.1, 5, 0.5, 5));
        s.p = f.sample(make_field_grid(0.5, 1.1, 6, 0.5, 5)).p;
        CHECK_THROWS_AS(euler_residuals(f, s), PreconditionError);
    }
}

TEST_CASE("radial gradient against differences for a nonlinear profile") {
    const Parameters p = desk();
    const auto [lo, hi] = profile_domain(p);
    const AzimuthalProfile F("cubic", lo, hi, [](double x) { return 0.05 * x * x * x - 0.01 * x; });
    const FlowField f(p, make_latitude_quadratic_density(p, 1.0, 0.5, 1.0), F);
    for (const auto& [r, t] : std::vector<std::pair<double, double>>{{0.7, 0.1}, {0.95, 0.4}}) {
        const double h = 1e-3;
        const double fd = (f.pressure(r + h, t) - f.pressure(r - h, t)) / (2 * h);
        CHECK(fd == doctest::Approx(f.radial_pressure_gradient(r, t)).epsilon(1e-6));
    }
}

TEST_CASE("gradient step-halving study") {
    const FlowField f = stratified();
    const auto st = pressure_gradient_fd_study(f, {{0.62, 0.15}, {0.8, 0.3}, {0.98, 0.4}}, 0.012, 0.01, 4);
    REQUIRE(st.orders.size() == 3);
    CHECK(st.min_order() >= 1.9);
    CHECK(st.max_route_gap <= 10 * f.params().tol_quad);
}

TEST_CASE("stratification derivative identity") {
    const FlowField f = stratified();
    const auto s = stratification_derivative_identity(f, 1.0, 0.01);
    CHECK(s.rel_gap <= 1e-9);
    CHECK(s.lhs_closed == doctest::Approx(s.rhs).epsilon(1e-9));
    CHECK(s.lhs_fd == doctest::Approx(s.rhs).epsilon(1e-7));
}
