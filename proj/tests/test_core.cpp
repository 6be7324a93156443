#include "eqflow/core.hpp"
#include "eqflow/errors.hpp"

#include <doctest.h>

#include <cmath>
#include <random>
#include <string>

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

std::string message_of(const Parameters& p) {
    try {
        validate_parameters(p);
    } catch (const ParameterError& e) {
        return e.what();
    }
    return {};
}

}  // namespace

TEST_CASE("parameter validation") {
    CHECK_NOTHROW(validate_parameters(physical()));
    CHECK_NOTHROW(validate_parameters(Parameters{}));

    auto p = physical();
    p.eps = 0.0;
    CHECK(message_of(p) == "eps must be positive");
    p = physical();
    p.a = p.R;
    CHECK(message_of(p) == "a must satisfy 0 < a < R");
    p = physical();
    p.sigma = -1.0;
    CHECK(message_of(p) == "sigma must be non-negative");
    p = physical();
    p.sigma = 0.0;
    CHECK(message_of(p).empty());
    p = physical();
    p.tol_quad = 0.0;
    CHECK_FALSE(message_of(p).empty());
    p = physical();
    p.Omega = std::nan("");
    CHECK(message_of(p) == "Omega must be positive");
}

TEST_CASE("density domain reaches the characteristics' extent") {
    const Parameters p = physical();
    const auto d = density_domain(p);
    CHECK(d.r_lo == doctest::Approx(p.a * std::cos(p.eps)));
    CHECK(d.r_hi == doctest::Approx(p.r_max() / std::cos(p.eps)));
    CHECK(d.theta_max == p.eps);
    CHECK(d.contains(p.R, -p.eps));
    CHECK_FALSE(d.contains(p.R, 1.01 * p.eps));
}

TEST_CASE("constant and separable densities") {
    const Parameters p = physical();
    const auto c = make_constant_density(p, 1000.0);
    const auto s = c.eval(p.R, 0.01);
    CHECK(s.rho == 1000.0);
    CHECK(s.rho_theta == 0.0);
    CHECK(c.theta_independent());

    const auto q = make_latitude_quadratic_density(p, 1000.0, 0.0, 1.0);
    CHECK(q.rho_theta(p.R, 0.0) == 0.0);
    CHECK(q.rho_theta(p.R, 0.01) == doctest::Approx(2 * 1000.0 * 0.01));
    CHECK_FALSE(q.theta_independent());

    const auto l = make_linear_depth_density(p, 1000.0, 0.5);
    CHECK(l.rho(p.a, 0.0) == doctest::Approx(1000.0 * (1 + 0.5 * (p.R - p.a) / p.R)));
    CHECK(l.theta_independent());

    CHECK_THROWS_AS(c.rho(p.R, 0.1), DomainError);
    CHECK_THROWS_AS(c.rho(0.5 * p.a, 0.0), DomainError);
}

TEST_CASE("finite-difference latitude derivative") {
    Parameters p;  // desk defaults
    const auto q = make_latitude_quadratic_density(p, 1.0, 0.5, 1.0);
    const double h = q.fallback_step();
    CHECK(h == doctest::Approx(1e-4 * p.eps));
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> ur(0.6, 1.0), ut(-p.eps, p.eps);
    for (int i = 0; i < 40; ++i) {
        const double r = ur(rng), t = ut(rng);
        CHECK(q.rho_theta_fd(r, t, h) == doctest::Approx(q.rho_theta(r, t)).scale(1.0).epsilon(1e-9));
    }
    // one-sided stencils at the edges
    CHECK(q.rho_theta_fd(0.8, p.eps, h) == doctest::Approx(2 * p.eps).epsilon(1e-8));
    CHECK(q.rho_theta_fd(0.8, -p.eps, h) == doctest::Approx(-2 * p.eps).epsilon(1e-8));
}

TEST_CASE("tabulated density falls back to finite differences") {
    Parameters p;
    const auto dom = density_domain(p);
    std::vector<double> r, t, v;
    for (int i = 0; i <= 40; ++i) r.push_back(dom.r_lo + (dom.r_hi - dom.r_lo) * i / 40.0);
    for (int j = 0; j <= 40; ++j) t.push_back(-dom.theta_max + 2 * dom.theta_max * j / 40.0);
    for (double ri : r)
        for (double tj : t) v.push_back(1.0 + 0.1 * ri + 0.3 * tj * tj);
    const auto m = make_tabulated_density(p, r, t, v);
    CHECK_FALSE(m.has_analytic_derivative());
    CHECK(m.rho(0.9, 0.2) == doctest::Approx(1.0 + 0.09 + 0.3 * 0.04).epsilon(1e-4));
    CHECK(m.rho_theta(0.9, 0.2) == doctest::Approx(0.6 * 0.2).epsilon(1e-3));
    CHECK_NOTHROW(check_density_positive(m));

    t.pop_back();
    v.resize(r.size() * t.size());
    CHECK_THROWS_AS(make_tabulated_density(p, r, t, v), DomainError);
}

TEST_CASE("non-positive density is rejected") {
    Parameters p;
    const auto m = make_linear_depth_density(p, 1.0, -5.0);
    CHECK_THROWS_AS(check_density_positive(m), DomainError);
}

TEST_CASE("profiles") {
    Parameters p;
    const auto [lo, hi] = profile_domain(p);
    CHECK(lo == doctest::Approx(p.a * std::cos(p.eps)));
    CHECK(hi == doctest::Approx(p.r_max()));
    const auto z = make_zero_profile(p);
    CHECK(z.identically_zero());
    CHECK(z(0.9) == 0.0);
    const auto lin = make_linear_profile(p, 0.02);
    CHECK(lin(0.9) == doctest::Approx(0.018));
    CHECK_THROWS_AS(lin(0.1), DomainError);

    std::vector<double> x, f;
    for (int i = 0; i <= 60; ++i) {
        x.push_back(lo + (hi - lo) * i / 60.0);
        f.push_back(std::sin(x.back()));
    }
    const auto sp = make_tabulated_profile(p, x, f);
    CHECK(sp(0.777) == doctest::Approx(std::sin(0.777)).epsilon(1e-6));
    x.pop_back();
    f.pop_back();
    CHECK_THROWS_AS(make_tabulated_profile(p, x, f), DomainError);
}

TEST_CASE("field grids") {
    const auto g = make_field_grid(0.5, 1.1, 50, 0.5, 50);
    CHECK(g.nr() == 50);
    CHECK(g.ntheta() == 50);
    CHECK(g.r_nodes.front() == 0.5);
    CHECK(g.r_nodes.back() == 1.1);
    CHECK(g.theta_nodes.back() == 0.5);
    ScalarField2D f(g, FieldRole::w);
    f.at(3, 4) = -2.5;
    CHECK(f.max_abs() == 2.5);
    CHECK(std::string(to_string(FieldRole::p)) == "p");
    CHECK_THROWS_AS(make_field_grid(0.5, 1.1, 1, 0.5, 50), PreconditionError);
}
