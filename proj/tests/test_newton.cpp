#include "eqflow/errors.hpp"
#include "eqflow/newton.hpp"

#include <doctest.h>

#include <cmath>

using namespace eqflow;

namespace {

Parameters desk() {
    Parameters p;
    p.tol_ode = 1e-12;
    return p;
}

SurfaceFunctional desk_stratified(Parameters p = desk()) {
    return SurfaceFunctional(
        FlowField(p, make_latitude_quadratic_density(p, 1.0, 0.5, 1.0), make_linear_profile(p, 0.02)));
}

SurfaceShape quadratic(double c, double eps = 0.5) {
    return SurfaceShape::from_function([c](double t) { return c * t * t; }, eps);
}

double sup_gap(const SurfaceShape& a, const SurfaceShape& b) {
    double m = 0.0;
    for (double t : lobatto_nodes(129, 0.0, a.eps())) m = std::max(m, std::abs(a(t) - b(t)));
    return m;
}

}  // namespace

TEST_CASE("forward map") {
    const auto S = desk_stratified();
    const NewtonSolver solver(S);
    const auto& th = solver.sample_points();
    const auto P0 = S.baseline_pressure();

    const auto Pz = solver.forward_map(SurfaceShape::zero(0.5));
    for (double t : th) CHECK(std::abs(Pz(t) - P0(t)) <= 1e-12);

    const auto Hs = quadratic(1e-4);
    const auto Ps = forward_map(S, Hs);
    for (double t : th) CHECK(std::abs(S.residual(Hs, Ps, t)) <= 1e-15);

    Parameters q = S.params();
    q.A = S.flow().A() + 2.0;
    const auto Pg = forward_map(desk_stratified(q), Hs);
    for (double t : {0.0, 0.25, 0.5}) CHECK(Pg(t) - Ps(t) == doctest::Approx(2.0 / q.P_atm).epsilon(1e-12));
}

TEST_CASE("undisturbed pressure needs no correction") {
    const auto S = desk_stratified();
    const auto r = newton_solve(S, S.baseline_pressure());
    CHECK(r.report.converged);
    CHECK(r.report.iterations == 1);
    CHECK(r.shape.sup_abs() == 0.0);
}

TEST_CASE("manufactured round trip") {
    const auto S = desk_stratified();
    const NewtonSolver solver(S);
    CHECK(solver.tolerance() == 1e-9);
    for (double c : {1e-4, 1e-3}) {
        const auto Hs = quadratic(c);
        const auto r = solver.solve(solver.forward_map(Hs));
        CHECK(r.report.converged);
        CHECK(r.report.iterations <= 10);
        CHECK(sup_gap(r.shape, Hs) <= 1e-7);
        CHECK(r.report.final_residual <= 1e-9);
        const auto& h = r.report.residual_history;
        for (std::size_t i = 1; i < h.size(); ++i) CHECK(h[i] < h[i - 1]);
        CHECK(r.report.damping_used.size() + 1 == h.size());
    }
    // other shapes in X
    for (auto f : std::vector<std::function<double(double)>>{[](double t) { return 5e-4 * t * t * t; },
                                                            [](double t) { return 1e-3 * t * t * std::sin(3 * t); }}) {
        const auto Hs = SurfaceShape::from_function(f, 0.5);
        const auto r = solver.solve(solver.forward_map(Hs));
        CHECK(r.report.converged);
        CHECK(sup_gap(r.shape, Hs) <= 1e-7);
    }
}

TEST_CASE("linear regime matches the linear response") {
    const auto S = desk_stratified();
    const auto L = S.linear_coefficients();
    const PressureTrace phi([](double t) { return t * t - 0.3 * t * t * t; }, 0.5);
    const auto u = solve_linear_response(L, phi, linear_solve_options(S.params())).shape;
    const auto P0 = S.baseline_pressure();

    const double delta = 1e-6;
    const auto r = newton_solve(S, PressureTrace([&](double t) { return P0(t) + delta * phi(t); }, 0.5));
    REQUIRE(r.report.converged);
    CHECK(sup_gap(r.shape, delta * u) <= 1e-9);

    // tangency order in delta
    NewtonOptions o;
    o.tol = 1e-13;
    o.trust = 1e-2;
    const NewtonSolver solver(S, o);
    std::vector<double> ds{4e-3, 2e-3, 1e-3, 5e-4}, es;
    for (double d : ds) {
        const auto s = solver.solve(PressureTrace([&](double t) { return P0(t) + d * phi(t); }, 0.5));
        REQUIRE(s.report.converged);
        es.push_back(sup_gap((1.0 / d) * s.shape, u));
    }
    for (std::size_t i = 1; i < es.size(); ++i)
        CHECK(std::log(es[i - 1] / es[i]) / std::log(ds[i - 1] / ds[i]) >= 0.9);
}

TEST_CASE("continuation") {
    const auto S = desk_stratified();
    const NewtonSolver solver(S);
    const auto Hs = quadratic(1e-3);
    const auto P = solver.forward_map(Hs);
    const auto direct = solver.solve(P);
    const auto one = solver.continuation(P, 1);
    CHECK(sup_gap(one.shape, direct.shape) == 0.0);
    CHECK(one.report.iterations == direct.report.iterations);

    const auto four = continuation_solve(S, P, 4);
    CHECK(four.report.converged);
    CHECK(four.report.steps == 4);
    CHECK(four.report.steps_completed == 4);
    CHECK(sup_gap(four.shape, direct.shape) <= 1e-8);

    const auto json = four.report.to_json();
    CHECK(json.at("converged").get<bool>());
    CHECK(json.at("residual_history").size() == four.report.residual_history.size());
}

TEST_CASE("infeasible pressure is reported, not thrown") {
    const auto S = desk_stratified();
    const auto P0 = S.baseline_pressure();
    const PressureTrace far([&](double t) { return P0(t) + 1.0; }, 0.5);
    const auto r = newton_solve(S, far);
    CHECK_FALSE(r.report.converged);
    CHECK(r.report.message.find("trust") != std::string::npos);
    const auto c = continuation_solve(S, far, 4);
    CHECK_FALSE(c.report.converged);
    CHECK_FALSE(c.report.message.empty());

    NewtonOptions o;
    o.max_iterations = 2;
    o.tol = 1e-30;
    const auto capped = newton_solve(S, forward_map(S, quadratic(1e-3)), o);
    CHECK_FALSE(capped.report.converged);
    CHECK(capped.report.iterations == 2);
}

TEST_CASE("surface crossing the origin is a domain error") {
    const auto S = desk_stratified();
    CHECK_THROWS_AS(newton_solve(S, S.baseline_pressure(), quadratic(-8.0)), DomainError);
}

TEST_CASE("algebraic path without surface tension") {
    Parameters p = desk();
    p.sigma = 0.0;
    SUBCASE("constant density: pointwise division") {
        const SurfaceFunctional S(FlowField(p, make_constant_density(p, 1.0), make_zero_profile(p)));
        const auto L = S.linear_coefficients();
        CHECK(L.d == 0.0);
        const auto P0 = S.baseline_pressure();
        const double delta = 1e-7;
        const PressureTrace phi([](double t) { return t * t; }, 0.5);
        const auto r = newton_solve(S, PressureTrace([&](double t) { return P0(t) + delta * phi(t); }, 0.5));
        CHECK(r.report.converged);
        for (double t : {0.1, 0.3, 0.5}) CHECK(r.shape(t) == doctest::Approx(delta * phi(t) / L.gamma(t)).epsilon(1e-5));
    }
    SUBCASE("stratified round trip") {
        const auto S = desk_stratified(p);
        const auto Hs = quadratic(1e-3);
        const auto r = newton_solve(S, forward_map(S, Hs));
        CHECK(r.report.converged);
        CHECK(sup_gap(r.shape, Hs) <= 1e-7);
    }
}

TEST_CASE("stiffness refusal propagates") {
    Parameters p;
    p.Omega = 7.29e-5;
    p.g = 9.81;
    p.sigma = 0.0728;
    p.P_atm = 101325;
    p.R = 6.37e6;
    p.a = 6.36e6;
    p.eps = 0.016;
    const SurfaceFunctional S(FlowField(p, make_constant_density(p, 1025.0), make_zero_profile(p)));
    CHECK_THROWS_AS(NewtonSolver{S}, StiffnessError);
}
