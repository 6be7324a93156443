#include "eqflow/flowfield.hpp"

#include "eqflow/characteristics.hpp"
#include "eqflow/errors.hpp"
#include "eqflow/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace eqflow {

StratificationIntegral::StratificationIntegral(const Parameters& p, DensityModel density, FlowOptions opts)
    : params_(p), density_(std::move(density)) {
    if (opts.mode == StratificationMode::table && !density_.theta_independent()) {
        const auto [lo, hi] = profile_domain(p);
        table_ = std::make_shared<const ChebyshevTable2D>(
            lo, hi, opts.table_y, 0.0, p.eps, opts.table_theta,
            [this](double y, double t) { return direct(y, t); });
    }
}

double StratificationIntegral::direct(double y, double theta) const {
    if (density_.theta_independent() || theta == 0.0) return 0.0;
    const double g = params_.g;
    auto integrand = [&](double s) {
        return g * density_.rho_theta(y * std::cosh(s), std::asin(std::tanh(s)));
    };
    return integrate(integrand, 0.0, s0_of_theta(theta), params_.tol_quad);
}

double StratificationIntegral::operator()(double y, double theta) const {
    if (density_.theta_independent() || theta == 0.0) return 0.0;
    if (table_ && table_->contains(y, theta)) return (*table_)(y, theta);
    return direct(y, theta);
}

double StratificationIntegral::theta_derivative(double y, double theta) const {
    if (density_.theta_independent()) return 0.0;
    const double c = std::cos(theta);
    return params_.g * density_.rho_theta(y / c, theta) / c;
}

FlowField::FlowField(const Parameters& p, DensityModel density, AzimuthalProfile profile, FlowOptions opts)
    : params_(validate_parameters(p)), density_(std::move(density)), profile_(std::move(profile)),
      opts_(opts), strat_(params_, density_, opts) {
    if (!params_.A) params_.A = gauge_constant();
}

double FlowField::gauge_constant() const {
    // A such that the undisturbed surface pressure at the equator equals P_atm:
    // P0(0) = (A - g int_a^R rho(xi, 0) dxi + int_a^R F(y)/y dy) / P_atm - sigma / (R P_atm) = 1
    const auto& p = params_;
    const double gravity = p.g * integrate([&](double xi) { return density_.rho(xi, 0.0); }, p.a, p.R, p.tol_quad);
    const double rotation =
        profile_.identically_zero() ? 0.0 : integrate([&](double y) { return profile_(y) / y; }, p.a, p.R, p.tol_quad);
    return p.P_atm + p.sigma / p.R + gravity - rotation;
}

double FlowField::characteristic_integral(double r, double theta) const {
    if (density_.theta_independent() || theta == 0.0) return 0.0;
    const double y = r * std::cos(theta);
    auto integrand = [&](double s) {
        return density_.rho_theta(y * std::cosh(s), std::asin(std::tanh(s)));
    };
    return params_.g * integrate(integrand, 0.0, s0_of_theta(theta), params_.tol_quad);
}

double FlowField::azimuthal_velocity(double r, double theta) const {
    const double y = r * std::cos(theta);
    const double rho = density_.rho(r, theta);
    const double Om = params_.Omega;
    return -Om * y / 2.0 + (profile_(y) / y + characteristic_integral(r, theta)) / (2.0 * rho * Om);
}

double FlowField::U(double r, double theta) const {
    return 2.0 * azimuthal_velocity(r, theta) + r * params_.Omega * std::cos(theta);
}

double FlowField::pressure_constant(double theta) const {
    const auto& p = params_;
    if (theta == 0.0) return *p.A;
    double value = *p.A;
    if (!profile_.identically_zero())
        value -= integrate([&](double xi) { return std::tan(xi) * profile_(p.a * std::cos(xi)); }, 0.0, theta,
                           p.tol_quad);
    if (!strat_.identically_zero())
        value -= p.a * integrate([&](double xi) { return std::sin(xi) * strat_(p.a * std::cos(xi), xi); }, 0.0,
                                 theta, p.tol_quad);
    return value;
}

double FlowField::pressure_constant_derivative(double theta) const {
    const double a = params_.a;
    return -std::tan(theta) * profile_(a * std::cos(theta)) - a * std::sin(theta) * strat_(a * std::cos(theta), theta);
}

void FlowField::check_pressure_domain(double r, double theta) const {
    const auto& p = params_;
    const double sr = 1e-12 * p.R;
    if (r < p.a - sr || r > p.r_max() + sr || std::abs(theta) > p.eps * (1 + 1e-12)) {
        std::ostringstream msg;
        msg.precision(17);
        msg << "pressure evaluated at (r=" << r << ", theta=" << theta << ") outside a <= r <= r_max="
            << p.r_max() << ", |theta| <= eps=" << p.eps;
        throw DomainError(msg.str());
    }
}

PressureParts FlowField::pressure_parts(double r, double theta) const {
    check_pressure_domain(r, theta);
    const auto& p = params_;
    const double c = std::cos(theta);
    PressureParts out{pressure_constant(theta), 0.0, 0.0};
    out.gravity = -p.g * integrate([&](double xi) { return density_.rho(xi, theta); }, p.a, r, p.tol_quad);
    if (!profile_.identically_zero() || !strat_.identically_zero()) {
        out.rotation = integrate([&](double y) { return profile_(y) / y + strat_(y, theta); }, p.a * c, r * c,
                                 p.tol_quad);
    }
    return out;
}

double FlowField::radial_pressure_gradient(double r, double theta) const {
    const double c = std::cos(theta);
    return -params_.g * density_.rho(r, theta) + profile_(r * c) / r + c * strat_(r * c, theta);
}

PressureGradients FlowField::pressure_gradients(double r, double theta) const {
    check_pressure_domain(r, theta);
    const auto& p = params_;
    const double c = std::cos(theta), s = std::sin(theta), t = std::tan(theta);
    const double a = p.a;
    PressureGradients out{};
    out.p_r = radial_pressure_gradient(r, theta);

    const double yr = r * c, ya = a * c;
    const double Hr = strat_(yr, theta), Ha = strat_(ya, theta);
    double p_theta = -t * (profile_(yr) - profile_(ya)) - s * (r * Hr - a * Ha) + pressure_constant_derivative(theta);
    if (!density_.theta_independent()) {
        p_theta -= p.g * integrate([&](double xi) { return density_.rho_theta(xi, theta); }, a, r, p.tol_quad);
        p_theta += integrate([&](double y) { return strat_.theta_derivative(y, theta); }, ya, yr, p.tol_quad);
    }
    out.p_theta = p_theta;
    out.p_theta_coriolis = -t * (profile_(yr) + r * c * characteristic_integral(r, theta));
    return out;
}

FlowState FlowField::sample(const Grid2D& grid) const {
    FlowState st{ScalarField2D(grid, FieldRole::w), ScalarField2D(grid, FieldRole::p),
                 ScalarField2D(grid, FieldRole::U), ScalarField2D(grid, FieldRole::Z)};
    const double Om = params_.Omega;
    for (std::size_t i = 0; i < grid.nr(); ++i) {
        const double r = grid.r_nodes[i];
        for (std::size_t j = 0; j < grid.ntheta(); ++j) {
            const double th = grid.theta_nodes[j];
            const double w = azimuthal_velocity(r, th);
            const double U = 2.0 * w + r * Om * std::cos(th);
            st.w.at(i, j) = w;
            st.p.at(i, j) = pressure(r, th);
            st.U.at(i, j) = U;
            st.Z.at(i, j) = density_.rho(r, th) * r * Om * U * std::cos(th);
        }
    }
    return st;
}

EulerResiduals euler_residuals(const FlowField& flow, const FlowState& state) {
    const Grid2D& grid = state.U.grid;
    if (!(state.w.grid == grid && state.p.grid == grid && state.Z.grid == grid) ||
        state.U.values.size() != grid.nr() * grid.ntheta())
        throw PreconditionError("euler_residuals: state fields are not sampled on a common grid");

    const auto& p = flow.params();
    EulerResiduals out{ScalarField2D(grid, FieldRole::residual), ScalarField2D(grid, FieldRole::residual)};
    for (std::size_t i = 0; i < grid.nr(); ++i) {
        const double r = grid.r_nodes[i];
        for (std::size_t j = 0; j < grid.ntheta(); ++j) {
            const double th = grid.theta_nodes[j];
            const double rho = flow.density().rho(r, th);
            const double U = state.U.at(i, j);
            const PressureGradients grad = flow.pressure_gradients(r, th);
            const double R1 = rho * p.Omega * std::cos(th) * U - grad.p_r - p.g * rho;
            const double R2 = rho * r * p.Omega * std::sin(th) * U + grad.p_theta;
            out.R1.at(i, j) = R1;
            out.R2.at(i, j) = R2;
            out.max_R1_rel = std::max(out.max_R1_rel, std::abs(R1) / (p.g * rho));
            out.max_R2_rel = std::max(out.max_R2_rel, std::abs(R2) / (p.g * rho));
        }
    }
    // u = v = 0 and nothing depends on z, so these vanish term by term.
    const double u = 0.0, v = 0.0, d_dz = 0.0;
    out.R3 = d_dz;
    out.mass_radial = u;       // (1/r) d_r(r rho u)
    out.mass_meridional = v;   // (1/r) d_theta(rho v)
    out.mass_azimuthal = d_dz; // d_z(rho w)
    out.kinematic_surface = u - v;  // u - (w h_z + v h_theta / r) with h_z = 0
    out.kinematic_bed = u - v;      // u - (w d_z + v d_theta / r) with d_z = 0
    return out;
}

double GradientStudy::min_order() const {
    double m = std::numeric_limits<double>::infinity();
    for (double o : orders) m = std::min(m, o);
    return m;
}

GradientStudy pressure_gradient_fd_study(const FlowField& flow,
                                         const std::vector<std::pair<double, double>>& points,
                                         double h_r0, double h_theta0, int levels) {
    GradientStudy out;
    std::vector<PressureGradients> exact;
    exact.reserve(points.size());
    for (const auto& [r, th] : points) {
        exact.push_back(flow.pressure_gradients(r, th));
        out.max_route_gap = std::max(out.max_route_gap, std::abs(exact.back().p_theta - exact.back().p_theta_coriolis));
    }
    const double R = flow.params().R;
    for (int k = 0; k < levels; ++k) {
        const double hr = h_r0 / std::ldexp(1.0, k);
        const double ht = h_theta0 / std::ldexp(1.0, k);
        GradientStudyLevel lvl{hr, ht, 0.0, 0.0, 0.0};
        for (std::size_t n = 0; n < points.size(); ++n) {
            const auto [r, th] = points[n];
            const double dpr = (flow.pressure(r + hr, th) - flow.pressure(r - hr, th)) / (2 * hr);
            const double dpt = (flow.pressure(r, th + ht) - flow.pressure(r, th - ht)) / (2 * ht);
            lvl.err_r = std::max(lvl.err_r, std::abs(dpr - exact[n].p_r));
            lvl.err_theta = std::max(lvl.err_theta, std::abs(dpt - exact[n].p_theta));
        }
        lvl.err_combined = std::max(R * lvl.err_r, lvl.err_theta);
        out.levels.push_back(lvl);
    }
    for (std::size_t k = 1; k < out.levels.size(); ++k)
        out.orders.push_back(std::log2(out.levels[k - 1].err_combined / out.levels[k].err_combined));
    return out;
}

StratificationIdentity stratification_derivative_identity(const FlowField& flow, double r, double theta) {
    const auto& p = flow.params();
    const auto& strat = flow.stratification();
    const double c = std::cos(theta);
    StratificationIdentity out{};
    out.rhs = p.g * integrate([&](double xi) { return flow.density().rho_theta(xi, theta); }, p.a, r, p.tol_quad);
    out.lhs_closed = integrate([&](double y) { return strat.theta_derivative(y, theta); }, p.a * c, r * c, p.tol_quad);

    const double h = std::min(1e-3, 0.25 * (p.eps - std::abs(theta)));
    auto dH = [&](double y) {
        return (-strat.direct(y, theta + 2 * h) + 8 * strat.direct(y, theta + h) - 8 * strat.direct(y, theta - h) +
                strat.direct(y, theta - 2 * h)) /
               (12 * h);
    };
    out.lhs_fd = integrate(dH, p.a * c, r * c, p.tol_quad);

    const double gap = std::max(std::abs(out.lhs_closed - out.rhs), std::abs(out.lhs_fd - out.rhs));
    const double scale = std::abs(out.rhs);
    out.rel_gap = scale > 0 ? gap / scale : gap;
    return out;
}

}  // namespace eqflow
