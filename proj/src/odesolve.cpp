#include "eqflow/odesolve.hpp"

#include "eqflow/errors.hpp"
#include "eqflow/quadrature.hpp"

#include <Eigen/Core>
#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace eqflow {

LinearBasis::LinearBasis(LinearCoefficients coeffs, DenseSolution<2> phi1, DenseSolution<2> phi2)
    : coeffs_(std::move(coeffs)), phi1_(std::move(phi1)), phi2_(std::move(phi2)) {}

double LinearBasis::W(double t) const {
    const auto a = phi1_(t), b = phi2_(t);
    return a[0] * b[1] - b[0] * a[1];
}

double LinearBasis::wronskian_drift(int samples) const {
    const double w0 = W(0.0);
    double m = 0.0;
    for (double t : lobatto_nodes(samples, 0.0, eps())) m = std::max(m, std::abs(W(t) - w0));
    return m / std::abs(w0);
}

LinearBasis fundamental_solutions(const LinearCoefficients& coeffs, const OdeOptions& opts) {
    if (coeffs.d == 0.0)
        throw PreconditionError(
            "linear operator is degenerate (d = 0, no surface tension); the response is algebraic, gamma u = phi");
    const double kappa = coeffs.stiffness();
    if (!(kappa <= kStiffnessLimit)) {
        std::ostringstream msg;
        msg.precision(6);
        msg << "stiffness guard: sqrt(|gamma|/d)*eps = " << kappa << " exceeds " << kStiffnessLimit
            << "; the homogeneous solutions grow like exp(" << kappa
            << ") and overflow double precision. Use a desk-scale preset (e.g. --preset desk).";
        throw StiffnessError(msg.str(), kappa);
    }
    const double d = coeffs.d;
    const auto& gamma = coeffs.gamma;
    const OdeRhs<2> rhs = [&](double t, const OdeState<2>& y) { return OdeState<2>{y[1], -gamma(t) / d * y[0]}; };
    auto phi1 = integrate_dopri5<2>(rhs, 0.0, coeffs.eps, {1.0, 0.0}, opts);
    auto phi2 = integrate_dopri5<2>(rhs, 0.0, coeffs.eps, {0.0, 1.0}, opts);
    return LinearBasis(coeffs, std::move(phi1), std::move(phi2));
}

std::vector<double> particular_values(const LinearBasis& basis, const PressureTrace& phi,
                                      std::span<const double> thetas, double tol_quad) {
    const double d = basis.coefficients().d;
    std::vector<double> out(thetas.size(), 0.0);
    double I1 = 0.0, I2 = 0.0;  // int g Phi1 / W, int g Phi2 / W
    double prev = 0.0;
    const QuadratureOptions q{tol_quad * 1e-2, tol_quad};
    for (std::size_t i = 0; i < thetas.size(); ++i) {
        const double t = thetas[i];
        if (t > prev) {
            I1 += integrate(
                [&](double s) {
                    const double w = basis.W(s);
                    if (!(std::abs(w) >= 1e-300)) throw ConsistencyError("Wronskian vanished; basis is ill-conditioned", w);
                    return phi(s) / d * basis.W2(s) / w;
                },
                prev, t, q);
            I2 += integrate([&](double s) { return phi(s) / d * basis.W1(s) / basis.W(s); }, prev, t, q);
            prev = t;
        }
        out[i] = basis.Phi2(t) * I1 + basis.Phi1(t) * I2;
    }
    return out;
}

SurfaceShape particular_solution(const LinearBasis& basis, const PressureTrace& phi, double tol_quad, int degree) {
    const auto nodes = lobatto_nodes(degree + 1, 0.0, basis.eps());
    const auto v = particular_values(basis, phi, nodes, tol_quad);
    return SurfaceShape::from_lobatto_values(basis.eps(), v).projected();
}

DenseSolution<2> integrate_response_ivp(const LinearCoefficients& coeffs, const PressureTrace& phi,
                                        const OdeOptions& opts) {
    if (coeffs.d == 0.0) throw PreconditionError("linear operator is degenerate (d = 0)");
    const double d = coeffs.d;
    const OdeRhs<2> rhs = [&](double t, const OdeState<2>& y) {
        return OdeState<2>{y[1], (phi(t) - coeffs.gamma(t) * y[0]) / d};
    };
    return integrate_dopri5<2>(rhs, 0.0, coeffs.eps, {0.0, 0.0}, opts);
}

LinearResponseSolver::LinearResponseSolver(const LinearCoefficients& coeffs, LinearSolveOptions opts)
    : opts_(opts), basis_(fundamental_solutions(coeffs, opts.ode)) {
    const auto shape_nodes = lobatto_nodes(opts_.degree + 1, 0.0, coeffs.eps);
    const auto check_nodes = lobatto_nodes(opts_.check_points, 0.0, coeffs.eps);
    std::vector<double> all(shape_nodes);
    all.insert(all.end(), check_nodes.begin(), check_nodes.end());
    std::sort(all.begin(), all.end());
    const double merge = 1e-14 * coeffs.eps;
    for (double t : all)
        if (nodes_.empty() || t - nodes_.back() > merge) nodes_.push_back(t);
    auto locate = [&](double t) {
        const auto it = std::lower_bound(nodes_.begin(), nodes_.end(), t - merge);
        return static_cast<int>(it - nodes_.begin());
    };
    for (double t : shape_nodes) shape_index_.push_back(locate(t));
    for (double t : check_nodes) check_index_.push_back(locate(t));
}

LinearResponse LinearResponseSolver::solve(const PressureTrace& phi) const {
    const double eps = basis_.eps();
    const auto vals = particular_values(basis_, phi, nodes_, opts_.tol_quad);

    LinearResponse out{SurfaceShape::zero(eps, opts_.degree), {}, {}, {}, 0.0, 0.0, 0.0};
    std::vector<double> sv;
    sv.reserve(shape_index_.size());
    for (int i : shape_index_) sv.push_back(vals[static_cast<std::size_t>(i)]);
    out.shape = SurfaceShape::from_lobatto_values(eps, sv).projected();

    const auto ivp = integrate_response_ivp(basis_.coefficients(), phi, opts_.ode);
    for (int i : check_index_) {
        const double t = nodes_[static_cast<std::size_t>(i)];
        out.theta.push_back(t);
        out.u_vp.push_back(vals[static_cast<std::size_t>(i)]);
        out.u_ivp.push_back(ivp(t)[0]);
        out.route_gap = std::max(out.route_gap, std::abs(out.u_vp.back() - out.u_ivp.back()));
    }
    out.route_tolerance = std::max(10.0 * opts_.ode.rel_tol, 10.0 * opts_.tol_quad);
    out.wronskian_drift = basis_.wronskian_drift(opts_.check_points);
    if (!(out.route_gap <= out.route_tolerance)) {
        std::ostringstream msg;
        msg << "linear response routes disagree: sup |u_vp - u_ivp| = " << out.route_gap << " > "
            << out.route_tolerance;
        throw ConsistencyError(msg.str(), out.route_gap);
    }
    return out;
}

LinearResponse solve_linear_response(const LinearCoefficients& coeffs, const PressureTrace& phi,
                                     const LinearSolveOptions& opts) {
    return LinearResponseSolver(coeffs, opts).solve(phi);
}

ExponentialCheck constant_coefficient_exponential_check(const LinearCoefficients& coeffs, const PressureTrace& phi,
                                                        const LinearSolveOptions& opts) {
    if (!coeffs.gamma_is_constant())
        throw PreconditionError(
            "matrix-exponential representation needs constant gamma: for variable gamma the system matrix A(t) "
            "does not commute with its integral, so exp(int A) is not a fundamental matrix");
    if (coeffs.d == 0.0) throw PreconditionError("linear operator is degenerate (d = 0)");
    const double d = coeffs.d;
    Eigen::Matrix2d A;
    A << 0.0, 1.0, -coeffs.gamma(0.0) / d, 0.0;

    const LinearResponse sol = solve_linear_response(coeffs, phi, opts);
    ExponentialCheck out;
    const QuadratureOptions q{opts.tol_quad * 1e-2, opts.tol_quad};
    for (double t : lobatto_nodes(opts.check_points, 0.0, coeffs.eps)) {
        const double u = integrate(
            [&](double s) {
                const Eigen::Matrix2d E = (A * (t - s)).exp();
                return E(0, 1) * phi(s) / d;
            },
            0.0, t, q);
        out.theta.push_back(t);
        out.u_exp.push_back(u);
        out.u_solver.push_back(sol.shape(t));
        out.max_deviation = std::max(out.max_deviation, std::abs(u - sol.shape(t)));
    }
    return out;
}

}  // namespace eqflow
