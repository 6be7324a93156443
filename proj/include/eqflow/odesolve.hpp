#pragma once

#include "eqflow/rk45.hpp"
#include "eqflow/surface.hpp"

#include <vector>

namespace eqflow {

/// Largest sqrt(max|gamma| / d) * eps accepted before the homogeneous solutions are
/// considered to overflow.
inline constexpr double kStiffnessLimit = 300.0;

/// Homogeneous solutions of u'' + (gamma/d) u = 0 with (Phi1, Phi1') = (1, 0) and
/// (Phi2, Phi2') = (0, 1) at theta = 0.
class LinearBasis {
public:
    LinearBasis(LinearCoefficients coeffs, DenseSolution<2> phi1, DenseSolution<2> phi2);

    double Phi1(double t) const { return phi1_(t)[0]; }
    double Phi2(double t) const { return phi2_(t)[0]; }
    double dPhi1(double t) const { return phi1_(t)[1]; }
    double dPhi2(double t) const { return phi2_(t)[1]; }
    double W(double t) const;
    double W1(double t) const { return -Phi2(t); }
    double W2(double t) const { return Phi1(t); }

    /// max |W(theta) - W(0)| / |W(0)| over `samples` Lobatto points of [0, eps].
    double wronskian_drift(int samples = 129) const;

    const LinearCoefficients& coefficients() const { return coeffs_; }
    double eps() const { return coeffs_.eps; }
    std::size_t steps() const { return phi1_.steps() + phi2_.steps(); }

private:
    LinearCoefficients coeffs_;
    DenseSolution<2> phi1_, phi2_;
};

/// Throws PreconditionError when d = 0 and StiffnessError above kStiffnessLimit.
LinearBasis fundamental_solutions(const LinearCoefficients& coeffs, const OdeOptions& opts = {});

struct LinearSolveOptions {
    OdeOptions ode{};
    double tol_quad = 1e-10;
    int degree = 32;         ///< degree of the returned shape
    int check_points = 129;  ///< Lobatto points where the two routes are compared
};

/// u_p(theta) = int_0^theta g(s) (Phi1(theta) W1(s) + Phi2(theta) W2(s)) / W(s) ds, g = phi/d,
/// at the given ascending thetas (starting at or after 0).
std::vector<double> particular_values(const LinearBasis& basis, const PressureTrace& phi,
                                      std::span<const double> thetas, double tol_quad);

/// u_p as a shape of the given degree, projected into X.
SurfaceShape particular_solution(const LinearBasis& basis, const PressureTrace& phi, double tol_quad,
                                 int degree = 32);

/// Direct integration of Y' = [[0, 1], [-gamma/d, 0]] Y + [0, phi/d], Y(0) = 0.
DenseSolution<2> integrate_response_ivp(const LinearCoefficients& coeffs, const PressureTrace& phi,
                                        const OdeOptions& opts = {});

struct LinearResponse {
    SurfaceShape shape;
    std::vector<double> theta;     ///< check points
    std::vector<double> u_vp;      ///< variation of parameters at the check points
    std::vector<double> u_ivp;     ///< direct integration at the check points
    double route_gap = 0.0;        ///< sup |u_vp - u_ivp|
    double route_tolerance = 0.0;  ///< max(10 tol_ode, 10 tol_quad)
    double wronskian_drift = 0.0;
};

/// Solves d u'' + gamma u = phi on [0, eps], u(0) = u'(0) = 0, reusing one basis.
/// Throws ConsistencyError when the routes disagree beyond route_tolerance.
class LinearResponseSolver {
public:
    explicit LinearResponseSolver(const LinearCoefficients& coeffs, LinearSolveOptions opts = {});

    LinearResponse solve(const PressureTrace& phi) const;

    const LinearBasis& basis() const { return basis_; }
    const LinearSolveOptions& options() const { return opts_; }

private:
    LinearSolveOptions opts_;
    LinearBasis basis_;
    std::vector<double> nodes_;     // union of shape nodes and check nodes, ascending
    std::vector<int> shape_index_;  // positions of the shape nodes in nodes_
    std::vector<int> check_index_;
};

LinearResponse solve_linear_response(const LinearCoefficients& coeffs, const PressureTrace& phi,
                                     const LinearSolveOptions& opts = {});

struct ExponentialCheck {
    std::vector<double> theta;
    std::vector<double> u_exp;     ///< first component of int_0^theta e^{A(theta - s)} B(s) ds
    std::vector<double> u_solver;  ///< shape from solve_linear_response
    double max_deviation = 0.0;
};

/// Matrix-exponential representation of the response for constant gamma. Throws
/// PreconditionError otherwise, since A(t) then fails to commute with its integral.
ExponentialCheck constant_coefficient_exponential_check(const LinearCoefficients& coeffs, const PressureTrace& phi,
                                                        const LinearSolveOptions& opts = {});

}  // namespace eqflow
