#pragma once

#include "eqflow/odesolve.hpp"
#include "eqflow/surface.hpp"

#include <json.hpp>

#include <optional>
#include <string>
#include <vector>

namespace eqflow {

struct NewtonOptions {
    int max_iterations = 50;
    int max_halvings = 8;
    std::optional<double> tol;  ///< sup-norm residual target; unset uses Parameters::tol_newton
    double trust = 1e-3;        ///< largest accepted sup |P - P0|
    int degree = 32;            ///< Chebyshev degree of the iterates
    int samples = 129;          ///< Lobatto points where the residual is measured
};

struct SolveReport {
    int iterations = 0;
    std::vector<double> residual_history;
    bool converged = false;
    double final_residual = 0.0;
    std::vector<double> damping_used;
    std::string message;
    // continuation only
    int steps = 1;
    int steps_completed = 0;

    nlohmann::json to_json() const;
};

struct SolveResult {
    SurfaceShape shape;
    SolveReport report;
};

/// Quasi-Newton solver for F(H, P) = 0 with the derivative frozen at (0, P0).
class NewtonSolver {
public:
    explicit NewtonSolver(SurfaceFunctional functional, NewtonOptions opts = {});

    const SurfaceFunctional& functional() const { return functional_; }
    const NewtonOptions& options() const { return opts_; }
    const std::vector<double>& sample_points() const { return thetas_; }
    const PressureTrace& baseline() const { return P0_; }
    double tolerance() const;

    /// P = G(H), the pressure for which H is an exact solution.
    PressureTrace forward_map(const SurfaceShape& shape) const;

    SolveResult solve(const PressureTrace& P) const;
    SolveResult solve(const PressureTrace& P, const SurfaceShape& initial) const;

    /// Solves along P0 + (k/steps)(P_target - P0), k = 1..steps, with warm starts. The trust
    /// threshold applies to each step's increment. On failure the last good shape is returned.
    SolveResult continuation(const PressureTrace& P_target, int steps) const;

private:
    SolveResult solve_impl(const PressureTrace& P, const SurfaceShape& initial,
                           const std::vector<double>& reference, const char* reference_name) const;
    SurfaceShape linear_inverse(const std::vector<double>& r) const;
    std::vector<double> residual(const SurfaceShape& H, const std::vector<double>& P) const;

    SurfaceFunctional functional_;
    NewtonOptions opts_;
    LinearCoefficients coeffs_;
    std::optional<LinearResponseSolver> linear_;
    std::vector<double> thetas_;
    std::vector<double> base_;
    PressureTrace P0_;
    std::vector<double> P0_values_;
};

PressureTrace forward_map(const SurfaceFunctional& functional, const SurfaceShape& shape);
SolveResult newton_solve(const SurfaceFunctional& functional, const PressureTrace& P,
                         const NewtonOptions& opts = {});
SolveResult newton_solve(const SurfaceFunctional& functional, const PressureTrace& P, const SurfaceShape& initial,
                         const NewtonOptions& opts = {});
SolveResult continuation_solve(const SurfaceFunctional& functional, const PressureTrace& P_target, int steps,
                               const NewtonOptions& opts = {});

LinearSolveOptions linear_solve_options(const Parameters& p, int degree = 32);

}  // namespace eqflow
