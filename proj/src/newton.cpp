#include "eqflow/newton.hpp"

#include "eqflow/errors.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace eqflow {

nlohmann::json SolveReport::to_json() const {
    return nlohmann::json{{"iterations", iterations},
                          {"residual_history", residual_history},
                          {"converged", converged},
                          {"final_residual", final_residual},
                          {"damping_used", damping_used},
                          {"message", message},
                          {"steps", steps},
                          {"steps_completed", steps_completed}};
}

LinearSolveOptions linear_solve_options(const Parameters& p, int degree) {
    LinearSolveOptions o;
    o.ode.rel_tol = p.tol_ode;
    o.ode.abs_tol = p.tol_ode;
    o.tol_quad = p.tol_quad;
    o.degree = degree;
    return o;
}

namespace {
double sup_abs(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

double sup_diff(const std::vector<double>& a, const std::vector<double>& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}
}  // namespace

NewtonSolver::NewtonSolver(SurfaceFunctional functional, NewtonOptions opts)
    : functional_(std::move(functional)),
      opts_(opts),
      coeffs_(functional_.linear_coefficients()),
      thetas_(lobatto_nodes(opts.samples, 0.0, functional_.params().eps)),
      base_(functional_.base(thetas_)),
      P0_(functional_.baseline_pressure()) {
    if (opts_.max_iterations < 1 || opts_.max_halvings < 0 || opts_.degree < 2 || opts_.samples < 3 ||
        !(opts_.trust > 0))
        throw ParameterError("newton options: need max_iterations >= 1, max_halvings >= 0, degree >= 2, "
                             "samples >= 3 and trust > 0");
    if (coeffs_.d > 0.0) {
        LinearSolveOptions lo = linear_solve_options(functional_.params(), opts_.degree);
        lo.check_points = opts_.samples;
        linear_.emplace(coeffs_, lo);
    } else {
        for (double t : lobatto_nodes(opts_.degree + 1, 0.0, coeffs_.eps))
            if (!(std::abs(coeffs_.gamma(t)) > 1e-12)) {
                std::ostringstream msg;
                msg << "sigma = 0 update needs gamma bounded away from zero; gamma(" << t << ") = " << coeffs_.gamma(t);
                throw PreconditionError(msg.str());
            }
    }
    P0_values_ = P0_.sample(thetas_);
}

double NewtonSolver::tolerance() const { return opts_.tol.value_or(functional_.params().tol_newton); }

PressureTrace NewtonSolver::forward_map(const SurfaceShape& shape) const { return eqflow::forward_map(functional_, shape); }

std::vector<double> NewtonSolver::residual(const SurfaceShape& H, const std::vector<double>& P) const {
    std::vector<double> r = functional_.G(H, thetas_, base_);
    for (std::size_t i = 0; i < r.size(); ++i) r[i] -= P[i];
    return r;
}

SurfaceShape NewtonSolver::linear_inverse(const std::vector<double>& r) const {
    const double eps = coeffs_.eps;
    const ChebyshevSeries series = ChebyshevSeries::from_lobatto_values(0.0, eps, r);
    const PressureTrace phi([series](double t) { return series(t); }, eps);
    if (linear_) return linear_->solve(phi).shape;
    const auto nodes = lobatto_nodes(opts_.degree + 1, 0.0, eps);
    std::vector<double> v(nodes.size());
    for (std::size_t i = 0; i < nodes.size(); ++i) v[i] = phi(nodes[i]) / coeffs_.gamma(nodes[i]);
    return SurfaceShape::from_lobatto_values(eps, v).projected();
}

SolveResult NewtonSolver::solve(const PressureTrace& P) const {
    return solve(P, SurfaceShape::zero(coeffs_.eps, opts_.degree));
}

SolveResult NewtonSolver::solve(const PressureTrace& P, const SurfaceShape& initial) const {
    return solve_impl(P, initial, P0_values_, "P0");
}

SolveResult NewtonSolver::solve_impl(const PressureTrace& P, const SurfaceShape& initial,
                                     const std::vector<double>& reference, const char* reference_name) const {
    SolveResult out{initial.projected(), {}};
    SolveReport& rep = out.report;
    const std::vector<double> Pv = P.sample(thetas_);
    for (double v : Pv)
        if (!std::isfinite(v)) throw ParameterError("pressure trace is not finite on [0, eps]");

    const double dist = sup_diff(Pv, reference);
    if (dist > opts_.trust) {
        std::ostringstream msg;
        msg << "sup |P - " << reference_name << "| = " << dist << " exceeds the trust threshold " << opts_.trust;
        rep.message = msg.str();
        rep.final_residual = sup_abs(residual(out.shape, Pv));
        rep.residual_history.push_back(rep.final_residual);
        rep.iterations = 1;
        return out;
    }

    const double tol = tolerance();
    std::vector<double> r = residual(out.shape, Pv);
    double res = sup_abs(r);
    rep.residual_history.push_back(res);
    rep.iterations = 1;
    while (true) {
        if (res <= tol) {
            rep.converged = true;
            break;
        }
        if (rep.iterations >= opts_.max_iterations) {
            std::ostringstream msg;
            msg << "no convergence after " << opts_.max_iterations << " iterations; residual " << res;
            rep.message = msg.str();
            break;
        }
        const SurfaceShape delta = linear_inverse(r);
        double step = 1.0;
        bool accepted = false;
        std::string last_failure;
        for (int k = 0; k <= opts_.max_halvings; ++k, step *= 0.5) {
            SurfaceShape trial = (out.shape - step * delta).projected();
            try {
                std::vector<double> rt = residual(trial, Pv);
                const double rest = sup_abs(rt);
                if (rest < res) {
                    out.shape = std::move(trial);
                    r = std::move(rt);
                    res = rest;
                    accepted = true;
                    break;
                }
            } catch (const DomainError& e) {
                last_failure = e.what();
            }
        }
        ++rep.iterations;
        if (!accepted) {
            std::ostringstream msg;
            msg << "residual did not decrease after " << opts_.max_halvings << " step halvings; residual " << res;
            if (!last_failure.empty()) msg << " (" << last_failure << ")";
            rep.message = msg.str();
            break;
        }
        rep.damping_used.push_back(step);
        rep.residual_history.push_back(res);
    }
    rep.final_residual = res;
    if (rep.converged) rep.message = "converged";
    rep.steps_completed = rep.converged ? 1 : 0;
    return out;
}

SolveResult NewtonSolver::continuation(const PressureTrace& P_target, int steps) const {
    if (steps < 1) throw ParameterError("continuation needs steps >= 1");
    const std::vector<double> target = P_target.sample(thetas_);
    SolveResult out{SurfaceShape::zero(coeffs_.eps, opts_.degree), {}};
    out.report.steps = steps;
    std::vector<double> prev = P0_values_;
    for (int k = 1; k <= steps; ++k) {
        const double f = static_cast<double>(k) / steps;
        std::vector<double> Pk(thetas_.size());
        for (std::size_t i = 0; i < Pk.size(); ++i) Pk[i] = P0_values_[i] + f * (target[i] - P0_values_[i]);
        const ChebyshevSeries series = ChebyshevSeries::from_lobatto_values(0.0, coeffs_.eps, Pk);
        // the final step uses the target itself so that steps = 1 is a plain solve
        const PressureTrace step_trace =
            k == steps ? P_target : PressureTrace([series](double t) { return series(t); }, coeffs_.eps);
        SolveResult r = solve_impl(step_trace, out.shape, k == 1 ? P0_values_ : prev, k == 1 ? "P0" : "P_{k-1}");
        auto& rep = out.report;
        rep.iterations += r.report.iterations;
        rep.residual_history.insert(rep.residual_history.end(), r.report.residual_history.begin(),
                                    r.report.residual_history.end());
        rep.damping_used.insert(rep.damping_used.end(), r.report.damping_used.begin(), r.report.damping_used.end());
        rep.final_residual = r.report.final_residual;
        if (!r.report.converged) {
            std::ostringstream msg;
            msg << "continuation failed at step " << k << " of " << steps << ": " << r.report.message;
            rep.message = msg.str();
            rep.converged = false;
            return out;
        }
        out.shape = std::move(r.shape);
        rep.steps_completed = k;
        prev = std::move(Pk);
    }
    out.report.converged = true;
    out.report.message = "converged";
    return out;
}

PressureTrace forward_map(const SurfaceFunctional& functional, const SurfaceShape& shape) {
    return PressureTrace([functional, shape](double t) { return functional.G(shape, t); }, functional.params().eps);
}

SolveResult newton_solve(const SurfaceFunctional& functional, const PressureTrace& P, const NewtonOptions& opts) {
    return NewtonSolver(functional, opts).solve(P);
}

SolveResult newton_solve(const SurfaceFunctional& functional, const PressureTrace& P, const SurfaceShape& initial,
                         const NewtonOptions& opts) {
    return NewtonSolver(functional, opts).solve(P, initial);
}

SolveResult continuation_solve(const SurfaceFunctional& functional, const PressureTrace& P_target, int steps,
                               const NewtonOptions& opts) {
    return NewtonSolver(functional, opts).continuation(P_target, steps);
}

}  // namespace eqflow
