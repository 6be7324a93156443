#pragma once

#include <functional>

namespace eqflow {

struct QuadratureOptions {
    double abs_tol = 1e-10;
    double rel_tol = 1e-10;
    int max_intervals = 500;
};

struct QuadratureResult {
    double value = 0.0;
    double error = 0.0;
    int evaluations = 0;
    int intervals = 0;
    bool converged = true;
};

/// Globally adaptive 21-point Gauss-Kronrod quadrature (QUADPACK QAG strategy).
/// Never throws; check `converged`.
QuadratureResult integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                                    const QuadratureOptions& opts = {});

/// Same as integrate_adaptive, but throws QuadratureError with the achieved error
/// estimate when the tolerance is not met.
double integrate(const std::function<double(double)>& f, double a, double b,
                 const QuadratureOptions& opts = {});

/// Convenience: one tolerance used for both the absolute and relative bound.
inline double integrate(const std::function<double(double)>& f, double a, double b, double tol) {
    return integrate(f, a, b, QuadratureOptions{tol, tol});
}

}  // namespace eqflow
