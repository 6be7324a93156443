#pragma once

#include "eqflow/chebyshev.hpp"
#include "eqflow/flowfield.hpp"

#include <cmath>
#include <functional>
#include <span>
#include <vector>

namespace eqflow {

/// Nondimensional free-surface perturbation H(theta) = h(theta) / R on [0, eps],
/// stored as a Chebyshev series with spectrally differentiated derivatives.
class SurfaceShape {
public:
    explicit SurfaceShape(ChebyshevSeries H);

    static SurfaceShape zero(double eps, int degree = 32);
    static SurfaceShape from_function(const std::function<double(double)>& f, double eps, int degree = 32);
    /// Interpolates values at the degree + 1 ascending Lobatto nodes of [0, eps].
    static SurfaceShape from_lobatto_values(double eps, std::span<const double> values);

    double operator()(double theta) const { return H_(theta); }
    double d1(double theta) const { return dH_(theta); }
    double d2(double theta) const { return ddH_(theta); }
    /// Even extension to the symmetric strip [-eps, eps], for display.
    double mirrored(double theta) const { return H_(std::abs(theta)); }
    /// Dimensional height R H(theta).
    double height(double theta, double R) const { return R * H_(theta); }

    double eps() const { return H_.hi(); }
    int degree() const { return H_.degree(); }
    const ChebyshevSeries& series() const { return H_; }

    /// Removes the affine part H(0) + H'(0) theta, so that H(0) = H'(0) = 0.
    SurfaceShape projected() const;
    /// max(|H(0)|, |H'(0)|)
    double membership_defect() const;
    double sup_abs(int samples = 129) const;

    SurfaceShape& operator+=(const SurfaceShape& o);
    SurfaceShape& operator*=(double s);

private:
    ChebyshevSeries H_, dH_, ddH_;
};

SurfaceShape operator+(SurfaceShape a, const SurfaceShape& b);
SurfaceShape operator-(SurfaceShape a, const SurfaceShape& b);
SurfaceShape operator*(double s, SurfaceShape a);

/// Nondimensional surface pressure P(theta) / P_atm on [0, eps].
class PressureTrace {
public:
    using Fn = std::function<double(double)>;
    PressureTrace(Fn f, double eps) : f_(std::move(f)), eps_(eps) {}

    /// Floater-Hormann rational interpolation (blending degree min(8, n - 1)) of samples.
    static PressureTrace from_samples(std::vector<double> theta, std::vector<double> values);

    double operator()(double theta) const { return f_(theta); }
    double eps() const { return eps_; }
    std::vector<double> sample(std::span<const double> thetas) const;

private:
    Fn f_;
    double eps_;
};

struct SurfaceGeometry {
    double n_r;
    double n_theta;
    double J;  ///< nondimensional divergence of the unit normal, R div(n)
};

/// Outward unit normal and curvature combination of r = R (1 + H(theta)):
///   J = [(1+H)^2 + 2 H'^2 - H'' (1+H)^2] / ((1+H)^2 + H'^2)^{3/2}
SurfaceGeometry surface_geometry(double H, double H_theta, double H_thetatheta);
double curvature_divergence(double H, double H_theta, double H_thetatheta);
double curvature_divergence(const SurfaceShape& shape, double theta);

/// Switches for the terms of the surface functional. Disabling terms is a test hook
/// that isolates one contribution of the linearization.
struct FunctionalTerms {
    bool gravity = true;
    bool rotation = true;
    bool curvature = true;
};

/// Linearized surface operator L H = d H'' + gamma(theta) H.
struct LinearCoefficients {
    std::function<double(double)> gamma;
    double d = 0.0;
    double eps = 0.0;

    /// sqrt(max |gamma| / d) * eps over `samples` Lobatto points; +inf when d = 0.
    double stiffness(int samples = 129) const;
    bool gamma_is_constant(int samples = 33, double rel_tol = 1e-14) const;
};

struct FunctionalComponents {
    double base;        ///< bulk pressure at the undisturbed surface, p(R, theta) / P_atm
    double gravity;     ///< -g int_R^{(1+H)R} rho dxi / P_atm
    double rotation;    ///< int_{R cos}^{(1+H) R cos} [F(y)/y + H(y, theta)] dy / P_atm
    double curvature;   ///< -sigma J / (R P_atm)
    double total() const { return base + gravity + rotation + curvature; }
};

/// The nondimensional Bernoulli functional F(H, P) = G(H) - P with
///   G(H)(theta) = p((1+H) R, theta) / P_atm - sigma J(H) / (R P_atm),
/// where the bulk pressure is split at r = R so that the H-dependent part is an
/// integral of p_r over [R, (1+H) R].
class SurfaceFunctional {
public:
    explicit SurfaceFunctional(FlowField flow, FunctionalTerms terms = {});

    const FlowField& flow() const { return flow_; }
    const FunctionalTerms& terms() const { return terms_; }
    const Parameters& params() const { return flow_.params(); }

    double base(double theta) const;
    std::vector<double> base(std::span<const double> thetas) const;

    FunctionalComponents components(const SurfaceShape& shape, double theta) const;
    double G(const SurfaceShape& shape, double theta) const;
    /// G at each theta, reusing precomputed base values.
    std::vector<double> G(const SurfaceShape& shape, std::span<const double> thetas,
                          std::span<const double> base_values) const;

    /// F(H, P)(theta) = G(H)(theta) - P(theta)
    double residual(const SurfaceShape& shape, const PressureTrace& P, double theta) const;
    std::vector<double> residual(const SurfaceShape& shape, const PressureTrace& P,
                                 std::span<const double> thetas) const;

    /// P0 = G(0), the pressure that keeps the undisturbed surface in equilibrium.
    PressureTrace baseline_pressure() const;
    /// Derivative of G at H = 0 for the enabled terms.
    LinearCoefficients linear_coefficients() const;

private:
    double increment(double H, double theta, double& gravity, double& rotation) const;
    double curvature_term(double H, double Ht, double Htt) const;

    FlowField flow_;
    FunctionalTerms terms_;
};

/// d H'' + gamma H as a trace.
PressureTrace frechet_apply(const LinearCoefficients& coeffs, const SurfaceShape& shape);
double frechet_apply(const LinearCoefficients& coeffs, const SurfaceShape& shape, double theta);

struct FrechetCheck {
    std::vector<double> s;
    std::vector<double> errors;
    std::vector<double> orders;  ///< log10(e(s_k) / e(s_{k+1})) / log10(s_k / s_{k+1})
    double min_order() const;
};

/// e(s) = sup_theta |[F(sH, P0) - F(0, P0)] / s - L H| at `thetas`.
FrechetCheck frechet_fd_check(const SurfaceFunctional& functional, const SurfaceShape& shape,
                              std::span<const double> s_values, std::span<const double> thetas);

/// e(s) = sup_theta |[J(sH) - J(0)] / s - (-H - H'')|.
FrechetCheck curvature_limit_check(const SurfaceShape& shape, std::span<const double> s_values,
                                   std::span<const double> thetas);

}  // namespace eqflow
