#pragma once

#include "eqflow/chebyshev.hpp"
#include "eqflow/core.hpp"

#include <memory>
#include <optional>
#include <vector>

namespace eqflow {

enum class StratificationMode { table, direct };

struct FlowOptions {
    StratificationMode mode = StratificationMode::table;
    int table_y = 64;
    int table_theta = 33;
};

/// The latitude-stratification integral along characteristics,
///   H(y, theta) = int_0^{s0(theta)} g rho_theta(y cosh s, arcsin(tanh s)) ds.
/// In table mode it is interpolated from a tensor Chebyshev table over
/// [a cos(eps), r_max] x [0, eps]; outside the table (theta < 0) it is integrated directly.
class StratificationIntegral {
public:
    StratificationIntegral(const Parameters& p, DensityModel density, FlowOptions opts = {});

    double operator()(double y, double theta) const;
    double direct(double y, double theta) const;
    /// dH/dtheta = g rho_theta(y / cos(theta), theta) / cos(theta)
    double theta_derivative(double y, double theta) const;

    bool tabulated() const { return table_ != nullptr; }
    bool identically_zero() const { return density_.theta_independent(); }

private:
    Parameters params_;
    DensityModel density_;
    std::shared_ptr<const ChebyshevTable2D> table_;
};

struct PressureParts {
    double constant;  ///< C~(theta)
    double gravity;   ///< -g int_a^r rho(xi, theta) dxi
    double rotation;  ///< int_{a cos}^{r cos} [F(y)/y + H(y, theta)] dy
    double total() const { return constant + gravity + rotation; }
};

struct PressureGradients {
    double p_r;               ///< from the radial momentum balance with H(r cos(theta), theta)
    double p_theta;           ///< from differentiating the integrated pressure in theta
    double p_theta_coriolis;  ///< from the meridional Coriolis balance
};

/// Exact azimuthal flow for a given stratification and equatorial profile F: velocity,
/// pressure and its gradients. Immutable after construction.
class FlowField {
public:
    FlowField(const Parameters& p, DensityModel density, AzimuthalProfile profile, FlowOptions opts = {});

    /// Parameters with the pressure constant A resolved.
    const Parameters& params() const { return params_; }
    double A() const { return *params_.A; }
    const DensityModel& density() const { return density_; }
    const AzimuthalProfile& profile() const { return profile_; }
    const StratificationIntegral& stratification() const { return strat_; }
    const FlowOptions& options() const { return opts_; }

    double stratification_integral(double y, double theta) const { return strat_(y, theta); }
    /// g int_0^{s0(theta)} rho_theta(r~(s), theta~(s)) ds along the characteristic through (r, theta).
    double characteristic_integral(double r, double theta) const;

    double azimuthal_velocity(double r, double theta) const;
    /// U = 2 w + r Omega cos(theta)
    double U(double r, double theta) const;

    /// C~(theta), the theta-dependent constant of the radial pressure integration.
    double pressure_constant(double theta) const;
    double pressure_constant_derivative(double theta) const;

    double pressure(double r, double theta) const { return pressure_parts(r, theta).total(); }
    PressureParts pressure_parts(double r, double theta) const;
    PressureGradients pressure_gradients(double r, double theta) const;
    double radial_pressure_gradient(double r, double theta) const;

    FlowState sample(const Grid2D& grid) const;

    double quad_tol() const { return params_.tol_quad; }

private:
    void check_pressure_domain(double r, double theta) const;
    double gauge_constant() const;

    Parameters params_;
    DensityModel density_;
    AzimuthalProfile profile_;
    FlowOptions opts_;
    StratificationIntegral strat_;
};

struct EulerResiduals {
    ScalarField2D R1;  ///< rho Omega cos(theta) U - p_r - g rho
    ScalarField2D R2;  ///< rho r Omega sin(theta) U + p_theta
    double max_R1_rel = 0.0;  ///< max |R1| / (g rho)
    double max_R2_rel = 0.0;  ///< max |R2| / (g rho)
    // Components that vanish identically for u = v = 0 and z-independent w, p:
    double R3 = 0.0;  ///< p_z
    double mass_radial = 0.0, mass_meridional = 0.0, mass_azimuthal = 0.0;
    double kinematic_surface = 0.0, kinematic_bed = 0.0;
};

/// Residuals of the reduced Euler equations, with analytic pressure gradients, on the
/// state's grid. Throws PreconditionError when the state's fields do not share a grid.
EulerResiduals euler_residuals(const FlowField& flow, const FlowState& state);

struct GradientStudyLevel {
    double h_r, h_theta;
    double err_r;         ///< sup |centered p_r - analytic p_r|
    double err_theta;     ///< sup |centered p_theta - analytic p_theta|
    double err_combined;  ///< max(R err_r, err_theta), in pressure units
};

struct GradientStudy {
    std::vector<GradientStudyLevel> levels;
    std::vector<double> orders;  ///< log2 ratios of successive combined errors
    double max_route_gap = 0.0;  ///< sup |p_theta - p_theta_coriolis|
    double min_order() const;
};

/// Centered differences of the pressure against the analytic gradients at `points`
/// (r, theta) with steps h0 / 2^k, k = 0..levels-1.
GradientStudy pressure_gradient_fd_study(const FlowField& flow,
                                         const std::vector<std::pair<double, double>>& points,
                                         double h_r0, double h_theta0, int levels);

struct StratificationIdentity {
    double lhs_closed;  ///< int H_theta dy with the closed-form H_theta
    double lhs_fd;      ///< int H_theta dy with H_theta by fourth-order differences of H
    double rhs;         ///< g int_a^r rho_theta(xi, theta) dxi
    double rel_gap;
};

/// int_{a cos}^{r cos} H_theta(y, theta) dy = g int_a^r rho_theta(xi, theta) dxi.
StratificationIdentity stratification_derivative_identity(const FlowField& flow, double r, double theta);

}  // namespace eqflow
