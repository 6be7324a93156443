#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace eqflow {

/// Physical constants of the rotating-fluid model and numerical tolerances. SI units.
struct Parameters {
    double Omega = 0.1;     ///< rotation rate [rad/s]
    double g = 1.0;         ///< gravitational acceleration [m/s^2]
    double sigma = 0.1;     ///< surface-tension coefficient [N/m]
    double P_atm = 1.0;     ///< reference (atmospheric) pressure [Pa]
    double R = 1.0;         ///< undisturbed surface radius [m]
    double a = 0.5;         ///< lower radius of the pressure integration [m]
    double eps = 0.5;       ///< half-width of the equatorial strip [rad]
    std::optional<double> A;  ///< pressure constant [Pa]; unset selects the gauge P0(0) = 1
    double tol_quad = 1e-10;
    double tol_ode = 1e-10;
    double tol_newton = 1e-9;

    /// Largest radius at which fields and the free surface may be evaluated.
    double r_max() const { return 1.1 * R; }
};

/// Returns `p` unchanged, or throws ParameterError naming the first violated invariant.
Parameters validate_parameters(const Parameters& p);

/// Rectangle (r, theta) on which a density model must be evaluable.
struct DensityDomain {
    double r_lo, r_hi, theta_max;
    bool contains(double r, double theta) const;
};

/// The region reached by characteristics launched from the profile interval
/// [a cos(eps), r_max]: r in [a cos(eps), r_max / cos(eps)], |theta| <= eps.
DensityDomain density_domain(const Parameters& p);

struct DensitySample {
    double rho;
    double rho_theta;
};

/// Density rho(r, theta) with its latitude derivative. Immutable; cheap to copy.
class DensityModel {
public:
    using Fn = std::function<double(double, double)>;

    DensityModel(std::string name, DensityDomain domain, Fn rho, std::optional<Fn> rho_theta,
                 bool theta_independent);

    const std::string& name() const { return impl_->name; }
    const DensityDomain& domain() const { return impl_->domain; }
    bool theta_independent() const { return impl_->theta_independent; }
    bool has_analytic_derivative() const { return impl_->rho_theta.has_value(); }

    double rho(double r, double theta) const;
    double rho_theta(double r, double theta) const;
    DensitySample eval(double r, double theta) const { return {rho(r, theta), rho_theta(r, theta)}; }

    /// Fourth-order finite-difference derivative in theta with step h, switching to
    /// one-sided stencils where the centered one would leave |theta| <= theta_max.
    double rho_theta_fd(double r, double theta, double h) const;
    /// The fallback step, 1e-4 * theta_max.
    double fallback_step() const { return 1e-4 * impl_->domain.theta_max; }

private:
    void check_domain(double r, double theta) const;

    struct Impl {
        std::string name;
        DensityDomain domain;
        Fn rho;
        std::optional<Fn> rho_theta;
        bool theta_independent;
    };
    std::shared_ptr<const Impl> impl_;
};

DensityModel make_constant_density(const Parameters& p, double rho0);
/// rho0 (1 + alpha (R - r) / R)
DensityModel make_linear_depth_density(const Parameters& p, double rho0, double alpha);
/// rho0 (1 + alpha (R - r) / R + beta theta^2)
DensityModel make_latitude_quadratic_density(const Parameters& p, double rho0, double alpha, double beta);
/// Bicubic (Catmull-Rom) interpolation of samples on a tensor grid; `values` is r-major.
/// The derivative uses the finite-difference fallback.
DensityModel make_tabulated_density(const Parameters& p, std::vector<double> r_nodes,
                                    std::vector<double> theta_nodes, std::vector<double> values);

/// Samples rho on a grid covering the domain and throws DomainError if it is not positive.
void check_density_positive(const DensityModel& m, int n = 41);

/// The smooth profile F(x) fixing the velocity on the equator.
class AzimuthalProfile {
public:
    using Fn = std::function<double(double)>;
    AzimuthalProfile(std::string name, double lo, double hi, Fn f, bool identically_zero = false);

    double operator()(double x) const;
    const std::string& name() const { return name_; }
    double lo() const { return lo_; }
    double hi() const { return hi_; }
    bool identically_zero() const { return zero_; }

private:
    std::string name_;
    double lo_, hi_;
    Fn f_;
    bool zero_;
};

/// Domain [a cos(eps), r_max] on which F must be smooth.
std::pair<double, double> profile_domain(const Parameters& p);
AzimuthalProfile make_zero_profile(const Parameters& p);
AzimuthalProfile make_linear_profile(const Parameters& p, double k);
/// Natural cubic spline through (x, F) samples; must cover the profile domain.
AzimuthalProfile make_tabulated_profile(const Parameters& p, std::vector<double> x, std::vector<double> f);

enum class FieldRole { w, p, U, Z, residual };
const char* to_string(FieldRole role);

struct Grid2D {
    std::vector<double> r_nodes;
    std::vector<double> theta_nodes;

    Grid2D() = default;
    Grid2D(std::vector<double> r, std::vector<double> theta);

    std::size_t nr() const { return r_nodes.size(); }
    std::size_t ntheta() const { return theta_nodes.size(); }
    bool operator==(const Grid2D&) const = default;
};

/// `nr` uniform radii on [r_lo, r_hi] and `ntheta` Lobatto angles on [0, eps].
Grid2D make_field_grid(double r_lo, double r_hi, int nr, double eps, int ntheta);

struct ScalarField2D {
    Grid2D grid;
    FieldRole role = FieldRole::residual;
    std::vector<double> values;  ///< r-major: values[i * ntheta + j]

    ScalarField2D() = default;
    ScalarField2D(Grid2D g, FieldRole role);

    double& at(std::size_t i, std::size_t j) { return values[i * grid.ntheta() + j]; }
    double at(std::size_t i, std::size_t j) const { return values[i * grid.ntheta() + j]; }
    double max_abs() const;
};

struct FlowState {
    ScalarField2D w, p, U, Z;
};

}  // namespace eqflow
