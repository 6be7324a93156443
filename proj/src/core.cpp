#include "eqflow/core.hpp"

#include "eqflow/chebyshev.hpp"
#include "eqflow/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace eqflow {

Parameters validate_parameters(const Parameters& p) {
    auto fail = [](const std::string& msg) { throw ParameterError(msg); };
    auto finite = [](double v) { return std::isfinite(v); };
    if (!finite(p.Omega) || !(p.Omega > 0)) fail("Omega must be positive");
    if (!finite(p.g) || !(p.g > 0)) fail("g must be positive");
    if (!finite(p.sigma) || !(p.sigma >= 0)) fail("sigma must be non-negative");
    if (!finite(p.P_atm) || !(p.P_atm > 0)) fail("P_atm must be positive");
    if (!finite(p.R) || !(p.R > 0)) fail("R must be positive");
    if (!finite(p.a) || !(p.a > 0 && p.a < p.R)) fail("a must satisfy 0 < a < R");
    if (!finite(p.eps) || !(p.eps > 0)) fail("eps must be positive");
    if (!(p.eps < std::numbers::pi / 2)) fail("eps must be less than pi/2");
    if (p.A && !finite(*p.A)) fail("A must be finite");
    if (!(p.tol_quad > 0)) fail("tol_quad must be positive");
    if (!(p.tol_ode > 0)) fail("tol_ode must be positive");
    if (!(p.tol_newton > 0)) fail("tol_newton must be positive");
    return p;
}

bool DensityDomain::contains(double r, double theta) const {
    const double sr = 1e-12 * r_hi;
    const double st = 1e-12 * std::max(theta_max, 1.0);
    return r >= r_lo - sr && r <= r_hi + sr && std::abs(theta) <= theta_max + st;
}

DensityDomain density_domain(const Parameters& p) {
    const double c = std::cos(p.eps);
    return {p.a * c, p.r_max() / c, p.eps};
}

DensityModel::DensityModel(std::string name, DensityDomain domain, Fn rho, std::optional<Fn> rho_theta,
                           bool theta_independent)
    : impl_(std::make_shared<const Impl>(
          Impl{std::move(name), domain, std::move(rho), std::move(rho_theta), theta_independent})) {}

void DensityModel::check_domain(double r, double theta) const {
    if (!impl_->domain.contains(r, theta)) {
        std::ostringstream msg;
        msg.precision(17);
        msg << "density '" << impl_->name << "' evaluated outside its domain at (r=" << r
            << ", theta=" << theta << "); domain is r in [" << impl_->domain.r_lo << ", "
            << impl_->domain.r_hi << "], |theta| <= " << impl_->domain.theta_max;
        throw DomainError(msg.str());
    }
}

double DensityModel::rho(double r, double theta) const {
    check_domain(r, theta);
    return impl_->rho(r, theta);
}

double DensityModel::rho_theta(double r, double theta) const {
    check_domain(r, theta);
    if (impl_->theta_independent) return 0.0;
    if (impl_->rho_theta) return (*impl_->rho_theta)(r, theta);
    return rho_theta_fd(r, theta, fallback_step());
}

double DensityModel::rho_theta_fd(double r, double theta, double h) const {
    check_domain(r, theta);
    const auto& f = impl_->rho;
    const double tmax = impl_->domain.theta_max;
    if (theta + 2 * h <= tmax && theta - 2 * h >= -tmax) {
        return (-f(r, theta + 2 * h) + 8 * f(r, theta + h) - 8 * f(r, theta - h) + f(r, theta - 2 * h)) /
               (12 * h);
    }
    // one-sided, pointing into the domain
    const double s = (theta + 2 * h > tmax) ? -1.0 : 1.0;
    const double hs = s * h;
    return (-25 * f(r, theta) + 48 * f(r, theta + hs) - 36 * f(r, theta + 2 * hs) +
            16 * f(r, theta + 3 * hs) - 3 * f(r, theta + 4 * hs)) /
           (12 * hs);
}

DensityModel make_constant_density(const Parameters& p, double rho0) {
    return DensityModel("constant", density_domain(p), [rho0](double, double) { return rho0; },
                        DensityModel::Fn([](double, double) { return 0.0; }), true);
}

DensityModel make_linear_depth_density(const Parameters& p, double rho0, double alpha) {
    const double R = p.R;
    return DensityModel(
        "linear-depth", density_domain(p),
        [=](double r, double) { return rho0 * (1.0 + alpha * (R - r) / R); },
        DensityModel::Fn([](double, double) { return 0.0; }), true);
}

DensityModel make_latitude_quadratic_density(const Parameters& p, double rho0, double alpha, double beta) {
    const double R = p.R;
    return DensityModel(
        "latitude-quadratic", density_domain(p),
        [=](double r, double t) { return rho0 * (1.0 + alpha * (R - r) / R + beta * t * t); },
        DensityModel::Fn([=](double, double t) { return 2.0 * rho0 * beta * t; }), beta == 0.0);
}

namespace {

// Cubic Hermite interpolation with finite-difference slopes on nonuniform nodes.
// `v(i)` returns the sample at node i.
template <class Values>
double hermite_interp(const std::vector<double>& x, Values v, double t) {
    const std::size_t n = x.size();
    if (n == 1) return v(0);
    std::size_t i = static_cast<std::size_t>(std::upper_bound(x.begin(), x.end(), t) - x.begin());
    i = std::clamp<std::size_t>(i, 1, n - 1) - 1;
    auto slope = [&](std::size_t k) {
        if (k == 0) return (v(1) - v(0)) / (x[1] - x[0]);
        if (k == n - 1) return (v(n - 1) - v(n - 2)) / (x[n - 1] - x[n - 2]);
        return (v(k + 1) - v(k - 1)) / (x[k + 1] - x[k - 1]);
    };
    const double h = x[i + 1] - x[i];
    const double s = (t - x[i]) / h;
    const double s2 = s * s, s3 = s2 * s;
    return (2 * s3 - 3 * s2 + 1) * v(i) + (s3 - 2 * s2 + s) * h * slope(i) + (-2 * s3 + 3 * s2) * v(i + 1) +
           (s3 - s2) * h * slope(i + 1);
}

void require_increasing(const std::vector<double>& x, const char* what) {
    for (std::size_t i = 1; i < x.size(); ++i)
        if (!(x[i] > x[i - 1])) throw PreconditionError(std::string(what) + " must be strictly increasing");
}

}  // namespace

DensityModel make_tabulated_density(const Parameters& p, std::vector<double> r_nodes,
                                    std::vector<double> theta_nodes, std::vector<double> values) {
    require_increasing(r_nodes, "tabulated density r nodes");
    require_increasing(theta_nodes, "tabulated density theta nodes");
    if (r_nodes.size() < 2 || theta_nodes.size() < 2)
        throw PreconditionError("tabulated density needs at least a 2x2 grid");
    if (values.size() != r_nodes.size() * theta_nodes.size())
        throw PreconditionError("tabulated density values do not match grid dimensions");
    const DensityDomain dom = density_domain(p);
    const double slack = 1e-9;
    if (r_nodes.front() > dom.r_lo * (1 + slack) || r_nodes.back() < dom.r_hi * (1 - slack) ||
        theta_nodes.front() > -dom.theta_max + slack || theta_nodes.back() < dom.theta_max - slack) {
        std::ostringstream msg;
        msg << "tabulated density grid must cover r in [" << dom.r_lo << ", " << dom.r_hi
            << "] and theta in [" << -dom.theta_max << ", " << dom.theta_max << "]";
        throw DomainError(msg.str());
    }
    struct Table {
        std::vector<double> r, t, v;
    };
    auto tab = std::make_shared<const Table>(Table{std::move(r_nodes), std::move(theta_nodes), std::move(values)});
    auto rho = [tab](double r, double theta) {
        const std::size_t nt = tab->t.size();
        auto row = [&](std::size_t i) {
            return hermite_interp(tab->t, [&](std::size_t j) { return tab->v[i * nt + j]; }, theta);
        };
        return hermite_interp(tab->r, row, r);
    };
    return DensityModel("tabulated", dom, rho, std::nullopt, false);
}

void check_density_positive(const DensityModel& m, int n) {
    const auto& d = m.domain();
    for (int i = 0; i < n; ++i) {
        const double r = d.r_lo + (d.r_hi - d.r_lo) * i / (n - 1);
        for (int j = 0; j < n; ++j) {
            const double t = -d.theta_max + 2 * d.theta_max * j / (n - 1);
            const double v = m.rho(r, t);
            if (!(v > 0) || !std::isfinite(v)) {
                std::ostringstream msg;
                msg.precision(17);
                msg << "density '" << m.name() << "' is not positive at (r=" << r << ", theta=" << t
                    << "): rho=" << v;
                throw DomainError(msg.str());
            }
        }
    }
}

AzimuthalProfile::AzimuthalProfile(std::string name, double lo, double hi, Fn f, bool identically_zero)
    : name_(std::move(name)), lo_(lo), hi_(hi), f_(std::move(f)), zero_(identically_zero) {}

double AzimuthalProfile::operator()(double x) const {
    const double s = 1e-12 * hi_;
    if (x < lo_ - s || x > hi_ + s) {
        std::ostringstream msg;
        msg.precision(17);
        msg << "profile '" << name_ << "' evaluated at x=" << x << " outside its domain [" << lo_ << ", "
            << hi_ << "]";
        throw DomainError(msg.str());
    }
    return zero_ ? 0.0 : f_(x);
}

std::pair<double, double> profile_domain(const Parameters& p) {
    return {p.a * std::cos(p.eps), p.r_max()};
}

AzimuthalProfile make_zero_profile(const Parameters& p) {
    const auto [lo, hi] = profile_domain(p);
    return AzimuthalProfile("zero", lo, hi, [](double) { return 0.0; }, true);
}

AzimuthalProfile make_linear_profile(const Parameters& p, double k) {
    const auto [lo, hi] = profile_domain(p);
    return AzimuthalProfile("linear", lo, hi, [k](double x) { return k * x; }, k == 0.0);
}

AzimuthalProfile make_tabulated_profile(const Parameters& p, std::vector<double> x, std::vector<double> f) {
    require_increasing(x, "tabulated profile abscissae");
    if (x.size() != f.size() || x.size() < 3)
        throw PreconditionError("tabulated profile needs at least three (x, F) samples");
    const auto [lo, hi] = profile_domain(p);
    if (x.front() > lo * (1 + 1e-12) || x.back() < hi * (1 - 1e-12)) {
        std::ostringstream msg;
        msg << "tabulated profile must cover [" << lo << ", " << hi << "]";
        throw DomainError(msg.str());
    }
    // natural cubic spline second derivatives
    const std::size_t n = x.size();
    std::vector<double> m(n, 0.0), c(n, 0.0), d(n, 0.0);
    for (std::size_t i = 1; i + 1 < n; ++i) {
        const double h0 = x[i] - x[i - 1], h1 = x[i + 1] - x[i];
        const double diag = 2.0 * (h0 + h1);
        const double rhs = 6.0 * ((f[i + 1] - f[i]) / h1 - (f[i] - f[i - 1]) / h0);
        const double sub = h0;
        const double denom = diag - sub * c[i - 1];
        c[i] = h1 / denom;
        d[i] = (rhs - sub * d[i - 1]) / denom;
    }
    for (std::size_t i = n - 1; i-- > 1;) m[i] = d[i] - c[i] * m[i + 1];

    struct Spline {
        std::vector<double> x, f, m;
    };
    auto sp = std::make_shared<const Spline>(Spline{std::move(x), std::move(f), std::move(m)});
    auto eval = [sp](double t) {
        const auto& X = sp->x;
        std::size_t i = static_cast<std::size_t>(std::upper_bound(X.begin(), X.end(), t) - X.begin());
        i = std::clamp<std::size_t>(i, 1, X.size() - 1) - 1;
        const double h = X[i + 1] - X[i];
        const double A = (X[i + 1] - t) / h, B = (t - X[i]) / h;
        return A * sp->f[i] + B * sp->f[i + 1] +
               ((A * A * A - A) * sp->m[i] + (B * B * B - B) * sp->m[i + 1]) * h * h / 6.0;
    };
    return AzimuthalProfile("tabulated", lo, hi, eval);
}

const char* to_string(FieldRole role) {
    switch (role) {
        case FieldRole::w: return "w";
        case FieldRole::p: return "p";
        case FieldRole::U: return "U";
        case FieldRole::Z: return "Z";
        case FieldRole::residual: return "residual";
    }
    return "?";
}

Grid2D::Grid2D(std::vector<double> r, std::vector<double> theta)
    : r_nodes(std::move(r)), theta_nodes(std::move(theta)) {
    require_increasing(r_nodes, "grid r nodes");
    require_increasing(theta_nodes, "grid theta nodes");
}

Grid2D make_field_grid(double r_lo, double r_hi, int nr, double eps, int ntheta) {
    if (nr < 2 || ntheta < 2) throw PreconditionError("field grids need at least two nodes per axis");
    std::vector<double> r(static_cast<std::size_t>(nr));
    for (int i = 0; i < nr; ++i) r[static_cast<std::size_t>(i)] = r_lo + (r_hi - r_lo) * i / (nr - 1);
    r.back() = r_hi;
    return Grid2D(std::move(r), lobatto_nodes(ntheta, 0.0, eps));
}

ScalarField2D::ScalarField2D(Grid2D g, FieldRole r)
    : grid(std::move(g)), role(r), values(grid.nr() * grid.ntheta(), 0.0) {}

double ScalarField2D::max_abs() const {
    double m = 0.0;
    for (double v : values) m = std::max(m, std::abs(v));
    return m;
}

}  // namespace eqflow
