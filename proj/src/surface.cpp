#include "eqflow/surface.hpp"

#include "eqflow/errors.hpp"
#include "eqflow/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace eqflow {

SurfaceShape::SurfaceShape(ChebyshevSeries H) : H_(std::move(H)), dH_(H_.derivative()), ddH_(dH_.derivative()) {}

SurfaceShape SurfaceShape::zero(double eps, int degree) {
    return SurfaceShape(ChebyshevSeries(0.0, eps, std::vector<double>(static_cast<std::size_t>(degree) + 1, 0.0)));
}

SurfaceShape SurfaceShape::from_function(const std::function<double(double)>& f, double eps, int degree) {
    return SurfaceShape(ChebyshevSeries::interpolate(f, 0.0, eps, degree));
}

SurfaceShape SurfaceShape::from_lobatto_values(double eps, std::span<const double> values) {
    return SurfaceShape(ChebyshevSeries::from_lobatto_values(0.0, eps, values));
}

SurfaceShape SurfaceShape::projected() const {
    // a + b theta with theta = eps (x + 1) / 2 is (a + b eps/2) T0 + (b eps/2) T1
    const double a = H_(0.0), b = dH_(0.0);
    const double half = 0.5 * eps();
    std::vector<double> c = H_.coefficients();
    if (c.size() < 2) c.resize(2, 0.0);
    c[0] -= a + b * half;
    c[1] -= b * half;
    return SurfaceShape(ChebyshevSeries(0.0, eps(), std::move(c)));
}

double SurfaceShape::membership_defect() const { return std::max(std::abs(H_(0.0)), std::abs(dH_(0.0))); }

double SurfaceShape::sup_abs(int samples) const {
    double m = 0.0;
    for (double t : lobatto_nodes(samples, 0.0, eps())) m = std::max(m, std::abs(H_(t)));
    return m;
}

SurfaceShape& SurfaceShape::operator+=(const SurfaceShape& o) {
    H_ += o.H_;
    dH_ = H_.derivative();
    ddH_ = dH_.derivative();
    return *this;
}

SurfaceShape& SurfaceShape::operator*=(double s) {
    H_ *= s;
    dH_ *= s;
    ddH_ *= s;
    return *this;
}

SurfaceShape operator+(SurfaceShape a, const SurfaceShape& b) { return a += b; }
SurfaceShape operator-(SurfaceShape a, const SurfaceShape& b) { return a += (-1.0) * b; }
SurfaceShape operator*(double s, SurfaceShape a) { return a *= s; }

// --- PressureTrace ---

PressureTrace PressureTrace::from_samples(std::vector<double> theta, std::vector<double> values) {
    const std::size_t n = theta.size();
    if (n == 0 || values.size() != n) throw ParameterError("pressure samples: theta and value columns differ in length");
    for (std::size_t i = 1; i < n; ++i)
        if (!(theta[i] > theta[i - 1])) throw ParameterError("pressure samples: theta must be strictly increasing");
    for (double v : values)
        if (!std::isfinite(v)) throw ParameterError("pressure samples: non-finite value");
    const double eps = theta.back();
    if (n == 1) {
        const double v = values[0];
        return PressureTrace([v](double) { return v; }, eps);
    }
    // Floater-Hormann weights
    const int N = static_cast<int>(n) - 1;
    const int d = std::min(8, N);
    std::vector<double> w(n, 0.0);
    for (int k = 0; k <= N; ++k) {
        double sum = 0.0;
        for (int i = std::max(0, k - d); i <= std::min(k, N - d); ++i) {
            double prod = 1.0;
            for (int j = i; j <= i + d; ++j)
                if (j != k) prod /= theta[k] - theta[j];
            sum += (i % 2 == 0) ? prod : -prod;
        }
        w[k] = sum;
    }
    auto f = [x = std::move(theta), y = std::move(values), w = std::move(w)](double t) {
        double num = 0.0, den = 0.0;
        for (std::size_t k = 0; k < x.size(); ++k) {
            const double diff = t - x[k];
            if (diff == 0.0) return y[k];
            const double c = w[k] / diff;
            num += c * y[k];
            den += c;
        }
        return num / den;
    };
    return PressureTrace(std::move(f), eps);
}

std::vector<double> PressureTrace::sample(std::span<const double> thetas) const {
    std::vector<double> out;
    out.reserve(thetas.size());
    for (double t : thetas) out.push_back(f_(t));
    return out;
}

// --- geometry ---

SurfaceGeometry surface_geometry(double H, double Ht, double Htt) {
    const double q = 1.0 + H;
    const double m2 = q * q + Ht * Ht;
    const double m = std::sqrt(m2);
    return {q / m, -Ht / m, (q * q + 2.0 * Ht * Ht - Htt * q) / (m2 * m)};
}

double curvature_divergence(double H, double Ht, double Htt) { return surface_geometry(H, Ht, Htt).J; }

double curvature_divergence(const SurfaceShape& shape, double theta) {
    return curvature_divergence(shape(theta), shape.d1(theta), shape.d2(theta));
}

// --- linear coefficients ---

double LinearCoefficients::stiffness(int samples) const {
    if (d == 0.0) return std::numeric_limits<double>::infinity();
    double gmax = 0.0;
    for (double t : lobatto_nodes(samples, 0.0, eps)) gmax = std::max(gmax, std::abs(gamma(t)));
    return std::sqrt(gmax / std::abs(d)) * eps;
}

bool LinearCoefficients::gamma_is_constant(int samples, double rel_tol) const {
    const double g0 = gamma(0.0);
    const double scale = std::max(std::abs(g0), std::numeric_limits<double>::min());
    for (double t : lobatto_nodes(samples, 0.0, eps))
        if (std::abs(gamma(t) - g0) > rel_tol * scale) return false;
    return true;
}

// --- functional ---

SurfaceFunctional::SurfaceFunctional(FlowField flow, FunctionalTerms terms) : flow_(std::move(flow)), terms_(terms) {}

double SurfaceFunctional::base(double theta) const {
    const PressureParts parts = flow_.pressure_parts(params().R, theta);
    double v = parts.constant;
    if (terms_.gravity) v += parts.gravity;
    if (terms_.rotation) v += parts.rotation;
    return v / params().P_atm;
}

std::vector<double> SurfaceFunctional::base(std::span<const double> thetas) const {
    std::vector<double> out;
    out.reserve(thetas.size());
    for (double t : thetas) out.push_back(base(t));
    return out;
}

double SurfaceFunctional::increment(double H, double theta, double& gravity, double& rotation) const {
    const auto& p = params();
    gravity = rotation = 0.0;
    const double top = (1.0 + H) * p.R;
    if (!(1.0 + H > 0.0) || top > p.r_max() * (1 + 1e-12)) {
        std::ostringstream msg;
        msg.precision(17);
        msg << "surface r=(1+H)R=" << top << " at theta=" << theta << " outside (0, r_max=" << p.r_max() << "]";
        throw DomainError(msg.str());
    }
    if (H == 0.0) return 0.0;
    // xi = R (1 + eta): forming (1 + H) R - R directly would lose the digits of H R
    const double c = std::cos(theta);
    const auto& rho = flow_.density();
    if (terms_.gravity)
        gravity = -p.g * p.R *
                  integrate([&](double eta) { return rho.rho(p.R * (1.0 + eta), theta); }, 0.0, H, p.tol_quad) /
                  p.P_atm;
    if (terms_.rotation && (!flow_.profile().identically_zero() || !flow_.stratification().identically_zero())) {
        const auto& F = flow_.profile();
        const auto& S = flow_.stratification();
        rotation = c * p.R *
                   integrate(
                       [&](double eta) {
                           const double y = p.R * (1.0 + eta) * c;
                           return F(y) / y + S(y, theta);
                       },
                       0.0, H, p.tol_quad) /
                   p.P_atm;
    }
    return gravity + rotation;
}

double SurfaceFunctional::curvature_term(double H, double Ht, double Htt) const {
    if (!terms_.curvature) return 0.0;
    const auto& p = params();
    return -p.sigma / (p.R * p.P_atm) * curvature_divergence(H, Ht, Htt);
}

FunctionalComponents SurfaceFunctional::components(const SurfaceShape& shape, double theta) const {
    FunctionalComponents out{base(theta), 0.0, 0.0, 0.0};
    const double H = shape(theta);
    increment(H, theta, out.gravity, out.rotation);
    out.curvature = curvature_term(H, shape.d1(theta), shape.d2(theta));
    return out;
}

double SurfaceFunctional::G(const SurfaceShape& shape, double theta) const { return components(shape, theta).total(); }

std::vector<double> SurfaceFunctional::G(const SurfaceShape& shape, std::span<const double> thetas,
                                         std::span<const double> base_values) const {
    if (base_values.size() != thetas.size()) throw PreconditionError("G: base values and thetas differ in length");
    std::vector<double> out(thetas.size());
    for (std::size_t i = 0; i < thetas.size(); ++i) {
        const double t = thetas[i];
        const double H = shape(t);
        double gr = 0.0, rot = 0.0;
        increment(H, t, gr, rot);
        out[i] = base_values[i] + gr + rot + curvature_term(H, shape.d1(t), shape.d2(t));
    }
    return out;
}

double SurfaceFunctional::residual(const SurfaceShape& shape, const PressureTrace& P, double theta) const {
    return G(shape, theta) - P(theta);
}

std::vector<double> SurfaceFunctional::residual(const SurfaceShape& shape, const PressureTrace& P,
                                                std::span<const double> thetas) const {
    std::vector<double> out;
    out.reserve(thetas.size());
    for (double t : thetas) out.push_back(residual(shape, P, t));
    return out;
}

PressureTrace SurfaceFunctional::baseline_pressure() const {
    const double kappa = curvature_term(0.0, 0.0, 0.0);
    return PressureTrace([self = *this, kappa](double t) { return self.base(t) + kappa; }, params().eps);
}

LinearCoefficients SurfaceFunctional::linear_coefficients() const {
    const auto& p = params();
    const double d = terms_.curvature ? p.sigma / (p.R * p.P_atm) : 0.0;
    auto gamma = [flow = flow_, terms = terms_, d](double theta) {
        const auto& q = flow.params();
        double g = d;
        if (terms.gravity || terms.rotation) {
            const double rho = flow.density().rho(q.R, theta);
            if (terms.gravity) g -= rho * q.g * q.R / q.P_atm;
            if (terms.rotation) g += rho * q.Omega * q.R * std::cos(theta) * flow.U(q.R, theta) / q.P_atm;
        }
        return g;
    };
    return {std::move(gamma), d, p.eps};
}

// --- linearization ---

double frechet_apply(const LinearCoefficients& coeffs, const SurfaceShape& shape, double theta) {
    return coeffs.d * shape.d2(theta) + coeffs.gamma(theta) * shape(theta);
}

PressureTrace frechet_apply(const LinearCoefficients& coeffs, const SurfaceShape& shape) {
    return PressureTrace([coeffs, shape](double t) { return frechet_apply(coeffs, shape, t); }, shape.eps());
}

namespace {
std::vector<double> log_slopes(const std::vector<double>& s, const std::vector<double>& e) {
    std::vector<double> out;
    for (std::size_t k = 0; k + 1 < s.size(); ++k) {
        if (e[k] == 0.0 && e[k + 1] == 0.0)
            out.push_back(std::numeric_limits<double>::infinity());
        else
            out.push_back(std::log10(e[k] / e[k + 1]) / std::log10(s[k] / s[k + 1]));
    }
    return out;
}
}  // namespace

double FrechetCheck::min_order() const {
    double m = std::numeric_limits<double>::infinity();
    for (double o : orders) m = std::min(m, o);
    return m;
}

FrechetCheck frechet_fd_check(const SurfaceFunctional& functional, const SurfaceShape& shape,
                              std::span<const double> s_values, std::span<const double> thetas) {
    const LinearCoefficients L = functional.linear_coefficients();
    const std::vector<double> base = functional.base(thetas);
    const SurfaceShape zero = SurfaceShape::zero(shape.eps(), shape.degree());
    const std::vector<double> g0 = functional.G(zero, thetas, base);
    std::vector<double> lin(thetas.size());
    for (std::size_t i = 0; i < thetas.size(); ++i) lin[i] = frechet_apply(L, shape, thetas[i]);

    FrechetCheck out;
    for (double s : s_values) {
        const std::vector<double> gs = functional.G(s * shape, thetas, base);
        double e = 0.0;
        for (std::size_t i = 0; i < thetas.size(); ++i) e = std::max(e, std::abs((gs[i] - g0[i]) / s - lin[i]));
        out.s.push_back(s);
        out.errors.push_back(e);
    }
    out.orders = log_slopes(out.s, out.errors);
    return out;
}

FrechetCheck curvature_limit_check(const SurfaceShape& shape, std::span<const double> s_values,
                                   std::span<const double> thetas) {
    FrechetCheck out;
    for (double s : s_values) {
        double e = 0.0;
        for (double t : thetas) {
            const double H = shape(t), Ht = shape.d1(t), Htt = shape.d2(t);
            const double fd = (curvature_divergence(s * H, s * Ht, s * Htt) - 1.0) / s;
            e = std::max(e, std::abs(fd - (-H - Htt)));
        }
        out.s.push_back(s);
        out.errors.push_back(e);
    }
    out.orders = log_slopes(out.s, out.errors);
    return out;
}

}  // namespace eqflow
