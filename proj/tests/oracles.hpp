#pragma once

// Brute-force reference computations, independent of the library's numerics.

#include <array>
#include <cmath>
#include <functional>

namespace oracle {

/// Composite Simpson rule with n (even) panels.
inline double simpson(const std::function<double(double)>& f, double a, double b, int n) {
    if (n % 2) ++n;
    const double h = (b - a) / n;
    double s = f(a) + f(b);
    for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
    return s * h / 3.0;
}

/// Classical fixed-step RK4 for a 2-vector system.
inline std::array<double, 2> rk4(const std::function<std::array<double, 2>(double, const std::array<double, 2>&)>& f,
                                 double t0, double t1, std::array<double, 2> y, long steps) {
    const double h = (t1 - t0) / static_cast<double>(steps);
    auto add = [](const std::array<double, 2>& y, double c, const std::array<double, 2>& k) {
        return std::array<double, 2>{y[0] + c * k[0], y[1] + c * k[1]};
    };
    double t = t0;
    for (long i = 0; i < steps; ++i) {
        const auto k1 = f(t, y);
        const auto k2 = f(t + h / 2, add(y, h / 2, k1));
        const auto k3 = f(t + h / 2, add(y, h / 2, k2));
        const auto k4 = f(t + h, add(y, h, k3));
        for (int j = 0; j < 2; ++j) y[j] += h / 6 * (k1[j] + 2 * k2[j] + 2 * k3[j] + k4[j]);
        t = t0 + static_cast<double>(i + 1) * h;
    }
    return y;
}

/// rho0 (1 + alpha (R - r)/R + beta theta^2) and its theta derivative, written out here
/// rather than taken from the library.
struct QuadraticDensity {
    double rho0, alpha, beta, R;
    double rho(double r, double t) const { return rho0 * (1.0 + alpha * (R - r) / R + beta * t * t); }
    double rho_t(double, double t) const { return 2.0 * rho0 * beta * t; }
};

/// H(y, theta) = int_0^{s0} g rho_theta(y cosh s, asin tanh s) ds by Simpson with n panels.
inline double strat_H(const QuadraticDensity& d, double g, double y, double theta, int n) {
    const double s0 = 0.5 * std::log((1 + std::sin(theta)) / (1 - std::sin(theta)));
    return simpson([&](double s) { return g * d.rho_t(y * std::cosh(s), std::asin(std::tanh(s))); }, 0.0, s0, n);
}

struct Setup {
    double Omega, g, sigma, P_atm, R, a;
    QuadraticDensity rho;
    double k;  // F(x) = k x
};

/// Gauge constant giving P0(0) = 1.
inline double gauge_A(const Setup& s, int n) {
    const double grav = s.g * simpson([&](double x) { return s.rho.rho(x, 0.0); }, s.a, s.R, n);
    return s.P_atm + s.sigma / s.R + grav - s.k * (s.R - s.a);
}

/// Bulk pressure p(r, theta) by nested Simpson: n outer panels, m inner panels.
inline double pressure(const Setup& s, double A, double r, double theta, int n, int m) {
    const double c = std::cos(theta);
    const double Ct = A - simpson([&](double x) { return std::tan(x) * s.k * s.a * std::cos(x); }, 0.0, theta, n) -
                      s.a * simpson([&](double x) { return std::sin(x) * strat_H(s.rho, s.g, s.a * std::cos(x), x, m); },
                                    0.0, theta, n);
    const double grav = s.g * simpson([&](double x) { return s.rho.rho(x, theta); }, s.a, r, n);
    const double rot = simpson([&](double y) { return s.k + strat_H(s.rho, s.g, y, theta, m); }, s.a * c, r * c, n);
    return Ct - grav + rot;
}

/// Undisturbed surface pressure P0(theta).
inline double P0(const Setup& s, double theta, int n, int m) {
    const double A = gauge_A(s, n);
    return pressure(s, A, s.R, theta, n, m) / s.P_atm - s.sigma / (s.R * s.P_atm);
}

}  // namespace oracle
