#include "eqflow/characteristics.hpp"

#include "eqflow/errors.hpp"
#include "eqflow/rk45.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace eqflow {

namespace {
void require_latitude(double theta) {
    if (!(std::abs(theta) < std::numbers::pi / 2)) {
        std::ostringstream msg;
        msg << "characteristics require |theta| < pi/2, got theta=" << theta;
        throw DomainError(msg.str());
    }
}
}  // namespace

double s0_of_theta(double theta) {
    require_latitude(theta);
    return std::atanh(std::sin(theta));
}

CharacteristicPoint characteristic_point(double r, double theta, double s) {
    require_latitude(theta);
    if (!(r > 0)) throw DomainError("characteristics require r > 0");
    return {r * std::cos(theta) * std::cosh(s), std::asin(std::tanh(s))};
}

CharacteristicPoint CharacteristicPath::at(double s) const {
    return {c1 * std::exp(s) + c2 * std::exp(-s), std::asin(std::tanh(s))};
}

double CharacteristicPath::invariant(double s) const {
    const CharacteristicPoint p = at(s);
    return p.r * std::cos(p.theta);
}

CharacteristicPath make_characteristic(double r, double theta) {
    require_latitude(theta);
    if (!(r > 0)) throw DomainError("characteristics require r > 0");
    const double c = 0.5 * r * std::cos(theta);
    return {r, theta, c, c, s0_of_theta(theta)};
}

CharacteristicCheck verify_characteristic_odes(double r, double theta, double s_begin, double s_end,
                                               double tol, int samples) {
    const CharacteristicPath path = make_characteristic(r, theta);
    CharacteristicCheck out;
    if (s_begin > s_end) std::swap(s_begin, s_end);
    if (s_begin == s_end && s_begin == 0.0) return out;

    const OdeRhs<2> rhs = [](double, const OdeState<2>& y) {
        return OdeState<2>{y[0] * std::sin(y[1]), std::cos(y[1])};
    };
    const OdeState<2> y0{r * std::cos(theta), 0.0};
    OdeOptions opts;
    opts.rel_tol = tol;
    opts.abs_tol = tol;

    const auto fwd = integrate_dopri5<2>(rhs, 0.0, std::max(s_end, 0.0), y0, opts);
    const auto bwd = integrate_dopri5<2>(rhs, 0.0, std::min(s_begin, 0.0), y0, opts);
    out.steps = fwd.steps() + bwd.steps();

    const double base = r * std::cos(theta);
    const int n = std::max(samples, 2);
    for (int k = 0; k < n; ++k) {
        const double s = (k == n - 1) ? s_end : s_begin + (s_end - s_begin) * k / (n - 1);
        const OdeState<2> y = s >= 0.0 ? fwd(s) : bwd(s);
        const CharacteristicPoint exact = path.at(s);
        out.max_r_residual = std::max(out.max_r_residual, std::abs(y[0] - exact.r));
        out.max_theta_residual = std::max(out.max_theta_residual, std::abs(y[1] - exact.theta));
        out.max_invariant_rel = std::max(out.max_invariant_rel, std::abs(path.invariant(s) / base - 1.0));
    }
    return out;
}

}  // namespace eqflow
