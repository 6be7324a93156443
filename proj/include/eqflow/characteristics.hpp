#pragma once

#include <cstddef>

namespace eqflow {

/// Parameter value at which the characteristic through latitude theta arrives,
/// i.e. the s with tanh(s) = sin(theta). Odd and strictly increasing.
double s0_of_theta(double theta);

struct CharacteristicPoint {
    double r;
    double theta;
};

/// Closed-form characteristic through (r, theta), normalized to cross the equator at s = 0:
/// (r cos(theta) cosh(s), arcsin(tanh(s))).
CharacteristicPoint characteristic_point(double r, double theta, double s);

struct CharacteristicPath {
    double r_base;
    double theta_base;
    double c1;  // coefficient of e^s
    double c2;  // coefficient of e^{-s}
    double s0;

    CharacteristicPoint at(double s) const;
    /// r(s) cos(theta(s)); equal to r_base cos(theta_base) along the whole path.
    double invariant(double s) const;
};

CharacteristicPath make_characteristic(double r, double theta);

struct CharacteristicCheck {
    double max_r_residual = 0.0;      ///< sup |r_numeric - r_closed| [m]
    double max_theta_residual = 0.0;  ///< sup |theta_numeric - theta_closed| [rad]
    double max_invariant_rel = 0.0;   ///< sup |r cos(theta) / (r_base cos(theta_base)) - 1|, closed form
    std::size_t steps = 0;

    double max_residual() const {
        return max_r_residual > max_theta_residual ? max_r_residual : max_theta_residual;
    }
};

/// Integrates r' = r sin(theta), theta' = cos(theta) from (r cos(theta), 0) at s = 0 and
/// compares against the closed form on [s_begin, s_end] (which may lie on either side of 0).
CharacteristicCheck verify_characteristic_odes(double r, double theta, double s_begin, double s_end,
                                               double tol, int samples = 257);

}  // namespace eqflow
