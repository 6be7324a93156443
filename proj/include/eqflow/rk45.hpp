#pragma once

// Dormand-Prince 5(4) embedded Runge-Kutta with the 4th-order continuous extension.

#include "eqflow/errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <sstream>
#include <vector>

namespace eqflow {

struct OdeOptions {
    double rel_tol = 1e-10;
    double abs_tol = 1e-10;
    double initial_step = 0.0;  // 0 selects a step from the tolerance
    double max_step = 0.0;      // 0 means unbounded
    int max_steps = 100000;
};

template <std::size_t N>
using OdeState = std::array<double, N>;

/// Piecewise continuous extension of an accepted DOPRI5 trajectory.
template <std::size_t N>
class DenseSolution {
public:
    struct Segment {
        double t0, h;
        std::array<OdeState<N>, 5> coef;
    };

    DenseSolution() = default;
    DenseSolution(double t0, OdeState<N> y0) : t_begin_(t0), t_end_(t0), y0_(y0) {}

    double t_begin() const { return t_begin_; }
    double t_end() const { return t_end_; }
    std::size_t steps() const { return segments_.size(); }

    OdeState<N> operator()(double t) const {
        if (segments_.empty()) return y0_;
        const bool forward = t_end_ >= t_begin_;
        // locate segment containing t (segments are monotone in t)
        auto key = [forward](const Segment& s) { return forward ? s.t0 : -s.t0; };
        const double kt = forward ? t : -t;
        auto it = std::upper_bound(segments_.begin(), segments_.end(), kt,
                                   [&](double v, const Segment& s) { return v < key(s); });
        const Segment& seg = (it == segments_.begin()) ? segments_.front() : *std::prev(it);
        double th = (t - seg.t0) / seg.h;
        th = std::clamp(th, 0.0, 1.0);
        const double th1 = 1.0 - th;
        OdeState<N> y{};
        for (std::size_t i = 0; i < N; ++i) {
            const auto& c = seg.coef;
            y[i] = c[0][i] + th * (c[1][i] + th1 * (c[2][i] + th * (c[3][i] + th1 * c[4][i])));
        }
        return y;
    }

    void push(const Segment& s) {
        segments_.push_back(s);
        t_end_ = s.t0 + s.h;
    }
    void set_end(double t) { t_end_ = t; }

private:
    double t_begin_ = 0.0;
    double t_end_ = 0.0;
    OdeState<N> y0_{};
    std::vector<Segment> segments_;
};

template <std::size_t N>
using OdeRhs = std::function<OdeState<N>(double, const OdeState<N>&)>;

/// Integrates y' = f(t, y) from t0 to t1 (either direction) with error control
/// on the RMS of err_i / (abs_tol + rel_tol * |y_i|).
template <std::size_t N>
DenseSolution<N> integrate_dopri5(const OdeRhs<N>& f, double t0, double t1, const OdeState<N>& y0,
                                  const OdeOptions& opts = {}) {
    static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    static constexpr double a21 = 1.0 / 5;
    static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                            a54 = -212.0 / 729;
    static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                            a64 = 49.0 / 176, a65 = -5103.0 / 18656;
    static constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192,
                            a75 = -2187.0 / 6784, a76 = 11.0 / 84;
    static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                            e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
    static constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                            d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                            d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;

    DenseSolution<N> sol(t0, y0);
    if (t1 == t0) return sol;

    const double dir = t1 > t0 ? 1.0 : -1.0;
    const double span = std::abs(t1 - t0);
    double h = opts.initial_step > 0.0 ? opts.initial_step
                                       : span * std::pow(std::max(opts.rel_tol, 1e-16), 0.2) * 0.1;
    if (opts.max_step > 0.0) h = std::min(h, opts.max_step);
    h = std::min(h, span);

    auto axpy = [](OdeState<N> y, double h, std::initializer_list<std::pair<double, const OdeState<N>*>> terms) {
        for (std::size_t i = 0; i < N; ++i) {
            double acc = 0.0;
            for (const auto& [w, k] : terms) acc += w * (*k)[i];
            y[i] += h * acc;
        }
        return y;
    };

    double t = t0;
    OdeState<N> y = y0;
    OdeState<N> k1 = f(t, y);
    int nsteps = 0;
    double err_prev = 1e-4;

    while (dir * (t1 - t) > 0.0) {
        if (++nsteps > opts.max_steps) {
            std::ostringstream msg;
            msg << "DOPRI5 exceeded " << opts.max_steps << " steps at t=" << t;
            throw IntegratorError(msg.str());
        }
        bool last = false;
        if (h >= std::abs(t1 - t)) {
            h = std::abs(t1 - t);
            last = true;
        }
        const double hs = dir * h;

        const OdeState<N> k2 = f(t + c2 * hs, axpy(y, hs, {{a21, &k1}}));
        const OdeState<N> k3 = f(t + c3 * hs, axpy(y, hs, {{a31, &k1}, {a32, &k2}}));
        const OdeState<N> k4 = f(t + c4 * hs, axpy(y, hs, {{a41, &k1}, {a42, &k2}, {a43, &k3}}));
        const OdeState<N> k5 =
            f(t + c5 * hs, axpy(y, hs, {{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}}));
        const OdeState<N> k6 =
            f(t + hs, axpy(y, hs, {{a61, &k1}, {a62, &k2}, {a63, &k3}, {a64, &k4}, {a65, &k5}}));
        const OdeState<N> ynew =
            axpy(y, hs, {{a71, &k1}, {a73, &k3}, {a74, &k4}, {a75, &k5}, {a76, &k6}});
        const OdeState<N> k7 = f(t + hs, ynew);

        double err = 0.0;
        for (std::size_t i = 0; i < N; ++i) {
            const double ei =
                hs * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
            const double sc = opts.abs_tol + opts.rel_tol * std::max(std::abs(y[i]), std::abs(ynew[i]));
            err += (ei / sc) * (ei / sc);
        }
        err = std::sqrt(err / static_cast<double>(N));
        if (!std::isfinite(err)) {
            std::ostringstream msg;
            msg << "DOPRI5 produced a non-finite state at t=" << t;
            throw IntegratorError(msg.str());
        }

        if (err <= 1.0) {
            typename DenseSolution<N>::Segment seg;
            seg.t0 = t;
            seg.h = hs;
            for (std::size_t i = 0; i < N; ++i) {
                const double ydiff = ynew[i] - y[i];
                const double bspl = hs * k1[i] - ydiff;
                seg.coef[0][i] = y[i];
                seg.coef[1][i] = ydiff;
                seg.coef[2][i] = bspl;
                seg.coef[3][i] = ydiff - hs * k7[i] - bspl;
                seg.coef[4][i] = hs * (d1 * k1[i] + d3 * k3[i] + d4 * k4[i] + d5 * k5[i] +
                                       d6 * k6[i] + d7 * k7[i]);
            }
            sol.push(seg);
            t = last ? t1 : t + hs;
            y = ynew;
            k1 = k7;
            // PI step-size control
            double fac = 0.9 * std::pow(std::max(err, 1e-10), -0.7 / 5.0) * std::pow(err_prev, 0.4 / 5.0);
            fac = std::clamp(fac, 0.2, 10.0);
            err_prev = std::max(err, 1e-4);
            h *= fac;
        } else {
            h *= std::clamp(0.9 * std::pow(err, -0.2), 0.2, 1.0);
        }
        if (opts.max_step > 0.0) h = std::min(h, opts.max_step);
        if (h < 1e-14 * span) {
            std::ostringstream msg;
            msg << "DOPRI5 step size underflow at t=" << t;
            throw IntegratorError(msg.str());
        }
    }
    sol.set_end(t1);
    return sol;
}

}  // namespace eqflow
