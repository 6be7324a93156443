#pragma once

#include <functional>
#include <span>
#include <vector>

namespace eqflow {

/// `n` Chebyshev-Lobatto points on [lo, hi], ascending, endpoints included exactly.
std::vector<double> lobatto_nodes(int n, double lo, double hi);

/// Truncated Chebyshev series sum_k c_k T_k(x) with x the affine image of [lo, hi] on [-1, 1].
class ChebyshevSeries {
public:
    ChebyshevSeries() = default;
    ChebyshevSeries(double lo, double hi, std::vector<double> coefficients);

    /// Interpolates at the `values.size()` ascending Lobatto nodes of [lo, hi].
    static ChebyshevSeries from_lobatto_values(double lo, double hi, std::span<const double> values);
    static ChebyshevSeries interpolate(const std::function<double(double)>& f, double lo, double hi,
                                       int degree);

    double operator()(double t) const;
    ChebyshevSeries derivative() const;

    int degree() const { return static_cast<int>(c_.size()) - 1; }
    double lo() const { return lo_; }
    double hi() const { return hi_; }
    const std::vector<double>& coefficients() const { return c_; }

    ChebyshevSeries& operator+=(const ChebyshevSeries& other);
    ChebyshevSeries& operator*=(double s);

private:
    double lo_ = 0.0;
    double hi_ = 1.0;
    std::vector<double> c_{0.0};
};

ChebyshevSeries operator+(ChebyshevSeries a, const ChebyshevSeries& b);
ChebyshevSeries operator*(double s, ChebyshevSeries a);

/// Tensor-product Chebyshev interpolant on a rectangle, built from samples at Lobatto nodes.
class ChebyshevTable2D {
public:
    ChebyshevTable2D() = default;
    ChebyshevTable2D(double x_lo, double x_hi, int nx, double y_lo, double y_hi, int ny,
                     const std::function<double(double, double)>& f);

    double operator()(double x, double y) const;
    bool contains(double x, double y) const;

    const std::vector<double>& x_nodes() const { return x_nodes_; }
    const std::vector<double>& y_nodes() const { return y_nodes_; }

private:
    double x_lo_ = 0, x_hi_ = 1, y_lo_ = 0, y_hi_ = 1;
    int nx_ = 0, ny_ = 0;
    std::vector<double> x_nodes_, y_nodes_;
    std::vector<double> coef_;  // nx rows (x-degree) by ny columns (y-degree)
};

}  // namespace eqflow
