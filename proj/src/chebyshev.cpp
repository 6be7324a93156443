#include "eqflow/chebyshev.hpp"

#include "eqflow/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace eqflow {

namespace {

// Coefficients of the interpolant through f at x_m = cos(pi m / N), m = 0..N.
std::vector<double> lobatto_transform(std::span<const double> f_desc) {
    const int n = static_cast<int>(f_desc.size()) - 1;
    std::vector<double> c(static_cast<std::size_t>(n + 1), 0.0);
    if (n == 0) {
        c[0] = f_desc[0];
        return c;
    }
    for (int k = 0; k <= n; ++k) {
        double s = 0.0;
        for (int m = 0; m <= n; ++m) {
            const double w = (m == 0 || m == n) ? 0.5 : 1.0;
            // cos(pi m k / N) evaluated with the argument reduced mod 2N
            const int idx = (m * k) % (2 * n);
            s += w * f_desc[static_cast<std::size_t>(m)] * std::cos(std::numbers::pi * idx / n);
        }
        c[static_cast<std::size_t>(k)] = 2.0 * s / n;
    }
    c[0] *= 0.5;
    c[static_cast<std::size_t>(n)] *= 0.5;
    return c;
}

double clenshaw(std::span<const double> c, double x) {
    double b1 = 0.0, b2 = 0.0;
    for (std::size_t k = c.size(); k-- > 1;) {
        const double b0 = 2.0 * x * b1 - b2 + c[k];
        b2 = b1;
        b1 = b0;
    }
    return x * b1 - b2 + c[0];
}

}  // namespace

std::vector<double> lobatto_nodes(int n, double lo, double hi) {
    if (n < 2) throw PreconditionError("Lobatto grids need at least two points");
    std::vector<double> t(static_cast<std::size_t>(n));
    const int m = n - 1;
    for (int j = 0; j <= m; ++j) {
        const double s = std::sin(std::numbers::pi * j / (2.0 * m));
        t[static_cast<std::size_t>(j)] = lo + (hi - lo) * s * s;
    }
    t.front() = lo;
    t.back() = hi;
    return t;
}

ChebyshevSeries::ChebyshevSeries(double lo, double hi, std::vector<double> coefficients)
    : lo_(lo), hi_(hi), c_(std::move(coefficients)) {
    if (!(hi_ > lo_)) throw PreconditionError("Chebyshev interval must satisfy lo < hi");
    if (c_.empty()) c_.push_back(0.0);
}

ChebyshevSeries ChebyshevSeries::from_lobatto_values(double lo, double hi, std::span<const double> values) {
    std::vector<double> desc(values.rbegin(), values.rend());
    return ChebyshevSeries(lo, hi, lobatto_transform(desc));
}

ChebyshevSeries ChebyshevSeries::interpolate(const std::function<double(double)>& f, double lo,
                                             double hi, int degree) {
    const auto nodes = lobatto_nodes(degree + 1, lo, hi);
    std::vector<double> v(nodes.size());
    std::transform(nodes.begin(), nodes.end(), v.begin(), f);
    return from_lobatto_values(lo, hi, v);
}

double ChebyshevSeries::operator()(double t) const {
    const double x = (2.0 * t - (lo_ + hi_)) / (hi_ - lo_);
    return clenshaw(c_, x);
}

ChebyshevSeries ChebyshevSeries::derivative() const {
    const int n = degree();
    if (n == 0) return ChebyshevSeries(lo_, hi_, {0.0});
    std::vector<double> d(static_cast<std::size_t>(n + 1), 0.0);
    // d_{k-1} = d_{k+1} + 2 k c_k
    for (int k = n; k >= 1; --k) {
        const double next = (k + 1 <= n) ? d[static_cast<std::size_t>(k + 1)] : 0.0;
        d[static_cast<std::size_t>(k - 1)] = next + 2.0 * k * c_[static_cast<std::size_t>(k)];
    }
    d[0] *= 0.5;
    d.pop_back();
    const double scale = 2.0 / (hi_ - lo_);
    for (double& v : d) v *= scale;
    return ChebyshevSeries(lo_, hi_, std::move(d));
}

ChebyshevSeries& ChebyshevSeries::operator+=(const ChebyshevSeries& other) {
    if (other.lo_ != lo_ || other.hi_ != hi_)
        throw PreconditionError("cannot add Chebyshev series on different intervals");
    if (other.c_.size() > c_.size()) c_.resize(other.c_.size(), 0.0);
    for (std::size_t k = 0; k < other.c_.size(); ++k) c_[k] += other.c_[k];
    return *this;
}

ChebyshevSeries& ChebyshevSeries::operator*=(double s) {
    for (double& v : c_) v *= s;
    return *this;
}

ChebyshevSeries operator+(ChebyshevSeries a, const ChebyshevSeries& b) { return a += b; }
ChebyshevSeries operator*(double s, ChebyshevSeries a) { return a *= s; }

ChebyshevTable2D::ChebyshevTable2D(double x_lo, double x_hi, int nx, double y_lo, double y_hi, int ny,
                                   const std::function<double(double, double)>& f)
    : x_lo_(x_lo), x_hi_(x_hi), y_lo_(y_lo), y_hi_(y_hi), nx_(nx), ny_(ny),
      x_nodes_(lobatto_nodes(nx, x_lo, x_hi)), y_nodes_(lobatto_nodes(ny, y_lo, y_hi)) {
    std::vector<double> samples(static_cast<std::size_t>(nx * ny));
    for (int i = 0; i < nx; ++i)
        for (int j = 0; j < ny; ++j)
            samples[static_cast<std::size_t>(i * ny + j)] =
                f(x_nodes_[static_cast<std::size_t>(i)], y_nodes_[static_cast<std::size_t>(j)]);

    // transform along y for each x row, then along x for each y-coefficient column
    std::vector<double> tmp(samples.size());
    std::vector<double> line;
    for (int i = 0; i < nx; ++i) {
        line.assign(samples.begin() + i * ny, samples.begin() + (i + 1) * ny);
        std::reverse(line.begin(), line.end());
        const auto c = lobatto_transform(line);
        std::copy(c.begin(), c.end(), tmp.begin() + i * ny);
    }
    coef_.assign(samples.size(), 0.0);
    for (int j = 0; j < ny; ++j) {
        line.resize(static_cast<std::size_t>(nx));
        for (int i = 0; i < nx; ++i) line[static_cast<std::size_t>(nx - 1 - i)] = tmp[static_cast<std::size_t>(i * ny + j)];
        const auto c = lobatto_transform(line);
        for (int i = 0; i < nx; ++i) coef_[static_cast<std::size_t>(i * ny + j)] = c[static_cast<std::size_t>(i)];
    }
}

bool ChebyshevTable2D::contains(double x, double y) const {
    const double sx = 1e-12 * (x_hi_ - x_lo_), sy = 1e-12 * (y_hi_ - y_lo_);
    return x >= x_lo_ - sx && x <= x_hi_ + sx && y >= y_lo_ - sy && y <= y_hi_ + sy;
}

double ChebyshevTable2D::operator()(double x, double y) const {
    const double u = (2.0 * x - (x_lo_ + x_hi_)) / (x_hi_ - x_lo_);
    const double v = (2.0 * y - (y_lo_ + y_hi_)) / (y_hi_ - y_lo_);
    std::vector<double> col(static_cast<std::size_t>(nx_));
    for (int i = 0; i < nx_; ++i)
        col[static_cast<std::size_t>(i)] =
            clenshaw(std::span<const double>(coef_.data() + i * ny_, static_cast<std::size_t>(ny_)), v);
    return clenshaw(col, u);
}

}  // namespace eqflow
