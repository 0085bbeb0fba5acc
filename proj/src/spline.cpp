#include "cip/spline.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace cip {

CubicSpline::CubicSpline(std::vector<double> x, std::vector<double> y)
    : x_(std::move(x)), y_(std::move(y)) {
    const size_t n = x_.size();
    if (n < 2 || y_.size() != n)
        throw std::invalid_argument("CubicSpline: need >= 2 knots with matching values");
    for (size_t k = 0; k + 1 < n; ++k)
        if (!(x_[k + 1] > x_[k]))
            throw std::invalid_argument("CubicSpline: knots must be strictly increasing");

    // Tridiagonal system for the natural second derivatives.
    m_.assign(n, 0.0);
    if (n == 2) return;
    std::vector<double> diag(n - 2), rhs(n - 2), sub(n - 2), sup(n - 2);
    for (size_t k = 1; k + 1 < n; ++k) {
        const double hl = x_[k] - x_[k - 1];
        const double hr = x_[k + 1] - x_[k];
        sub[k - 1] = hl;
        diag[k - 1] = 2.0 * (hl + hr);
        sup[k - 1] = hr;
        rhs[k - 1] = 6.0 * ((y_[k + 1] - y_[k]) / hr - (y_[k] - y_[k - 1]) / hl);
    }
    // Thomas algorithm.
    for (size_t k = 1; k < diag.size(); ++k) {
        const double w = sub[k] / diag[k - 1];
        diag[k] -= w * sup[k - 1];
        rhs[k] -= w * rhs[k - 1];
    }
    m_[n - 2] = rhs.back() / diag.back();
    for (size_t k = diag.size() - 1; k-- > 0;) m_[k + 1] = (rhs[k] - sup[k] * m_[k + 2]) / diag[k];
}

int CubicSpline::segment(double x) const {
    auto it = std::upper_bound(x_.begin(), x_.end(), x);
    int k = static_cast<int>(it - x_.begin()) - 1;
    return std::clamp(k, 0, static_cast<int>(x_.size()) - 2);
}

double CubicSpline::operator()(double x) const {
    const int k = segment(x);
    const double h = x_[k + 1] - x_[k];
    const double a = (x_[k + 1] - x) / h;
    const double b = (x - x_[k]) / h;
    return a * y_[k] + b * y_[k + 1] +
           ((a * a * a - a) * m_[k] + (b * b * b - b) * m_[k + 1]) * h * h / 6.0;
}

double CubicSpline::derivative(double x) const {
    const int k = segment(x);
    const double h = x_[k + 1] - x_[k];
    const double a = (x_[k + 1] - x) / h;
    const double b = (x - x_[k]) / h;
    return (y_[k + 1] - y_[k]) / h +
           ((3.0 * b * b - 1.0) * m_[k + 1] - (3.0 * a * a - 1.0) * m_[k]) * h / 6.0;
}

GridFn1D cubic_spline_resample(const GridFn1D& f, const UniformGrid1D& target) {
    const double eps = 1e-12 * (1.0 + std::fabs(f.grid.back()));
    if (target.start < f.grid.start - eps || target.back() > f.grid.back() + eps)
        throw std::domain_error("cubic_spline_resample: target grid outside source range");

    std::vector<double> knots(f.grid.count);
    for (int i = 0; i < f.grid.count; ++i) knots[i] = f.grid.node(i);
    CubicSpline s(knots, f.values);

    GridFn1D out(target);
    for (int i = 0; i < target.count; ++i) {
        const double x = std::clamp(target.node(i), f.grid.start, f.grid.back());
        out.values[i] = s(x);
    }
    return out;
}

}  // namespace cip
