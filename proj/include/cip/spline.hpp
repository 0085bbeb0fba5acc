#pragma once

#include <vector>

#include "cip/grid.hpp"

namespace cip {

/// Natural cubic spline through strictly increasing knots.
class CubicSpline {
public:
    CubicSpline() = default;
    CubicSpline(std::vector<double> x, std::vector<double> y);

    double operator()(double x) const;
    double derivative(double x) const;

    double x_min() const { return x_.front(); }
    double x_max() const { return x_.back(); }

private:
    int segment(double x) const;

    std::vector<double> x_, y_;
    std::vector<double> m_;  // second derivatives at knots, natural ends
};

/// Natural cubic spline through the source nodes evaluated on the target
/// grid. The target range must lie inside the source range.
GridFn1D cubic_spline_resample(const GridFn1D& f, const UniformGrid1D& target);

}  // namespace cip
