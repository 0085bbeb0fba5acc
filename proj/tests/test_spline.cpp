#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "cip/spline.hpp"

using namespace cip;

namespace {

constexpr double kPi = 3.14159265358979323846;

GridFn1D sample(const UniformGrid1D& g, double (*f)(double)) {
    GridFn1D out(g);
    for (int i = 0; i < g.count; ++i) out.values[i] = f(g.node(i));
    return out;
}

}  // namespace

TEST_CASE("spline interpolates the knots exactly") {
    std::vector<double> x{0.0, 0.3, 0.7, 1.0, 1.5};
    std::vector<double> y{1.0, -2.0, 0.5, 3.0, -1.0};
    CubicSpline s(x, y);
    for (size_t k = 0; k < x.size(); ++k) CHECK(s(x[k]) == doctest::Approx(y[k]).epsilon(1e-14));
}

TEST_CASE("spline reproduces linear data exactly, including the derivative") {
    std::vector<double> x{0.0, 0.25, 0.6, 1.0};
    std::vector<double> y;
    for (double v : x) y.push_back(3.0 * v - 2.0);
    CubicSpline s(x, y);
    for (double q : {0.1, 0.33, 0.5, 0.81, 0.99}) {
        CHECK(s(q) == doctest::Approx(3.0 * q - 2.0).epsilon(1e-13));
        CHECK(s.derivative(q) == doctest::Approx(3.0).epsilon(1e-12));
    }
}

TEST_CASE("resampling sin(pi x) from 101 to 450 nodes is accurate to 1e-6") {
    const auto src = sample(UniformGrid1D::over(0.0, 1.0, 101),
                            [](double x) { return std::sin(kPi * x); });
    const auto out = cubic_spline_resample(src, UniformGrid1D::over(0.0, 1.0, 450));
    double worst = 0.0;
    for (int i = 0; i < out.grid.count; ++i)
        worst = std::max(worst, std::fabs(out.values[i] - std::sin(kPi * out.grid.node(i))));
    CHECK(worst < 1e-6);
}

TEST_CASE("resampling onto the source grid is the identity") {
    const auto g = UniformGrid1D::over(0.0, 2.0, 37);
    const auto src = sample(g, [](double x) { return std::exp(-x) * std::cos(3.0 * x); });
    const auto out = cubic_spline_resample(src, g);
    for (int i = 0; i < g.count; ++i)
        CHECK(out.values[i] == doctest::Approx(src.values[i]).epsilon(1e-12));
}

TEST_CASE("resampling outside the source range is rejected") {
    const auto src = sample(UniformGrid1D::over(0.0, 1.0, 11), [](double x) { return x; });
    CHECK_THROWS_AS(cubic_spline_resample(src, UniformGrid1D::over(-0.1, 1.0, 11)),
                    std::domain_error);
    CHECK_THROWS_AS(cubic_spline_resample(src, UniformGrid1D::over(0.0, 1.5, 11)),
                    std::domain_error);
}

TEST_CASE("spline construction validates its knots") {
    CHECK_THROWS_AS(CubicSpline({0.0, 1.0}, {0.0}), std::invalid_argument);
    CHECK_THROWS_AS(CubicSpline({0.0, 0.0, 1.0}, {0.0, 1.0, 2.0}), std::invalid_argument);
    CHECK_THROWS_AS(CubicSpline({0.0}, {1.0}), std::invalid_argument);
}
