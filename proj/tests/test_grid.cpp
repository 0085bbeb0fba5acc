#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "cip/grid.hpp"

using namespace cip;

namespace {

UniformGrid2D unit_grid(int nx, int nt, double x_hi = 1.0, double t_hi = 2.0) {
    return {UniformGrid1D::over(0.0, x_hi, nx), UniformGrid1D::over(0.0, t_hi, nt)};
}

GridFn2D fill(const UniformGrid2D& g, double (*f)(double, double)) {
    GridFn2D out(g);
    for (int i = 0; i < g.nx(); ++i)
        for (int j = 0; j < g.nt(); ++j) out.at(i, j) = f(g.x.node(i), g.t.node(j));
    return out;
}

}  // namespace

TEST_CASE("grid construction rejects degenerate shapes") {
    CHECK_THROWS_AS(UniformGrid1D(0.0, -0.1, 10), std::invalid_argument);
    CHECK_THROWS_AS(UniformGrid1D(0.0, 0.1, 1), std::invalid_argument);
    const UniformGrid1D g = UniformGrid1D::over(0.0, 1.0, 101);
    CHECK(g.node(0) == doctest::Approx(0.0));
    CHECK(g.back() == doctest::Approx(1.0));
    CHECK(g.step == doctest::Approx(0.01));
}

TEST_CASE("checked access throws out of range") {
    GridFn2D f(unit_grid(11, 11));
    CHECK_THROWS_AS(f.at_checked(11, 0), std::out_of_range);
    CHECK_THROWS_AS(f.at_checked(0, -1), std::out_of_range);
    CHECK(f.at_checked(10, 10) == 0.0);
}

TEST_CASE("first differences: constants, linears, quadratics") {
    const auto g = unit_grid(101, 101);  // hx = 0.01, ht = 0.02
    const GridFn2D c = fill(g, [](double, double) { return 3.0; });
    CHECK(dx_forward(c, 5, 5) == doctest::Approx(0.0));
    CHECK(dt_forward(c, 5, 5) == doctest::Approx(0.0));

    const GridFn2D lin = fill(g, [](double x, double) { return x; });
    CHECK(dx_forward(lin, 17, 3) == doctest::Approx(1.0));

    // forward difference of x^2 at x = 0.5 with h = 0.01: (0.51^2 - 0.5^2)/0.01
    const GridFn2D sq = fill(g, [](double x, double) { return x * x; });
    CHECK(dx_forward(sq, 50, 0) == doctest::Approx(1.01));
}

TEST_CASE("second and mixed differences: exact on their polynomials") {
    const auto g = unit_grid(101, 101);
    const GridFn2D sq = fill(g, [](double x, double) { return x * x; });
    CHECK(dxx_central(sq, 50, 10) == doctest::Approx(2.0));

    const GridFn2D bil = fill(g, [](double x, double t) { return x * t; });
    CHECK(dxt_forward(bil, 30, 40) == doctest::Approx(1.0));

    const GridFn2D c = fill(g, [](double, double) { return -1.5; });
    CHECK(dxx_central(c, 50, 50) == doctest::Approx(0.0));
    CHECK(dtt_central(c, 50, 50) == doctest::Approx(0.0));
    CHECK(dxt_forward(c, 50, 50) == doctest::Approx(0.0));

    const GridFn2D tsq = fill(g, [](double, double t) { return t * t; });
    CHECK(dtt_central(tsq, 3, 50) == doctest::Approx(2.0));
}

TEST_CASE("stencils reject out-of-range indices") {
    GridFn2D f(unit_grid(11, 11));
    CHECK_THROWS_AS(dx_forward(f, 10, 0), std::out_of_range);
    CHECK_THROWS_AS(dxx_central(f, 0, 0), std::out_of_range);
    CHECK_THROWS_AS(dtt_central(f, 0, 10), std::out_of_range);
    CHECK_THROWS_AS(dxt_forward(f, 0, 10), std::out_of_range);
}

TEST_CASE("discrete L2: node count times cell weight") {
    const auto g = unit_grid(101, 101);  // hx = 0.01, ht = 0.02
    const GridFn2D ones(g, 1.0);
    CHECK(discrete_l2(ones) == doctest::Approx(101.0 * 101.0 * 0.01 * 0.02).epsilon(1e-12));

    const GridFn2D zero(g);
    CHECK(discrete_l2(zero) == 0.0);

    GridFn2D spike(g);
    spike.at(3, 4) = 2.0;
    CHECK(discrete_l2(spike) == doctest::Approx(4.0 * 0.01 * 0.02));
}

TEST_CASE("H2 seminorms: linear field leaves only the first-difference sum") {
    const auto g = unit_grid(101, 101);
    const GridFn2D lin = fill(g, [](double x, double) { return x; });
    // 100 x 100 forward x-differences, each equal to 1, cell weight 0.0002
    CHECK(discrete_h2_seminorms(lin) == doctest::Approx(2.0).epsilon(1e-12));
    const GridFn2D c = fill(g, [](double, double) { return 7.0; });
    CHECK(discrete_h2_seminorms(c) == doctest::Approx(0.0));
}

TEST_CASE("pairwise sum is chunking-independent and exact on integers") {
    std::vector<double> v(1000);
    for (size_t k = 0; k < v.size(); ++k) v[k] = static_cast<double>(k + 1);
    CHECK(pairwise_sum(v.data(), v.size()) == doctest::Approx(1000.0 * 1001.0 / 2.0));
    CHECK(pairwise_sum(v.data(), 0) == 0.0);
}
