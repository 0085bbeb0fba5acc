#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "cip/recover.hpp"
#include "cip/wave_forward.hpp"

using namespace cip;

TEST_CASE("segmentation: zero potential is one non-positive interval") {
    const GridFn1D r(UniformGrid1D::over(0.0, 2.2, 450));
    const auto part = segment_intervals(r);
    REQUIRE(part.intervals.size() == 1);
    CHECK(part.intervals[0].lo == 0);
    CHECK(part.intervals[0].hi == 449);
    CHECK_FALSE(part.intervals[0].positive);
}

TEST_CASE("segmentation: a single bump splits into lead, core, and tail") {
    const auto g = UniformGrid1D::over(0.0, 2.2, 450);
    GridFn1D r(g);
    for (int i = 0; i < g.count; ++i) {
        const double x = g.node(i);
        r.values[i] = 2.0 * std::exp(-40.0 * (x - 0.6) * (x - 0.6)) - 0.3;
    }
    const auto part = segment_intervals(r);
    REQUIRE(part.intervals.size() == 3);
    CHECK_FALSE(part.intervals[0].positive);
    CHECK(part.intervals[1].positive);
    CHECK_FALSE(part.intervals[2].positive);
    // intervals tile the grid without overlap
    CHECK(part.intervals[0].lo == 0);
    CHECK(part.intervals[1].lo == part.intervals[0].hi + 1);
    CHECK(part.intervals[2].lo == part.intervals[1].hi + 1);
    CHECK(part.intervals[2].hi == g.count - 1);
    // the positive interval brackets the bump center
    CHECK(g.node(part.intervals[1].lo) < 0.6);
    CHECK(g.node(part.intervals[1].hi) > 0.6);
}

TEST_CASE("segmentation: the dead band hides sub-threshold wiggles") {
    const auto g = UniformGrid1D::over(0.0, 2.2, 450);
    GridFn1D r(g);
    for (int i = 0; i < g.count; ++i) {
        const double x = g.node(i);
        // dominant negative dip plus a positive ripple at 1% of the peak
        r.values[i] = -2.0 * std::exp(-40.0 * (x - 0.6) * (x - 0.6)) +
                      0.02 * std::exp(-40.0 * (x - 1.5) * (x - 1.5));
    }
    const auto part = segment_intervals(r, 0.02, 3);
    REQUIRE(part.intervals.size() == 1);
    CHECK_FALSE(part.intervals[0].positive);
}

TEST_CASE("ODE stepper: constant solution for zero potential and zero slope") {
    const GridFn1D r(UniformGrid1D::over(0.0, 2.0, 401));
    const SignInterval whole{0, 400, false};
    const auto seg = rk_advance(r, whole, 1.0, 0.0);
    for (double v : seg.p) CHECK(v == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(seg.dp_end == doctest::Approx(0.0));
}

TEST_CASE("ODE stepper: closed form for zero potential with initial slope") {
    // p'' = (3/2) p'^2 / p with p(0)=1, p'(0)=m has p(x) = (1 - m x / 2)^(-2)
    const GridFn1D r(UniformGrid1D::over(0.0, 1.0, 401));
    const SignInterval whole{0, 400, false};
    const double m = 0.4;
    const auto seg = rk_advance(r, whole, 1.0, m);
    double worst = 0.0;
    for (size_t k = 0; k < seg.p.size(); ++k) {
        const double x = r.grid.node(static_cast<int>(k));
        const double exact = std::pow(1.0 - 0.5 * m * x, -2.0);
        worst = std::max(worst, std::fabs(seg.p[k] - exact));
    }
    CHECK(worst < 1e-9);
    CHECK(seg.dp_end ==
          doctest::Approx(m * std::pow(1.0 - 0.5 * m, -3.0)).epsilon(1e-8));
}

TEST_CASE("ODE stepper: closed form for a constant positive potential") {
    // r = w^2 with p(0)=1, p'(0)=0 has p(x) = sec^2(w x)
    const double w = 0.8;
    const auto g = UniformGrid1D::over(0.0, 1.0, 801);
    GridFn1D r(g, w * w);
    const SignInterval whole{0, 800, true};
    const auto seg = rk_advance(r, whole, 1.0, 0.0);
    double worst = 0.0;
    for (size_t k = 0; k < seg.p.size(); ++k) {
        const double s = 1.0 / std::cos(w * g.node(static_cast<int>(k)));
        worst = std::max(worst, std::fabs(seg.p[k] - s * s));
    }
    CHECK(worst < 1e-9);
}

TEST_CASE("weighted fit reproduces the closed-form solution on a positive interval") {
    const double w = 0.8;
    const auto g = UniformGrid1D::over(0.0, 0.6, 121);
    GridFn1D r(g, w * w);
    const SignInterval whole{0, 120, true};
    const auto seg = wls_fit(r, whole, 1.0, 0.0, 2.0 * w * w, rho_star(0.6));
    REQUIRE(seg.converged);
    double worst = 0.0;
    for (size_t k = 0; k < seg.p.size(); ++k) {
        const double s = 1.0 / std::cos(w * g.node(static_cast<int>(k)));
        worst = std::max(worst, std::fabs(seg.p[k] - s * s));
    }
    CHECK(worst < 5e-3);
}

TEST_CASE("weight schedule: reference values and shape") {
    CHECK(rho_star(0.1) == doctest::Approx(28.469).epsilon(1e-4));
    CHECK(rho_star(0.073) == doctest::Approx(36.33).epsilon(1e-3));
    CHECK(rho_star(0.05) > rho_star(0.1));   // shrinking interval raises the weight
    CHECK(rho_star(2.0) > 1.0);
    CHECK_THROWS_AS(rho_star(0.0), std::invalid_argument);
    CHECK_THROWS_AS(rho_star(-1.0), std::invalid_argument);
}

TEST_CASE("depth integration: constant profiles have closed-form stopping points") {
    const auto g = UniformGrid1D::over(0.0, 2.0, 401);
    const auto one = integrate_depth(GridFn1D(g, 1.0));
    CHECK(one.x_stop == doctest::Approx(1.0).epsilon(1e-10));
    for (int i = 0; i < g.count; ++i)
        CHECK(one.y.values[i] == doctest::Approx(g.node(i)).epsilon(1e-12));

    // y' = 1/2 reaches depth 1 at x = 2
    const auto half = integrate_depth(GridFn1D(g, 0.5));
    CHECK(half.x_stop == doctest::Approx(2.0).epsilon(1e-10));
}

TEST_CASE("full recovery: zero potential gives the background medium") {
    const GridFn1D r(UniformGrid1D::over(0.0, 2.2, 450));
    const auto prof = run_algorithm2(r);
    CHECK(prof.x_stop == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(prof.max_c == doctest::Approx(1.0));
    CHECK(prof.min_c == doctest::Approx(1.0));
    for (double v : prof.c.values) CHECK(v == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("full recovery: round trip through the travel-time potential") {
    // narrow inclusion, so c(0) = 1 holds to 5 decimals and the assumed
    // initial conditions are consistent with the profile
    const auto model = DielectricModel::gaussian(0.2, 0.05, 0.5, 4.0);
    const auto xg = UniformGrid1D::over(0.0, 2.2, 450);
    const auto r = true_potential(model, xg);
    const auto prof = run_algorithm2(r);
    REQUIRE(prof.intervals.size() == 3);
    double num = 0.0, den = 0.0;
    for (int i = 0; i < prof.c.grid.count; ++i) {
        const double y = prof.c.grid.node(i);
        if (y > 1.0) break;
        const double d = prof.c.values[i] - model.value(y);
        num += d * d;
        den += model.value(y) * model.value(y);
    }
    CHECK(std::sqrt(num / den) <= 0.05);
    CHECK(prof.max_c == doctest::Approx(model.max_value()).epsilon(0.05));
}

TEST_CASE("relative-permittivity interval arithmetic") {
    DielectricProfile prof;
    prof.max_c = 4.12;
    prof.min_c = 0.26;
    const auto hi = estimate_epsilon(prof, 3.0, 5.0, EpsilonMode::max);
    CHECK(hi.first == doctest::Approx(12.36).epsilon(1e-12));
    CHECK(hi.second == doctest::Approx(20.60).epsilon(1e-12));
    const auto lo = estimate_epsilon(prof, 3.0, 5.0, EpsilonMode::min);
    CHECK(lo.first == doctest::Approx(0.78).epsilon(1e-12));
    CHECK(lo.second == doctest::Approx(1.30).epsilon(1e-12));

    DielectricProfile unit;
    unit.max_c = 6.27;
    const auto point = estimate_epsilon(unit, 1.0, 1.0, EpsilonMode::max);
    CHECK(point.first == doctest::Approx(6.27));
    CHECK(point.second == doctest::Approx(6.27));

    CHECK_THROWS(estimate_epsilon(prof, 5.0, 3.0, EpsilonMode::max));
}
