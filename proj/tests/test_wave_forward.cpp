#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "cip/errors.hpp"
#include "cip/wave_forward.hpp"

using namespace cip;

namespace {

// Wider source and window than the bare solver defaults, so the pulse is
// resolved on the grid and the full record fits in the window.
ForwardConfig resolved_config() {
    return ForwardConfig{.ytilde = 2.4, .duration = 4.4, .ny = 3520, .nt = 7040,
                         .source_width = 4.0e4};
}

}  // namespace

TEST_CASE("dielectric models: bounds and factory shapes") {
    const auto c1 = DielectricModel::constant_model(1.0, 4.0);
    CHECK(c1.value(0.5) == doctest::Approx(1.0));
    CHECK(c1.value(-3.0) == doctest::Approx(1.0));
    CHECK(c1.max_value() == doctest::Approx(1.0));

    const auto g = DielectricModel::gaussian(0.2, 0.075, 0.5, 4.0);
    CHECK(g.value(0.5) == doctest::Approx(1.0 / (0.8 * 0.8)));  // 1.5625 at the dip center
    CHECK(g.max_value() == doctest::Approx(1.5625).epsilon(1e-6));
    CHECK(g.value(0.5) > g.value(0.3));

    const auto d = DielectricModel::two_gaussians(0.2, 0.1, 0.3, 0.075, 0.7, 4.0);
    CHECK(d.value(0.3) > 1.2);
    CHECK(d.value(0.7) > 1.2);
    CHECK(d.value(0.05) < d.value(0.3));
}

TEST_CASE("solver rejects an unstable time step") {
    ForwardConfig cfg;
    cfg.nt = 100;  // h_t far above h_y / sqrt(max c)
    CHECK_THROWS_AS(solve_forward(DielectricModel::constant_model(1.0, 4.0), cfg), ConfigError);
}

TEST_CASE("homogeneous medium: quiescent start and the half-amplitude plateau") {
    const auto field = solve_forward(DielectricModel::constant_model(1.0, 4.0),
                                     resolved_config());
    double u0 = 0.0;
    for (int i = 0; i < field.grid.nx(); ++i) u0 = std::max(u0, std::fabs(field.u.at(i, 0)));
    CHECK(u0 == 0.0);

    // A unit-mass velocity source in c = 1 leaves u(0,t) = 1/2 once both
    // halves of the pulse have passed, until the window ends.
    const auto bd = extract_boundary_data(field);
    double plateau_dev = 0.0, g1_max = 0.0;
    for (size_t j = 0; j < bd.g0.samples.size(); ++j) {
        const double t = bd.g0.time(j);
        if (t < 0.1 || t > 1.9) continue;
        plateau_dev = std::max(plateau_dev, std::fabs(bd.g0.samples[j] - 0.5));
        g1_max = std::max(g1_max, std::fabs(bd.g1.samples[j]));
    }
    CHECK(plateau_dev <= 1e-2);
    // nothing comes back in a homogeneous medium
    CHECK(g1_max <= 1e-6);
}

TEST_CASE("homogeneous medium: discrete energy non-increasing after the source leaves") {
    ForwardConfig cfg;
    cfg.source_width = 1.0e3;
    const auto field = solve_forward(DielectricModel::constant_model(1.0, 4.0), cfg);
    const auto& g = field.grid;
    const double hy = g.x.step, ht = g.t.step;
    const auto energy = [&](int j) {
        double e = 0.0;
        for (int i = 0; i + 1 < g.nx(); ++i) {
            const double uy = (field.u.at(i + 1, j) - field.u.at(i, j)) / hy;
            const double ut = (field.u.at(i, j + 1) - field.u.at(i, j)) / ht;
            e += (ut * ut + uy * uy) * hy;
        }
        return e;
    };
    const int j0 = static_cast<int>(0.2 / ht);
    double prev = energy(j0);
    const double slack = 0.01 * prev;
    for (int j = j0 + 1; j + 1 < g.nt(); j += 50) {
        const double e = energy(j);
        CHECK(e <= prev + slack);
        prev = e;
    }
}

TEST_CASE("absorbing ends: small residual, decreasing under refinement") {
    // Resolved pulse on the default grid so the residual probes the
    // discretization error of the boundary condition, not the source.
    ForwardConfig cfg;
    cfg.source_width = 1.0e3;
    const auto model = DielectricModel::constant_model(1.0, 4.0);
    const auto coarse = solve_forward(model, cfg);
    const double res_l = absorbing_residual(coarse, Side::left);
    const double res_r = absorbing_residual(coarse, Side::right);
    CHECK(res_l <= 0.05);
    CHECK(res_r <= 0.05);

    ForwardConfig fine_cfg = cfg;
    fine_cfg.ny *= 2;
    fine_cfg.nt *= 2;
    const auto fine = solve_forward(model, fine_cfg);
    CHECK(res_l / absorbing_residual(fine, Side::left) >= 1.5);
    CHECK(res_r / absorbing_residual(fine, Side::right) >= 1.5);
}

TEST_CASE("travel-time map: closed forms for constant media") {
    const auto yg = UniformGrid1D::over(0.0, 1.0, 101);
    const auto x1 = travel_time_map(DielectricModel::constant_model(1.0, 4.0), yg);
    const auto x4 = travel_time_map(DielectricModel::constant_model(4.0, 5.0), yg);
    for (int k = 0; k < yg.count; ++k) {
        CHECK(x1.values[k] == doctest::Approx(yg.node(k)).epsilon(1e-12));
        CHECK(x4.values[k] == doctest::Approx(2.0 * yg.node(k)).epsilon(1e-12));
    }
    CHECK(travel_time_to_depth_one(DielectricModel::constant_model(1.0, 4.0)) ==
          doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("travel time through the reference inclusion") {
    // c >= 1 inside the target stretches travel time: b in (1, a) with a = 2.2
    const double b = travel_time_to_depth_one(DielectricModel::gaussian(0.2, 0.075, 0.5, 4.0));
    CHECK(b > 1.0);
    CHECK(b < 2.2);
    CHECK(b == doctest::Approx(1.1031).epsilon(1e-3));
}

TEST_CASE("ground-truth potential: zero for constant media") {
    const auto xg = UniformGrid1D::over(0.0, 2.2, 450);
    for (double c : {1.0, 2.0, 4.0}) {
        const auto r = true_potential(DielectricModel::constant_model(c, 5.0), xg);
        double worst = 0.0;
        for (double v : r.values) worst = std::max(worst, std::fabs(v));
        CHECK(worst < 1e-8);
    }
}

TEST_CASE("ground-truth potential: stable under auxiliary-grid refinement") {
    const auto xg = UniformGrid1D::over(0.0, 2.2, 450);
    const auto model = DielectricModel::gaussian(0.2, 0.075, 0.5, 4.0);
    const auto r8 = true_potential(model, xg, 8);
    const auto r32 = true_potential(model, xg, 32);
    double m8 = 0.0, m32 = 0.0, dmax = 0.0;
    for (int i = 0; i < xg.count; ++i) {
        m8 = std::max(m8, std::fabs(r8.values[i]));
        m32 = std::max(m32, std::fabs(r32.values[i]));
        dmax = std::max(dmax, std::fabs(r8.values[i] - r32.values[i]));
    }
    CHECK(m8 > 1.0);  // the reference inclusion has a strong potential
    CHECK(std::fabs(m8 - m32) / m32 < 0.02);
    CHECK(dmax / m32 < 0.02);
}
