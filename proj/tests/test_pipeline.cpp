#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdlib>

#include "cip/errors.hpp"
#include "cip/pipeline.hpp"

using namespace cip;

namespace {

const char* kModelT1 = R"({
    "model": {"kind": "single_gaussian", "amplitude": 0.2,
              "widths": [0.075], "centers": [0.5], "cbar": 4.0},
    "noise": {"level": 0.0, "seed": 1}
})";

}  // namespace

TEST_CASE("config parsing: model section, defaults, and validation") {
    const PipelineConfig cfg = parse_config(kModelT1);
    CHECK(cfg.model.kind == DielectricModel::Kind::single_gaussian);
    CHECK(cfg.model.amplitude == doctest::Approx(0.2));
    CHECK(cfg.model.widths.size() == 1);
    CHECK(cfg.model.cbar == doctest::Approx(4.0));
    CHECK(cfg.noise.level == doctest::Approx(0.0));
    // untouched defaults
    CHECK(cfg.carleman.lambda == doctest::Approx(2.0));
    CHECK(cfg.carleman.alpha == doctest::Approx(0.5));
    CHECK(cfg.carleman.gamma == doctest::Approx(1e-6));
    CHECK(cfg.domain_nx == 100);
    CHECK(cfg.domain_nt == 100);
    CHECK(cfg.preprocess.absorbing_identity);
    CHECK(cfg.preprocess.smoothing_sigma == doctest::Approx(0.02));

    CHECK_THROWS_AS(parse_config("{not json"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"model": {"kind": "cubic"}})"), ConfigError);
    CHECK_THROWS_AS(
        parse_config(R"({"model": {"kind": "single_gaussian", "widths": [0.1],
                                   "centers": [0.5], "cbar": 0.5}})"),
        ConfigError);
    CHECK_THROWS_AS(
        parse_config(R"({"model": {"kind": "double_gaussian", "widths": [0.1],
                                   "centers": [0.5], "cbar": 4.0}})"),
        ConfigError);
}

TEST_CASE("config parsing: environment overrides win over the file") {
    setenv("CIP_LAMBDA", "3.5", 1);
    setenv("CIP_NOISE_LEVEL", "0.03", 1);
    const PipelineConfig cfg = parse_config(kModelT1);
    unsetenv("CIP_LAMBDA");
    unsetenv("CIP_NOISE_LEVEL");
    CHECK(cfg.carleman.lambda == doctest::Approx(3.5));
    CHECK(cfg.noise.level == doctest::Approx(0.03));
}

TEST_CASE("scattered extraction: a homogeneous medium leaves no reflection") {
    ForwardConfig fwd{.ytilde = 2.4, .duration = 4.4, .ny = 3520, .nt = 7040,
                      .source_width = 4.0e4};
    const auto raw = simulate_boundary_data(DielectricModel::constant_model(1.0, 4.0), fwd);
    const auto sc = scattered_part(raw, fwd);
    CHECK(raw.g0.max_abs() > 0.4);  // the direct arrival is present in the raw trace
    CHECK(sc.g0.max_abs() < 1e-10);
    CHECK(sc.g1.max_abs() < 1e-10);
}

TEST_CASE("scattered extraction: an inclusion produces a negative reflected pulse") {
    ForwardConfig fwd{.ytilde = 2.4, .duration = 4.4, .ny = 3520, .nt = 7040,
                      .source_width = 4.0e4};
    const auto raw =
        simulate_boundary_data(DielectricModel::gaussian(0.2, 0.075, 0.5, 4.0), fwd);
    const auto sc = scattered_part(raw, fwd);
    REQUIRE(sc.g0.max_abs() > 0.0);
    double peak = 0.0;
    double peak_t = 0.0;
    for (size_t j = 0; j < sc.g0.samples.size(); ++j) {
        if (std::fabs(sc.g0.samples[j]) > std::fabs(peak)) {
            peak = sc.g0.samples[j];
            peak_t = sc.g0.time(j);
        }
    }
    CHECK(peak < 0.0);  // reflection off a higher-c inclusion flips the sign
    // two-way travel time to an inclusion centered at depth 0.5
    CHECK(peak_t == doctest::Approx(1.0).epsilon(0.15));
}

TEST_CASE("full simulated pipeline on the reference inclusion") {
    const PipelineConfig cfg = parse_config(kModelT1);
    const PipelineResult res = run_pipeline(cfg);

    CHECK(res.b == doctest::Approx(1.1031).epsilon(1e-3));
    CHECK(res.relative_error <= 0.10);
    CHECK(res.r_comp.refined.grid.count == kRefinedNodes);
    CHECK(res.r_true.grid.count == kRefinedNodes);
    CHECK(!res.trace.steps.empty());
    CHECK(res.seconds_forward > 0.0);
    CHECK(res.seconds_invert > 0.0);

    // the recovered medium must see the inclusion: c rises well above 1
    CHECK(res.c.max_c > 1.2);
    CHECK(res.c.max_c < 2.0);
    // default background interval [1,1] makes epsilon the max of c
    CHECK(res.epsilon.first == doctest::Approx(res.c.max_c));
    CHECK(res.epsilon.second == doctest::Approx(res.c.max_c));
}

TEST_CASE("noise changes the outcome but not the contract") {
    PipelineConfig cfg = parse_config(kModelT1);
    cfg.noise.level = 0.05;
    cfg.noise.seed = 1;
    const PipelineResult res = run_pipeline(cfg);
    CHECK(res.noisy.g0.samples != res.raw.g0.samples);
    CHECK(res.relative_error <= 0.15);  // still a usable reconstruction at 5% noise
    CHECK(res.c.max_c > 1.2);
}

TEST_CASE("experimental path: synthetic trace runs end to end") {
    // build a trace whose rescaled pulse mimics a buried reflector
    ExperimentalTrace tr;
    tr.dt_ns = 0.133;
    tr.scale = 1e-7;
    tr.polarity = Polarity::negative;
    tr.background_lo = 1.0;
    tr.background_hi = 1.0;
    for (int k = 0; k < 80; ++k) {
        const double t = k * 0.133 * 0.19;
        tr.samples.push_back(-2.0e5 * std::exp(-60.0 * (t - 1.0) * (t - 1.0)));
    }
    PipelineConfig cfg = parse_config(kModelT1);
    const ExperimentalResult res = run_experimental(tr, cfg);
    CHECK(res.r_comp.refined.grid.count == kRefinedNodes);
    CHECK(res.c.c.grid.count == cfg.recovery.options.y_nodes);
    CHECK(res.c.max_c >= res.c.min_c);
    CHECK(res.epsilon.first <= res.epsilon.second);
}
