#include "cip/pipeline.hpp"

#include <chrono>
#include <cstdlib>
#include <fstream>

#include <json.hpp>

#include "cip/errors.hpp"

namespace cip {

namespace {

using nlohmann::json;

double env_or(const char* name, double fallback) {
    const char* v = std::getenv(name);
    return v ? std::stod(v) : fallback;
}

DielectricModel parse_model(const json& j) {
    DielectricModel m;
    const std::string kind = j.value("kind", "constant");
    m.cbar = j.value("cbar", 4.0);
    if (kind == "constant") {
        m.kind = DielectricModel::Kind::constant;
        m.amplitude = j.value("value", 1.0);
    } else if (kind == "single_gaussian") {
        m.kind = DielectricModel::Kind::single_gaussian;
        m.amplitude = j.at("amplitude").get<double>();
        m.widths = j.at("widths").get<std::vector<double>>();
        m.centers = j.at("centers").get<std::vector<double>>();
        if (m.widths.size() != 1 || m.centers.size() != 1)
            throw ConfigError("model: single_gaussian needs one width and one center");
    } else if (kind == "double_gaussian") {
        m.kind = DielectricModel::Kind::double_gaussian;
        m.amplitude = j.at("amplitude").get<double>();
        m.widths = j.at("widths").get<std::vector<double>>();
        m.centers = j.at("centers").get<std::vector<double>>();
        if (m.widths.size() != 2 || m.centers.size() != 2)
            throw ConfigError("model: double_gaussian needs two widths and two centers");
    } else {
        throw ConfigError("model: unknown kind '" + kind + "'");
    }
    if (m.cbar <= 1.0) throw ConfigError("model: cbar must be > 1 (c in [1, cbar])");
    return m;
}

double elapsed(const std::chrono::steady_clock::time_point& t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

PipelineConfig parse_config(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    PipelineConfig cfg;
    try {
    if (j.contains("model")) cfg.model = parse_model(j["model"]);
    if (j.contains("forward")) {
        const auto& f = j["forward"];
        cfg.forward.ytilde = f.value("ytilde", cfg.forward.ytilde);
        cfg.forward.duration = f.value("duration", cfg.forward.duration);
        cfg.forward.ny = f.value("ny", cfg.forward.ny);
        cfg.forward.nt = f.value("nt", cfg.forward.nt);
        cfg.forward.source_width = f.value("source_width", cfg.forward.source_width);
    }
    if (j.contains("carleman")) {
        const auto& c = j["carleman"];
        cfg.carleman.lambda = c.value("lambda", cfg.carleman.lambda);
        cfg.carleman.alpha = c.value("alpha", cfg.carleman.alpha);
        cfg.carleman.gamma = c.value("gamma", cfg.carleman.gamma);
    }
    if (j.contains("domain")) {
        cfg.domain_nx = j["domain"].value("nx", cfg.domain_nx);
        cfg.domain_nt = j["domain"].value("nt", cfg.domain_nt);
    }
    if (j.contains("noise")) {
        cfg.noise.level = j["noise"].value("level", cfg.noise.level);
        cfg.noise.seed = j["noise"].value("seed", cfg.noise.seed);
    }
    if (j.contains("polarity"))
        cfg.preprocess.polarity =
            j["polarity"] == "positive" ? Polarity::positive : Polarity::negative;
    if (j.contains("preprocess")) {
        const auto& pp = j["preprocess"];
        cfg.preprocess.smoothing_sigma =
            pp.value("smoothing_sigma", cfg.preprocess.smoothing_sigma);
        cfg.preprocess.absorbing_identity =
            pp.value("absorbing_identity", cfg.preprocess.absorbing_identity);
    }
    if (j.contains("descent")) {
        const auto& d = j["descent"];
        cfg.descent.step = d.value("step", cfg.descent.step);
        cfg.descent.caps.max_iter = d.value("max_iter", cfg.descent.caps.max_iter);
        cfg.descent.caps.functional_drop =
            d.value("functional_drop", cfg.descent.caps.functional_drop);
        cfg.descent.caps.gradient_drop = d.value("gradient_drop", cfg.descent.caps.gradient_drop);
    }
    if (j.contains("recovery")) {
        const auto& r = j["recovery"];
        if (r.contains("rho") && !r["rho"].is_null())
            cfg.recovery.options.rho_override = r["rho"].get<double>();
        cfg.recovery.options.deadband = r.value("deadband", cfg.recovery.options.deadband);
        cfg.recovery.options.y_nodes = r.value("y_nodes", cfg.recovery.options.y_nodes);
        if (r.contains("background")) {
            cfg.recovery.background_lo = r["background"][0].get<double>();
            cfg.recovery.background_hi = r["background"][1].get<double>();
        }
        if (r.contains("mode"))
            cfg.recovery.mode = r["mode"] == "min" ? EpsilonMode::min : EpsilonMode::max;
    }
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }

    cfg.carleman.lambda = env_or("CIP_LAMBDA", cfg.carleman.lambda);
    cfg.carleman.alpha = env_or("CIP_ALPHA", cfg.carleman.alpha);
    cfg.carleman.gamma = env_or("CIP_GAMMA", cfg.carleman.gamma);
    cfg.noise.level = env_or("CIP_NOISE_LEVEL", cfg.noise.level);
    cfg.noise.seed = static_cast<uint64_t>(env_or("CIP_SEED", static_cast<double>(cfg.noise.seed)));
    cfg.descent.step = env_or("CIP_STEP", cfg.descent.step);
    cfg.carleman.validate();
    return cfg;
}

PipelineConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open " + path);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return parse_config(text);
}

BoundaryData simulate_boundary_data(const DielectricModel& model, const ForwardConfig& cfg) {
    return extract_boundary_data(solve_forward(model, cfg));
}

BoundaryData scattered_part(const BoundaryData& raw, const ForwardConfig& cfg) {
    // Subtract the homogeneous-medium trace so that only the reflected
    // pulse remains; the direct-arrival step carries no target information
    // for t > 0 and would defeat the Gaussian envelope fit.
    DielectricModel homog = DielectricModel::constant_model(1.0, 2.0);
    const BoundaryData ref = simulate_boundary_data(homog, cfg);
    if (ref.g0.samples.size() != raw.g0.samples.size())
        throw ConfigError("scattered_part: reference trace length mismatch");
    BoundaryData out = raw;
    for (size_t j = 0; j < out.g0.samples.size(); ++j) {
        out.g0.samples[j] -= ref.g0.samples[j];
        out.g1.samples[j] -= ref.g1.samples[j];
    }
    return out;
}

std::pair<PotentialProfile, DescentTrace> invert_stage(const DerivedData& data,
                                                       const InversionDomain& dom,
                                                       const CarlemanParams& p,
                                                       const DescentConfig& descent) {
    QField q0 = initial_guess(data, dom);
    auto [q, trace] = gdm_minimize(std::move(q0), p, descent.step, descent.caps);
    return {extract_r(q), std::move(trace)};
}

PipelineResult run_pipeline(const PipelineConfig& cfg) {
    PipelineResult res;
    auto t0 = std::chrono::steady_clock::now();
    res.raw = simulate_boundary_data(cfg.model, cfg.forward);
    res.noisy.g0 = add_multiplicative_noise(res.raw.g0, cfg.noise.level, cfg.noise.seed);
    res.noisy.g1 = add_multiplicative_noise(res.raw.g1, cfg.noise.level, cfg.noise.seed + 1);
    const BoundaryData scattered = scattered_part(res.noisy, cfg.forward);
    res.seconds_forward = elapsed(t0);

    t0 = std::chrono::steady_clock::now();
    const InversionDomain dom(cfg.model.cbar, cfg.domain_nx, cfg.domain_nt);
    res.derived = preprocess_boundary_data(scattered, cfg.preprocess, dom.grid.t);
    auto [r_comp, trace] = invert_stage(res.derived, dom, cfg.carleman, cfg.descent);
    res.r_comp = std::move(r_comp);
    res.trace = std::move(trace);
    res.seconds_invert = elapsed(t0);

    res.b = travel_time_to_depth_one(cfg.model);
    res.r_true = true_potential(cfg.model, res.r_comp.refined.grid);
    res.relative_error = relative_l2_error(res.r_comp.refined, res.r_true, res.b);

    t0 = std::chrono::steady_clock::now();
    res.c = run_algorithm2(res.r_comp.refined, cfg.recovery.options);
    res.epsilon = estimate_epsilon(res.c, cfg.recovery.background_lo, cfg.recovery.background_hi,
                                   cfg.recovery.mode);
    res.seconds_recover = elapsed(t0);
    return res;
}

ExperimentalResult run_experimental(const ExperimentalTrace& trace, const PipelineConfig& cfg) {
    ExperimentalResult res;
    const InversionDomain dom(cfg.model.cbar, cfg.domain_nx, cfg.domain_nt);
    const BoundaryData bd = ingest_experimental(trace, dom.grid.t);
    res.derived = preprocess_boundary_data(
        bd, PreprocessOptions{.polarity = trace.polarity, .absorbing_identity = true},
        dom.grid.t);
    auto [r_comp, descent_trace] = invert_stage(res.derived, dom, cfg.carleman, cfg.descent);
    res.r_comp = std::move(r_comp);
    res.c = run_algorithm2(res.r_comp.refined, cfg.recovery.options);
    res.epsilon =
        estimate_epsilon(res.c, trace.background_lo, trace.background_hi,
                         trace.polarity == Polarity::positive ? EpsilonMode::min : EpsilonMode::max);
    return res;
}

}  // namespace cip
