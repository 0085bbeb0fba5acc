// Command-line front end: simulate / invert / recover / pipeline /
// experimental / selftest.  Exit codes: 0 ok, 1 numerical failure,
// 2 configuration or input error.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "cip/errors.hpp"
#include "cip/io.hpp"
#include "cip/pipeline.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::vector<double> series_times(const cip::TimeSeries& ts) {
    std::vector<double> t(ts.samples.size());
    for (size_t j = 0; j < t.size(); ++j) t[j] = ts.time(j);
    return t;
}

void write_boundary_csv(const std::string& path, const cip::BoundaryData& bd) {
    const std::vector<double> t = series_times(bd.g0);
    cip::write_columns(path, {"t", "g0", "g1"}, {&t, &bd.g0.samples, &bd.g1.samples});
}

void write_profile_csv(const std::string& path, const cip::GridFn1D& f,
                       const std::string& xname, const std::string& yname) {
    std::vector<double> x(f.values.size());
    for (size_t i = 0; i < x.size(); ++i) x[i] = f.grid.node(static_cast<int>(i));
    cip::write_columns(path, {xname, yname}, {&x, &f.values});
}

void write_trace_csv(const std::string& path, const cip::DescentTrace& trace) {
    std::vector<double> it, k, gn, st;
    for (const auto& s : trace.steps) {
        it.push_back(s.iter);
        k.push_back(s.k_value);
        gn.push_back(s.grad_norm);
        st.push_back(s.step);
    }
    cip::write_columns(path, {"iter", "K", "gradnorm", "step"}, {&it, &k, &gn, &st});
}

std::string envelope_line(const char* name, const cip::EnvelopeParams& e) {
    std::ostringstream os;
    os.precision(17);
    os << name << "=" << e.sign << "," << e.amplitude << "," << e.width << "," << e.center;
    return os.str();
}

void write_derived_csv(const std::string& path, const cip::DerivedData& d) {
    std::ofstream out(path);
    if (!out) throw cip::ConfigError("cannot open " + path + " for writing");
    out.precision(17);
    out << "# " << envelope_line("env0", d.env0) << "\n";
    out << "# " << envelope_line("env1", d.env1) << "\n";
    out << "# t,s0,s1\n";
    const auto& g = d.s0_sampled.grid;
    for (size_t j = 0; j < d.s0_sampled.values.size(); ++j)
        out << g.node(static_cast<int>(j)) << "," << d.s0_sampled.values[j] << ","
            << d.s1_sampled.values[j] << "\n";
}

bool parse_envelope_comment(const std::string& line, const char* name, cip::EnvelopeParams& e) {
    const std::string key = std::string(name) + "=";
    const auto pos = line.find(key);
    if (pos == std::string::npos) return false;
    std::istringstream is(line.substr(pos + key.size()));
    char c;
    if (!(is >> e.sign >> c >> e.amplitude >> c >> e.width >> c >> e.center)) return false;
    return true;
}

cip::DerivedData read_derived_csv(const std::string& path, const cip::UniformGrid1D& tgrid) {
    const cip::Table tab = cip::read_table(path);
    if (tab.cols.size() < 3) throw cip::ConfigError(path + ": expected columns t,s0,s1");
    cip::EnvelopeParams env0, env1;
    env1.amplitude = 0.0;
    bool have0 = false;
    for (const auto& c : tab.comments) {
        have0 = parse_envelope_comment(c, "env0", env0) || have0;
        parse_envelope_comment(c, "env1", env1);
    }
    if (!have0) {
        // Hand-made files are accepted only when the data is identically
        // zero; otherwise the continuous envelopes are required to extend
        // s0, s1 beyond the sampled window.
        for (size_t i = 1; i < 3; ++i)
            for (double v : tab.cols[i])
                if (v != 0.0)
                    throw cip::ConfigError(path +
                                           ": missing env0/env1 header comments "
                                           "(written by the pipeline/experimental commands)");
        env0.amplitude = 0.0;
    }
    return cip::derive_s0_s1(env0, env1, tgrid);
}

cip::GridFn1D read_profile_csv(const std::string& path) {
    const cip::Table tab = cip::read_table(path);
    if (tab.cols.size() < 2 || tab.cols[0].size() < 4)
        throw cip::ConfigError(path + ": expected columns x,value with >= 4 rows");
    const auto& x = tab.cols[0];
    cip::GridFn1D f;
    f.grid = cip::UniformGrid1D{x.front(), (x.back() - x.front()) / double(x.size() - 1),
                                static_cast<int>(x.size())};
    for (size_t i = 0; i < x.size(); ++i)
        if (std::fabs(x[i] - f.grid.node(static_cast<int>(i))) > 1e-9 * (1.0 + std::fabs(x[i])))
            throw cip::ConfigError(path + ": x column is not uniformly spaced");
    f.values = tab.cols[1];
    return f;
}

json summary_json(const cip::DielectricProfile& c, const std::pair<double, double>& eps) {
    json intervals = json::array();
    json residuals = json::array();
    for (const auto& iv : c.intervals) {
        intervals.push_back({{"x_lo", iv.x_lo},
                             {"x_hi", iv.x_hi},
                             {"positive", iv.positive},
                             {"rho", iv.rho},
                             {"converged", iv.converged}});
        residuals.push_back(iv.residual);
    }
    return json{{"max_c", c.max_c},
                {"min_c", c.min_c},
                {"epsilon_interval", {eps.first, eps.second}},
                {"intervals", intervals},
                {"residuals", residuals}};
}

void write_json(const std::string& path, const json& j) {
    std::ofstream out(path);
    if (!out) throw cip::ConfigError("cannot open " + path + " for writing");
    out << j.dump(2) << "\n";
}

cip::PipelineConfig config_from(const std::string& path) {
    return path.empty() ? cip::parse_config("{}") : cip::load_config(path);
}

int run_selftest();

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"1D coefficient inverse problem solver for c(y)u_tt = u_yy"};
    app.require_subcommand(1);

    std::string config_path, out_dir = ".", input_path, trace_path;
    std::optional<double> lambda, alpha, gamma, step, noise_level, rho;
    std::optional<uint64_t> seed;
    std::optional<int> max_iter;
    double cbar = 4.0;
    std::pair<double, double> background{1.0, 1.0};
    std::string polarity_mode = "max";
    bool write_noisy = false;
    std::string field_out;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "JSON configuration file");
        sub->add_option("--out-dir", out_dir, "output directory")->capture_default_str();
        sub->add_option("--lambda", lambda, "Carleman weight exponent");
        sub->add_option("--alpha", alpha, "Carleman weight time slope");
        sub->add_option("--gamma", gamma, "regularization weight");
        sub->add_option("--step", step, "descent step");
        sub->add_option("--max-iter", max_iter, "descent iteration cap");
        sub->add_option("--seed", seed, "noise seed");
        sub->add_option("--noise-level", noise_level, "multiplicative noise level");
    };

    auto* sim = app.add_subcommand("simulate", "forward wave solve, boundary trace CSV");
    add_common(sim);
    sim->add_flag("--noisy", write_noisy, "also write a noisy copy of the traces");
    sim->add_option("--field-out", field_out, "write the full wave field CSV");

    auto* inv = app.add_subcommand("invert", "stage 1: derived data CSV to r(x)");
    add_common(inv);
    inv->add_option("input", input_path, "derived data CSV (t,s0,s1)")->required();
    inv->add_option("--cbar", cbar, "upper bound of c")->capture_default_str();

    auto* rec = app.add_subcommand("recover", "stage 2: r(x) CSV to c(y)");
    add_common(rec);
    rec->add_option("input", input_path, "potential profile CSV (x,r)")->required();
    rec->add_option("--rho", rho, "override the rho*(l) schedule");
    rec->add_option("--background", background, "background epsilon interval lo hi");
    rec->add_option("--polarity-mode", polarity_mode, "max|min rule for epsilon")
        ->check(CLI::IsMember({"max", "min"}));

    auto* pipe = app.add_subcommand("pipeline", "simulate + invert + recover + report");
    add_common(pipe);

    auto* exp = app.add_subcommand("experimental", "experimental trace to epsilon interval");
    add_common(exp);
    exp->add_option("trace", trace_path, "experimental trace CSV")->required();

    app.add_subcommand("selftest", "run the built-in invariant suite");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        cip::PipelineConfig cfg = config_from(config_path);
        if (lambda) cfg.carleman.lambda = *lambda;
        if (alpha) cfg.carleman.alpha = *alpha;
        if (gamma) cfg.carleman.gamma = *gamma;
        if (step) cfg.descent.step = *step;
        if (max_iter) cfg.descent.caps.max_iter = *max_iter;
        if (seed) cfg.noise.seed = *seed;
        if (noise_level) cfg.noise.level = *noise_level;
        if (rho) cfg.recovery.options.rho_override = *rho;
        cfg.carleman.validate();
        fs::create_directories(out_dir);
        auto out = [&](const std::string& name) { return (fs::path(out_dir) / name).string(); };

        if (app.got_subcommand(sim)) {
            const cip::BoundaryData bd = cip::simulate_boundary_data(cfg.model, cfg.forward);
            write_boundary_csv(out("g.csv"), bd);
            if (write_noisy) {
                cip::BoundaryData noisy;
                noisy.g0 = cip::add_multiplicative_noise(bd.g0, cfg.noise.level, cfg.noise.seed);
                noisy.g1 =
                    cip::add_multiplicative_noise(bd.g1, cfg.noise.level, cfg.noise.seed + 1);
                write_boundary_csv(out("g_noisy.csv"), noisy);
            }
            if (!field_out.empty())
                cip::write_gridfn2d(out(field_out),
                                    cip::solve_forward(cfg.model, cfg.forward).u);
            std::cout << "wrote " << out("g.csv") << "\n";
        } else if (app.got_subcommand(inv)) {
            const cip::InversionDomain dom(cbar, cfg.domain_nx, cfg.domain_nt);
            const cip::DerivedData data = read_derived_csv(input_path, dom.grid.t);
            auto [r, trace] = cip::invert_stage(data, dom, cfg.carleman, cfg.descent);
            write_profile_csv(out("r.csv"), r.refined, "x", "r");
            write_trace_csv(out("trace.csv"), trace);
            std::cout << "wrote " << out("r.csv") << " (" << trace.steps.size()
                      << " descent steps)\n";
        } else if (app.got_subcommand(rec)) {
            const cip::GridFn1D r = read_profile_csv(input_path);
            const cip::DielectricProfile c = cip::run_algorithm2(r, cfg.recovery.options);
            const auto eps = cip::estimate_epsilon(
                c, background.first, background.second,
                polarity_mode == "min" ? cip::EpsilonMode::min : cip::EpsilonMode::max);
            write_profile_csv(out("c.csv"), c.c, "y", "c");
            write_json(out("summary.json"), summary_json(c, eps));
            std::cout << "wrote " << out("c.csv") << " max_c=" << c.max_c << "\n";
        } else if (app.got_subcommand(pipe)) {
            const cip::PipelineResult res = cip::run_pipeline(cfg);
            write_boundary_csv(out("g.csv"), res.raw);
            write_boundary_csv(out("g_noisy.csv"), res.noisy);
            write_derived_csv(out("derived.csv"), res.derived);
            write_profile_csv(out("r.csv"), res.r_comp.refined, "x", "r");
            write_trace_csv(out("trace.csv"), res.trace);
            write_profile_csv(out("c.csv"), res.c.c, "y", "c");
            write_json(out("summary.json"), summary_json(res.c, res.epsilon));
            json report{{"relative_error", res.relative_error},
                        {"travel_time_to_depth_one", res.b},
                        {"descent_iterations", res.trace.steps.size()},
                        {"final_K", res.trace.steps.empty() ? 0.0 : res.trace.steps.back().k_value},
                        {"max_c", res.c.max_c},
                        {"seconds",
                         {{"forward", res.seconds_forward},
                          {"invert", res.seconds_invert},
                          {"recover", res.seconds_recover}}}};
            write_json(out("report.json"), report);
            std::cout << "relative_error=" << res.relative_error << " max_c=" << res.c.max_c
                      << "\n";
        } else if (app.got_subcommand(exp)) {
            const cip::ExperimentalTrace trace = cip::read_experimental_trace(trace_path);
            const cip::ExperimentalResult res = cip::run_experimental(trace, cfg);
            write_derived_csv(out("derived.csv"), res.derived);
            write_profile_csv(out("r.csv"), res.r_comp.refined, "x", "r");
            write_profile_csv(out("c.csv"), res.c.c, "y", "c");
            write_json(out("epsilon.json"), summary_json(res.c, res.epsilon));
            std::cout << "epsilon_interval=[" << res.epsilon.first << "," << res.epsilon.second
                      << "]\n";
        } else {
            return run_selftest();
        }
    } catch (const cip::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const cip::NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

namespace {

int run_selftest() {
    int failures = 0;
    auto check = [&](const char* name, bool ok) {
        std::cout << (ok ? "ok   " : "FAIL ") << name << "\n";
        if (!ok) ++failures;
    };
    try {
        // Discrete norms on a small frozen grid.
        cip::UniformGrid2D g{cip::UniformGrid1D::over(0.0, 1.0, 101),
                             cip::UniformGrid1D::over(0.0, 2.0, 101)};
        cip::GridFn2D ones(g, 1.0);
        check("discrete L2 of 1 on the 101x101 unit-by-two grid",
              std::fabs(cip::discrete_l2(ones) - 2.0402) < 1e-12);

        cip::CarlemanParams p;
        check("Carleman weight at (1, 2)", std::fabs(cip::cwf(1.0, 2.0, p) - std::exp(-8.0)) < 1e-15);

        check("rho schedule at l = 0.1", std::fabs(cip::rho_star(0.1) - 28.469) < 1e-3);

        // Gradient spot check against finite differences on a small field.
        cip::InversionDomain dom(4.0, 12, 12);
        cip::QField q;
        q.q = cip::GridFn2D(dom.grid, 0.0);
        q.s0.assign(dom.grid.nt(), 0.1);
        q.s1.assign(dom.grid.nt(), -0.05);
        for (int i = 0; i < dom.grid.nx(); ++i)
            for (int j = 0; j < dom.grid.nt(); ++j)
                q.q.at(i, j) = 0.1 * std::sin(1.7 * i + 0.3 * j);
        q.enforce_constraints();
        const cip::GridFn2D grad = cip::gradient_K(q, p, false);
        double worst = 0.0;
        for (int i = 4; i < dom.grid.nx() - 4; i += 2)
            for (int j = 4; j < dom.grid.nt() - 4; j += 2) {
                const double h = 1e-6;
                cip::QField qp = q, qm = q;
                qp.q.at(i, j) += h;
                qm.q.at(i, j) -= h;
                const double fd =
                    (cip::functional_K(qp, p) - cip::functional_K(qm, p)) / (2.0 * h);
                worst = std::max(worst, std::fabs(grad.at(i, j) - fd) /
                                            std::max(1e-12, std::fabs(fd)));
            }
        check("analytic gradient vs finite differences", worst < 1e-4);

        // Parallel and serial functional agree up to summation rounding.
        const double kp = cip::functional_K(q, p);
        const double ks = cip::reference::functional_K(q, p);
        check("parallel functional matches serial reference",
              std::fabs(kp - ks) <= 1e-12 * std::fabs(ks));

        // Constant dielectric: potential vanishes.
        const auto model = cip::DielectricModel::constant_model(1.0, 2.0);
        const auto r0 = cip::true_potential(model, cip::UniformGrid1D::over(0.0, 1.0, 50));
        double rmax = 0.0;
        for (double v : r0.values) rmax = std::max(rmax, std::fabs(v));
        check("constant medium has zero potential", rmax < 1e-8);
    } catch (const std::exception& e) {
        std::cout << "FAIL selftest aborted: " << e.what() << "\n";
        return 1;
    }
    std::cout << (failures ? "selftest: FAILED\n" : "selftest: all checks passed\n");
    return failures ? 1 : 0;
}

}  // namespace
