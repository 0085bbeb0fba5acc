#include "cip/preprocess.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <random>
#include <sstream>

#include "cip/errors.hpp"
#include "cip/io.hpp"

namespace cip {

double EnvelopeParams::value(double t) const {
    const double d = t - center;
    return sign * amplitude * std::exp(-width * d * d);
}

double EnvelopeParams::d1(double t) const { return -2.0 * width * (t - center) * value(t); }

double EnvelopeParams::d2(double t) const {
    const double d = t - center;
    return (4.0 * width * width * d * d - 2.0 * width) * value(t);
}

TimeSeries add_multiplicative_noise(const TimeSeries& ts, double level, uint64_t seed) {
    if (level < 0.0) throw std::invalid_argument("add_multiplicative_noise: level must be >= 0");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> eta(-1.0, 1.0);
    TimeSeries out = ts;
    for (double& v : out.samples) v *= 1.0 + level * eta(rng);
    return out;
}

TimeSeries smooth_series(const TimeSeries& ts, double sigma) {
    if (sigma <= 0.0 || ts.samples.size() < 2) return ts;
    const int n = static_cast<int>(ts.samples.size());
    const int half = std::max(1, static_cast<int>(std::ceil(4.0 * sigma / ts.dt)));
    std::vector<double> kernel(2 * half + 1);
    for (int i = -half; i <= half; ++i) {
        const double d = i * ts.dt;
        kernel[i + half] = std::exp(-0.5 * d * d / (sigma * sigma));
    }
    TimeSeries out = ts;
    for (int j = 0; j < n; ++j) {
        double s = 0.0, w = 0.0;
        for (int i = -half; i <= half; ++i) {
            const int jj = j + i;
            if (jj < 0 || jj >= n) continue;
            s += kernel[i + half] * ts.samples[jj];
            w += kernel[i + half];
        }
        out.samples[j] = s / w;
    }
    return out;
}

TruncatedSeries truncate_and_select(const TimeSeries& ts, Polarity polarity) {
    TruncatedSeries out{ts, false};
    const double cutoff = 0.1 * ts.max_abs();
    bool any = false;
    for (double& v : out.series.samples) {
        const bool keep = (polarity == Polarity::negative ? v < 0.0 : v > 0.0) &&
                          std::fabs(v) >= cutoff && cutoff > 0.0;
        if (keep)
            any = true;
        else
            v = 0.0;
    }
    out.no_signal = !any;
    return out;
}

namespace {

// 3x3 solve by Cramer's rule; the Gauss-Newton normal matrix is tiny.
bool solve3(const std::array<std::array<double, 3>, 3>& A, const std::array<double, 3>& b,
            std::array<double, 3>& x) {
    const auto det3 = [](const std::array<std::array<double, 3>, 3>& M) {
        return M[0][0] * (M[1][1] * M[2][2] - M[1][2] * M[2][1]) -
               M[0][1] * (M[1][0] * M[2][2] - M[1][2] * M[2][0]) +
               M[0][2] * (M[1][0] * M[2][1] - M[1][1] * M[2][0]);
    };
    const double d = det3(A);
    if (std::fabs(d) < 1e-300) return false;
    for (int c = 0; c < 3; ++c) {
        auto M = A;
        for (int r = 0; r < 3; ++r) M[r][c] = b[r];
        x[c] = det3(M) / d;
    }
    return true;
}

}  // namespace

EnvelopeParams fit_envelope(const TimeSeries& ts, Polarity polarity) {
    std::vector<double> t, y, w;
    const double m = ts.max_abs();
    for (size_t j = 0; j < ts.samples.size(); ++j) {
        if (ts.samples[j] != 0.0) {
            t.push_back(ts.time(j));
            y.push_back(ts.samples[j]);
            w.push_back(std::fabs(ts.samples[j]) / m);
        }
    }
    if (t.size() < 3)
        throw NumericalError("fit_envelope: need at least 3 nonzero samples, have " +
                             std::to_string(t.size()));

    const int sign = polarity == Polarity::negative ? -1 : +1;

    // initial guess: peak amplitude and location, width from the second moment
    size_t peak = 0;
    for (size_t j = 1; j < y.size(); ++j)
        if (std::fabs(y[j]) > std::fabs(y[peak])) peak = j;
    double amp = std::fabs(y[peak]);
    double center = t[peak];
    double wsum = 0.0, moment = 0.0;
    for (size_t j = 0; j < t.size(); ++j) {
        wsum += w[j];
        moment += w[j] * (t[j] - center) * (t[j] - center);
    }
    double sigma2 = std::max(moment / wsum, 1e-8);
    double width = 1.0 / (4.0 * sigma2);

    const auto cost = [&](double A, double k, double c) {
        double s = 0.0;
        for (size_t j = 0; j < t.size(); ++j) {
            const double d = t[j] - c;
            const double r = sign * A * std::exp(-k * d * d) - y[j];
            s += w[j] * r * r;
        }
        return s;
    };

    double mu = 1e-3;
    double f = cost(amp, width, center);
    const int max_iter = 1000;
    bool converged = false;
    for (int it = 0; it < max_iter && !converged; ++it) {
        std::array<std::array<double, 3>, 3> JtJ{};
        std::array<double, 3> Jtr{};
        for (size_t j = 0; j < t.size(); ++j) {
            const double d = t[j] - center;
            const double e = std::exp(-width * d * d);
            const double mval = sign * amp * e;
            const double r = mval - y[j];
            const std::array<double, 3> J = {sign * e, -d * d * mval, 2.0 * width * d * mval};
            for (int a = 0; a < 3; ++a) {
                Jtr[a] += w[j] * J[a] * r;
                for (int b = 0; b < 3; ++b) JtJ[a][b] += w[j] * J[a] * J[b];
            }
        }
        bool stepped = false;
        for (int tries = 0; tries < 40 && !stepped; ++tries) {
            auto A = JtJ;
            for (int a = 0; a < 3; ++a) A[a][a] += mu * (JtJ[a][a] + 1e-12);
            std::array<double, 3> step{};
            if (!solve3(A, {-Jtr[0], -Jtr[1], -Jtr[2]}, step)) {
                mu *= 10.0;
                continue;
            }
            const double amp2 = amp + step[0], width2 = width + step[1],
                         center2 = center + step[2];
            if (amp2 <= 0.0 || width2 <= 0.0) {
                mu *= 10.0;
                continue;
            }
            const double f2 = cost(amp2, width2, center2);
            if (f2 <= f) {
                const double steplen = std::fabs(step[0]) + std::fabs(step[1]) + std::fabs(step[2]);
                amp = amp2;
                width = width2;
                center = center2;
                // The data may carry an irreducible oscillatory residual, so
                // convergence is judged by step size, not residual magnitude.
                if (f - f2 < 1e-12 * (1.0 + f) ||
                    steplen < 1e-10 * (1.0 + amp + width + std::fabs(center)))
                    converged = true;
                f = f2;
                mu = std::max(mu / 3.0, 1e-12);
                stepped = true;
            } else {
                mu *= 2.0;
            }
        }
        if (!stepped) converged = true;  // damping saturated, accept current point
    }
    if (!converged) {
        std::ostringstream os;
        os << "fit_envelope: no convergence after " << max_iter
           << " iterations, weighted residual " << f;
        throw NumericalError(os.str());
    }
    return EnvelopeParams{amp, width, center, sign};
}

DerivedData derive_s0_s1(const EnvelopeParams& env0, const EnvelopeParams& env1,
                         const UniformGrid1D& tgrid, bool identity_s1) {
    DerivedData d;
    d.env0 = env0;
    d.env1 = env1;
    d.identity_s1 = identity_s1;
    d.s0_sampled = GridFn1D(tgrid);
    d.s1_sampled = GridFn1D(tgrid);
    for (int j = 0; j < tgrid.count; ++j) {
        d.s0_sampled.values[j] = d.s0(tgrid.node(j));
        d.s1_sampled.values[j] = d.s1(tgrid.node(j));
    }
    return d;
}

DerivedData preprocess_boundary_data(const BoundaryData& bd, const PreprocessOptions& opts,
                                     const UniformGrid1D& tgrid) {
    auto t0 = truncate_and_select(smooth_series(bd.g0, opts.smoothing_sigma), opts.polarity);
    if (t0.no_signal) throw NumericalError("preprocess: no signal in g0 after truncation");
    EnvelopeParams env0 = fit_envelope(t0.series, opts.polarity);
    if (opts.absorbing_identity) return derive_s0_s1(env0, env0, tgrid, true);

    auto t1 = truncate_and_select(smooth_series(bd.g1, opts.smoothing_sigma), opts.polarity);
    EnvelopeParams env1;
    if (t1.no_signal) {
        env1 = EnvelopeParams{0.0, 1.0, env0.center, opts.polarity == Polarity::negative ? -1 : 1};
    } else {
        env1 = fit_envelope(t1.series, opts.polarity);
    }
    return derive_s0_s1(env0, env1, tgrid);
}

DerivedData preprocess_boundary_data(const BoundaryData& bd, Polarity polarity,
                                     const UniformGrid1D& tgrid) {
    return preprocess_boundary_data(bd, PreprocessOptions{.polarity = polarity}, tgrid);
}

BoundaryData ingest_experimental(const ExperimentalTrace& trace, const UniformGrid1D& tgrid) {
    if (trace.samples.empty()) throw ConfigError("ingest_experimental: empty trace");

    // t' = 0.19e9 * t with t in seconds; samples are dt_ns apart.
    const double dtp = 0.19 * trace.dt_ns;
    TimeSeries g0;
    g0.t0 = 0.0;
    g0.dt = dtp;
    for (double v : trace.samples) {
        if (g0.samples.size() * dtp > 2.0) break;
        g0.samples.push_back(trace.scale * v);
    }

    BoundaryData bd;
    bd.g0.t0 = 0.0;
    bd.g0.dt = tgrid.step;
    bd.g1 = bd.g0;
    const double span = g0.duration();
    for (int j = 0; j < tgrid.count; ++j) {
        const double t = tgrid.node(j);
        double v = 0.0;
        if (t >= 0.0 && t <= span) {
            const size_t k = std::min(static_cast<size_t>(t / dtp), g0.samples.size() - 2);
            const double u = t / dtp - k;
            v = (1.0 - u) * g0.samples[k] + u * g0.samples[k + 1];
        }
        bd.g0.samples.push_back(v);
    }

    if (bd.g0.max_abs() == 0.0) {
        bd.g1.samples.assign(static_cast<size_t>(tgrid.count), 0.0);
        return bd;
    }

    // g1 from the absorbing condition at the antenna side: g1 = g0', taken
    // as the derivative of the fitted envelope.
    auto trunc = truncate_and_select(bd.g0, trace.polarity);
    if (trunc.no_signal) throw NumericalError("ingest_experimental: no signal after truncation");
    EnvelopeParams env0 = fit_envelope(trunc.series, trace.polarity);
    for (int j = 0; j < tgrid.count; ++j) bd.g1.samples.push_back(env0.d1(tgrid.node(j)));
    return bd;
}

ExperimentalTrace read_experimental_trace(const std::string& path) {
    Table t = read_table(path);
    ExperimentalTrace tr;
    for (const auto& c : t.comments) {
        std::stringstream ss(c);
        std::string kv;
        while (std::getline(ss, kv, ',')) {
            const auto eq = kv.find('=');
            if (eq == std::string::npos) continue;
            std::string key = kv.substr(0, eq);
            key.erase(0, key.find_first_not_of(' '));
            const std::string val = kv.substr(eq + 1);
            if (key == "dt_ns")
                tr.dt_ns = std::stod(val);
            else if (key == "scale")
                tr.scale = std::stod(val);
            else if (key == "background_lo")
                tr.background_lo = std::stod(val);
            else if (key == "background_hi")
                tr.background_hi = std::stod(val);
            else if (key == "polarity")
                tr.polarity = val == "positive" ? Polarity::positive : Polarity::negative;
        }
    }
    if (t.cols.size() != 1) throw ConfigError(path + ": expected one sample per line");
    tr.samples = t.cols[0];
    return tr;
}

}  // namespace cip
