#pragma once

#include <cstdint>
#include <string>

#include "cip/grid.hpp"
#include "cip/wave_forward.hpp"

namespace cip {

/// Signed Gaussian envelope: sign * amplitude * exp(-width*(t-center)^2).
struct EnvelopeParams {
    double amplitude = 0.0;  // >= 0
    double width = 1.0;      // exponent factor, > 0
    double center = 0.0;
    int sign = -1;  // +1 or -1

    double value(double t) const;
    double d1(double t) const;  // first derivative
    double d2(double t) const;  // second derivative
};

/// Closed-form inversion inputs s0 = g0', s1 = g0'' + g1', with copies
/// sampled on the inversion time grid.  When the trace was recorded on an
/// absorbing end the scattered pulse is purely outgoing there, so g1 = g0'
/// and s1 collapses to 2*g0''; identity_s1 selects that form.
struct DerivedData {
    EnvelopeParams env0;
    EnvelopeParams env1;
    GridFn1D s0_sampled;
    GridFn1D s1_sampled;
    bool identity_s1 = false;

    double s0(double t) const { return env0.d1(t); }
    double s1(double t) const {
        return identity_s1 ? 2.0 * env0.d2(t) : env0.d2(t) + env1.d1(t);
    }
};

struct ExperimentalTrace {
    std::vector<double> samples;  // 80 expected
    double dt_ns = 0.133;
    double scale = 1e-7;
    double background_lo = 3.0;
    double background_hi = 5.0;
    Polarity polarity = Polarity::negative;
};

struct TruncatedSeries {
    TimeSeries series;
    bool no_signal = false;
};

struct PreprocessOptions {
    Polarity polarity = Polarity::negative;
    // Standard deviation (in trace time units) of the Gaussian kernel applied
    // to the traces before truncation; 0 disables smoothing.
    double smoothing_sigma = 0.0;
    // Derive s1 from the g0 envelope alone via the outgoing-wave identity
    // g1 = g0' instead of fitting a second envelope to g1.
    bool absorbing_identity = false;
};

/// samples[j] * (1 + level*eta_j), eta uniform on [-1,1], deterministic per seed.
TimeSeries add_multiplicative_noise(const TimeSeries& ts, double level, uint64_t seed);

/// Discrete Gaussian-kernel smoothing, truncated at 4 sigma and renormalized
/// at the ends of the record.  Returns the series unchanged for sigma <= 0.
TimeSeries smooth_series(const TimeSeries& ts, double sigma);

/// Keeps samples of the chosen polarity with |value| >= 0.1*max|samples|,
/// zeroing the rest.
TruncatedSeries truncate_and_select(const TimeSeries& ts, Polarity polarity);

/// Weighted Gauss-Newton fit of the signed Gaussian envelope over the
/// nonzero support of a truncated series, weights |sample|/max|sample|.
EnvelopeParams fit_envelope(const TimeSeries& ts, Polarity polarity);

DerivedData derive_s0_s1(const EnvelopeParams& env0, const EnvelopeParams& env1,
                         const UniformGrid1D& tgrid, bool identity_s1 = false);

/// Full pre-processing of a raw boundary trace pair: optional noise is the
/// caller's job; this smooths, truncates, fits the envelopes, and
/// differentiates.
DerivedData preprocess_boundary_data(const BoundaryData& bd, const PreprocessOptions& opts,
                                     const UniformGrid1D& tgrid);
DerivedData preprocess_boundary_data(const BoundaryData& bd, Polarity polarity,
                                     const UniformGrid1D& tgrid);

/// Scales and re-times an experimental trace onto t' = 0.19e9 * t in (0,2),
/// then fills g1 from the fitted g0 envelope via the absorbing condition
/// g1 = g0'.
BoundaryData ingest_experimental(const ExperimentalTrace& trace, const UniformGrid1D& tgrid);

ExperimentalTrace read_experimental_trace(const std::string& path);

}  // namespace cip
