#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cip/grid.hpp"

namespace cip {

/// Contiguous node range [lo, hi] on the refined r grid; consecutive ranges
/// are disjoint, with each starting one node past the previous end.
struct SignInterval {
    int lo = 0;
    int hi = 0;
    bool positive = false;
};

struct IntervalPartition {
    UniformGrid1D grid;
    std::vector<SignInterval> intervals;  // ordered, tiling [0, last node]
};

/// Values of p~ = c(y(x))^(-1/2) and its derivative on the processed part
/// of the x grid.
struct PtildeProfile {
    GridFn1D p;
    GridFn1D dp;
};

struct IntervalReport {
    double x_lo = 0.0;
    double x_hi = 0.0;
    bool positive = false;  // WLS interval (true) or Runge-Kutta (false)
    double rho = 0.0;       // weight parameter used on WLS intervals
    double residual = 0.0;  // final weighted WLS residual
    bool converged = true;
};

struct DielectricProfile {
    GridFn1D c;  // on a uniform y grid over [0,1]
    double max_c = 0.0;
    double min_c = 0.0;
    double x_stop = 0.0;
    std::vector<IntervalReport> intervals;
};

struct RecoveryOptions {
    std::optional<double> rho_override;
    double deadband = 0.02;     // |r| < deadband*max|r| counts as non-positive
    int min_interval_nodes = 3;
    int y_nodes = 450;
};

enum class EpsilonMode { max, min };

/// Sign segmentation of r with a dead band and a minimum interval length.
IntervalPartition segment_intervals(const GridFn1D& r, double threshold = 0.02,
                                    int min_nodes = 3);

/// Classical RK4 on the recovery ODE p'' = 2pr + (3/2)(p')^2/p (the relation
/// between p = c^(-1/2) and the potential r in travel-time coordinates)
/// across one node interval.  Returns p at the interval nodes and the
/// end-point derivative.
struct RkSegment {
    std::vector<double> p;
    double dp_end = 0.0;
};
RkSegment rk_advance(const GridFn1D& r, const SignInterval& interval, double p0, double dp0);

/// Damped Gauss-Newton minimization of the exponentially weighted ODE
/// residual on a positive interval, left end pinned to (p, p', p'').
struct WlsSegment {
    std::vector<double> p;
    double residual = 0.0;
    bool converged = true;
};
WlsSegment wls_fit(const GridFn1D& r, const SignInterval& interval, double p0, double dp0,
                   double d2p0, double rho);

/// Averaged optimal weight schedule: (2.1457/l + 2.1081/l + 14.40)/2.
double rho_star(double l);

/// Cumulative integration of y' = p~ with Simpson increments; x_stop is
/// the first x with y >= 1, or the end of the grid.
struct DepthMap {
    GridFn1D y;
    double x_stop = 0.0;
};
DepthMap integrate_depth(const GridFn1D& ptilde);

/// Full stage-2 recovery: segmentation, chained RK/WLS, depth integration,
/// and tabulation of c(y) = p~^(-2) on a uniform y grid over [0,1].
DielectricProfile run_algorithm2(const GridFn1D& r_refined, const RecoveryOptions& opts = {});

/// [min, max] of epsilon_r from the background interval rule.
std::pair<double, double> estimate_epsilon(const DielectricProfile& c, double background_lo,
                                           double background_hi, EpsilonMode mode);

}  // namespace cip
