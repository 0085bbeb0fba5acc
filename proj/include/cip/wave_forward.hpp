#pragma once

#include <optional>
#include <vector>

#include "cip/grid.hpp"

namespace cip {

/// Dielectric profile c(y): 1 outside (0,1), bounded by cbar inside.
struct DielectricModel {
    enum class Kind { constant, single_gaussian, double_gaussian, tabulated };

    Kind kind = Kind::constant;
    double amplitude = 1.0;                 // A_c, or the constant value of c
    std::vector<double> widths;             // w* (full width at half maximum)
    std::vector<double> centers;
    double cbar = 4.0;                      // known upper bound, > 1
    std::optional<GridFn1D> tabulated;

    double value(double y) const;
    double max_value() const;  // sampled maximum over [0,1]

    static DielectricModel constant_model(double c, double cbar);
    static DielectricModel gaussian(double amplitude, double width, double center, double cbar);
    static DielectricModel two_gaussians(double amplitude, double w1, double c1, double w2,
                                         double c2, double cbar);
};

struct ForwardConfig {
    double ytilde = 1.1;      // half-width of the simulation domain
    double duration = 2.0;    // simulated time span
    int ny = 1600;            // y intervals
    int nt = 3200;            // t intervals
    double source_width = 1e6;  // exponent factor of the Gaussian source
};

struct WaveField {
    UniformGrid2D grid;  // y along the first axis, t along the second
    GridFn2D u;
};

struct TimeSeries {
    double t0 = 0.0;
    double dt = 0.0;
    std::vector<double> samples;

    double time(size_t j) const { return t0 + dt * static_cast<double>(j); }
    double duration() const { return dt * static_cast<double>(samples.size() - 1); }
    double max_abs() const;
};

struct BoundaryData {
    TimeSeries g0;  // u(0,t)
    TimeSeries g1;  // u_y(0,t)
};

enum class Side { left, right };
enum class Polarity { negative, positive };

/// Explicit leapfrog solve of c(y) u_tt = u_yy with a normalized Gaussian
/// source in u_t(y,0) and first-order absorbing ends.
WaveField solve_forward(const DielectricModel& model, const ForwardConfig& cfg);

/// g0 = u at y=0, g1 by a second-order one-sided difference at y=0.
BoundaryData extract_boundary_data(const WaveField& field);

/// max_t |u_y ± u_t| at the chosen boundary, normalized by max_t |u_t| there.
double absorbing_residual(const WaveField& field, Side side);

/// x(y) = int_0^y sqrt(c) ds by composite Simpson quadrature.
GridFn1D travel_time_map(const DielectricModel& model, const UniformGrid1D& ygrid);

/// Ground-truth potential r*(x) from the model via the travel-time change
/// of variables; aux_refine scales the internal differentiation grid.
GridFn1D true_potential(const DielectricModel& model, const UniformGrid1D& xgrid,
                        int aux_refine = 8);

/// b = x(1), the travel time to the far edge of the target region.
double travel_time_to_depth_one(const DielectricModel& model);

}  // namespace cip
