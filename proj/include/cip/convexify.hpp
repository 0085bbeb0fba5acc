#pragma once

#include <vector>

#include "cip/grid.hpp"
#include "cip/preprocess.hpp"

namespace cip {

/// Parameters of the Carleman-weighted functional.
struct CarlemanParams {
    double lambda = 2.0;  // >= 1
    double alpha = 0.5;   // in (0, 0.5]
    double gamma = 1e-6;  // in (0, 1)

    void validate() const;

    /// Smallest gamma for which the convexity theory applies at (lambda,
    /// alpha) on a domain of time span ttilde; computations run below it.
    double theoretical_gamma_floor(double ttilde) const;
};

/// Carleman weight exp(-2*lambda*(x + alpha*t)).
double cwf(double x, double t, const CarlemanParams& p);

/// Computational rectangle (0,a) x (0, 2a) with a = 1.1*sqrt(cbar).
struct InversionDomain {
    double cbar = 4.0;
    double a = 0.0;
    double ttilde = 0.0;
    UniformGrid2D grid;

    explicit InversionDomain(double cbar_, int nx = 100, int nt = 100);
};

/// Field q on the inversion domain with the x = 0 Dirichlet/Neumann rows
/// pinned to the data and a zero Neumann row at x = a.
struct QField {
    GridFn2D q;
    std::vector<double> s0;  // data row values at x = 0
    std::vector<double> s1;  // data row of q_x at x = 0

    /// Re-imposes the pinned rows: q[0,j] = s0, (q[1,j]-q[0,j])/hx = s1,
    /// q[Nx,j] = q[Nx-1,j].
    void enforce_constraints();

    /// Projects a descent direction onto the tangent space of the pinned
    /// rows: zero at x = 0 rows, equalized on the two x = a rows.
    void project(GridFn2D& g) const;
};

/// Discrete quasilinear operator M at node (i,j):
/// dxx - 2*dxt + 4*q_x(x,0)*q, all by the stencils of the functional.
double operator_M(const QField& q, int i, int j);

/// Carleman-weighted misfit plus H2-type Tikhonov penalty.
double functional_K(const QField& q, const CarlemanParams& p);

/// Exact analytic gradient of functional_K at every node (gather form),
/// optionally projected onto the constraint tangent space.
GridFn2D gradient_K(const QField& q, const CarlemanParams& p, bool project = true);

/// q0(x,t) = s0(t) + 1/2 * int_t^{t+2x} s1, by composite Simpson quadrature.
QField initial_guess(const DerivedData& data, const InversionDomain& dom);

struct StoppingRule {
    double functional_drop = 1e-2;  // stop threshold relative to K(q0)
    double gradient_drop = 1e-2;    // relative to ||grad K(q0)||_inf
    int max_iter = 5000;
};

struct DescentStep {
    int iter;
    double k_value;
    double grad_norm;
    double step;
    double q_norm;
};

struct DescentTrace {
    std::vector<DescentStep> steps;
};

/// Fixed-step gradient descent with backtracking halving on non-decrease.
std::pair<QField, DescentTrace> gdm_minimize(QField q0, const CarlemanParams& p,
                                             double step, const StoppingRule& caps);

/// Stage-1 output r(x) on the coarse grid and refined onto 450 nodes.
struct PotentialProfile {
    GridFn1D coarse;
    GridFn1D refined;
};

constexpr int kRefinedNodes = 450;

/// r_comp(x) = 4 * forward difference of the first t-row, located at the
/// cell midpoints and spline-refined back onto [0, a].
PotentialProfile extract_r(const QField& q);

/// ||f - g||_L2 / ||g||_L2 over x in [0, x_hi], both sampled on f's grid.
double relative_l2_error(const GridFn1D& f, const GridFn1D& g, double x_hi);

// Serial reference implementations kept for testing and benchmarking: the
// functional by naive accumulation, the gradient by adjoint-mode
// scatter-add over the same sums.
namespace reference {
double functional_K(const QField& q, const CarlemanParams& p);
GridFn2D gradient_K(const QField& q, const CarlemanParams& p, bool project = true);
}  // namespace reference

}  // namespace cip
