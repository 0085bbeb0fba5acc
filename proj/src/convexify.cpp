#include "cip/convexify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "cip/errors.hpp"
#include "cip/spline.hpp"

namespace cip {

void CarlemanParams::validate() const {
    if (lambda < 1.0) throw ConfigError("CarlemanParams: lambda must be >= 1");
    if (alpha <= 0.0 || alpha > 0.5) throw ConfigError("CarlemanParams: alpha must be in (0, 0.5]");
    if (gamma <= 0.0 || gamma >= 1.0) throw ConfigError("CarlemanParams: gamma must be in (0, 1)");
}

double CarlemanParams::theoretical_gamma_floor(double ttilde) const {
    return 2.0 * std::exp(-lambda * alpha * ttilde);
}

double cwf(double x, double t, const CarlemanParams& p) {
    return std::exp(-2.0 * p.lambda * (x + p.alpha * t));
}

InversionDomain::InversionDomain(double cbar_, int nx, int nt) : cbar(cbar_) {
    if (cbar <= 1.0) throw ConfigError("InversionDomain: cbar must be > 1 (c in [1, cbar])");
    a = 1.1 * std::sqrt(cbar);
    ttilde = 2.0 * a;
    grid = UniformGrid2D{UniformGrid1D(0.0, a / nx, nx + 1), UniformGrid1D(0.0, ttilde / nt, nt + 1)};
}

void QField::enforce_constraints() {
    const int nx = q.nx(), nt = q.nt();
    const double hx = q.grid().hx();
    for (int j = 0; j < nt; ++j) {
        q.at(0, j) = s0[j];
        q.at(1, j) = s0[j] + hx * s1[j];
        q.at(nx - 1, j) = q.at(nx - 2, j);
    }
}

void QField::project(GridFn2D& g) const {
    const int nx = g.nx(), nt = g.nt();
    for (int j = 0; j < nt; ++j) {
        g.at(0, j) = 0.0;
        g.at(1, j) = 0.0;
        const double avg = 0.5 * (g.at(nx - 2, j) + g.at(nx - 1, j));
        g.at(nx - 2, j) = avg;
        g.at(nx - 1, j) = avg;
    }
}

double operator_M(const QField& f, int i, int j) {
    const auto& q = f.q;
    const int nx = q.nx(), nt = q.nt();
    if (i < 1 || i > nx - 2 || j < 0 || j > nt - 2)
        throw std::out_of_range("operator_M: index out of range");
    const double hx = q.grid().hx(), ht = q.grid().ht();
    const double dxx = (q.at(i - 1, j) - 2.0 * q.at(i, j) + q.at(i + 1, j)) / (hx * hx);
    const double dxt = ((q.at(i + 1, j + 1) - q.at(i + 1, j)) - (q.at(i, j + 1) - q.at(i, j))) /
                       (hx * ht);
    const double rrow = (q.at(i + 1, 0) - q.at(i, 0)) / hx;
    return dxx - 2.0 * dxt + 4.0 * rrow * q.at(i, j);
}

namespace {

// M * psi over the M index range, zero elsewhere.
GridFn2D weighted_m(const QField& f, const CarlemanParams& p) {
    const auto& q = f.q;
    const int nx = q.nx(), nt = q.nt();
    GridFn2D mp(q.grid(), 0.0);
#pragma omp parallel for schedule(static)
    for (int i = 1; i <= nx - 2; ++i)
        for (int j = 0; j <= nt - 2; ++j)
            mp.at(i, j) = operator_M(f, i, j) * cwf(q.grid().x.node(i), q.grid().t.node(j), p);
    return mp;
}

// Diagonal Gauss-Newton estimate of the Hessian of functional_K.  The
// Carleman weight makes the raw curvature span many orders of magnitude
// across the domain; descent directions are scaled by the inverse of this
// diagonal so every node converges at a comparable rate.
GridFn2D hessian_diagonal(const QField& f, const CarlemanParams& p) {
    const auto& q = f.q;
    const int nx = q.nx(), nt = q.nt();
    const double hx = q.grid().hx(), ht = q.grid().ht();
    const double h = hx * ht;
    const double cxx = 1.0 / (hx * hx), cxt = 2.0 / (hx * ht);
    const double pen = 2.0 * p.gamma * h *
                       (1.0 + 2.0 / (hx * hx) + 2.0 / (ht * ht) + 6.0 / (hx * hx * hx * hx) +
                        6.0 / (ht * ht * ht * ht));
    GridFn2D d(q.grid(), pen);
#pragma omp parallel for schedule(static)
    for (int a = 0; a < nx; ++a) {
        const bool a_mid = a >= 1 && a <= nx - 2;
        const bool a_lo = a - 1 >= 1;
        const bool a_hi = a + 1 <= nx - 2;
        const double rrow = a_mid ? (q.at(a + 1, 0) - q.at(a, 0)) / hx : 0.0;
        const auto psi = [&](int i2, int j2) {
            return cwf(q.grid().x.node(i2), q.grid().t.node(j2), p);
        };
        for (int b = 0; b < nt; ++b) {
            double v = 0.0;
            if (b <= nt - 2) {
                if (a_hi) v += psi(a + 1, b) * cxx * cxx;
                if (a_mid) {
                    const double c0 = -2.0 * cxx - cxt + 4.0 * rrow;
                    v += psi(a, b) * c0 * c0;
                }
                if (a_lo && a - 1 <= nx - 2) {
                    const double c1 = cxx + cxt;
                    v += psi(a - 1, b) * c1 * c1;
                }
            }
            if (b >= 1) {
                if (a_mid) v += psi(a, b - 1) * cxt * cxt;
                if (a_lo && a - 1 <= nx - 2) v += psi(a - 1, b - 1) * cxt * cxt;
            }
            d.at(a, b) += 2.0 * h * v;
        }
    }
    return d;
}

}  // namespace

double functional_K(const QField& f, const CarlemanParams& p) {
    const auto& q = f.q;
    const int nx = q.nx(), nt = q.nt();
    const double h = q.grid().hx() * q.grid().ht();
    std::vector<double> row(nx, 0.0);
#pragma omp parallel for schedule(static)
    for (int i = 1; i <= nx - 2; ++i) {
        double s = 0.0;
        for (int j = 0; j <= nt - 2; ++j) {
            const double m = operator_M(f, i, j);
            s += m * m * cwf(q.grid().x.node(i), q.grid().t.node(j), p);
        }
        row[i] = s;
    }
    const double misfit = pairwise_sum(row.data(), row.size()) * h;
    return misfit + p.gamma * (discrete_l2(q) + discrete_h2_seminorms(q));
}

// Exact derivative of functional_K at every node, written in gather form so
// rows parallelize without write conflicts and the result is independent of
// the thread count.
GridFn2D gradient_K(const QField& f, const CarlemanParams& p, bool project) {
    const auto& q = f.q;
    const int nx = q.nx(), nt = q.nt();
    const double hx = q.grid().hx(), ht = q.grid().ht();
    const double h = hx * ht;
    const GridFn2D mp = weighted_m(f, p);  // M*psi on its index range, else 0
    const double cxx = 1.0 / (hx * hx), cxt = 2.0 / (hx * ht);

    // Row sums of (M psi q) feed the derivative of the 4 q_x(x,0) q factor
    // with respect to the first t-row.
    std::vector<double> wq(nx, 0.0);
#pragma omp parallel for schedule(static)
    for (int i = 1; i <= nx - 2; ++i) {
        double s = 0.0;
        for (int j = 0; j <= nt - 2; ++j) s += mp.at(i, j) * q.at(i, j);
        wq[i] = s;
    }

    GridFn2D g(q.grid(), 0.0);
#pragma omp parallel for schedule(static)
    for (int a = 0; a < nx; ++a) {
        const bool a_mid = a >= 1 && a <= nx - 2;       // M source at (a, .)
        const bool a_lo = a - 1 >= 1 && a - 1 <= nx - 2;  // M source at (a-1, .)
        const bool a_hi = a + 1 <= nx - 2;              // M source at (a+1, .)
        const double rrow = a_mid ? (q.at(a + 1, 0) - q.at(a, 0)) / hx : 0.0;
        for (int b = 0; b < nt; ++b) {
            double v = 0.0;
            // misfit: each source (i', j') touches q(a,b) through the M stencil
            if (b <= nt - 2) {
                if (a_hi) v += mp.at(a + 1, b) * cxx;
                if (a_mid) v += mp.at(a, b) * (-2.0 * cxx - cxt + 4.0 * rrow);
                if (a_lo) v += mp.at(a - 1, b) * (cxx + cxt);
            }
            if (b >= 1) {
                if (a_mid) v += mp.at(a, b - 1) * cxt;
                if (a_lo) v += mp.at(a - 1, b - 1) * (-cxt);
            }
            if (b == 0) v += (4.0 / hx) * ((a >= 1 ? wq[a - 1] : 0.0) - wq[a]);
            v *= 2.0 * h;

            // penalty: L2 term over all nodes
            double w = q.at(a, b);
            // forward x-differences, sources i' in [0, nx-2], j' in [0, nt-2]
            if (b <= nt - 2) {
                if (a <= nx - 2) w -= (q.at(a + 1, b) - q.at(a, b)) / (hx * hx);
                if (a >= 1) w += (q.at(a, b) - q.at(a - 1, b)) / (hx * hx);
            }
            // forward t-differences, same source rectangle
            if (a <= nx - 2) {
                if (b <= nt - 2) w -= (q.at(a, b + 1) - q.at(a, b)) / (ht * ht);
                if (b >= 1) w += (q.at(a, b) - q.at(a, b - 1)) / (ht * ht);
            }
            // central second x-differences, sources i' in [1, nx-2], j' in [1, nt-2]
            if (b >= 1 && b <= nt - 2) {
                const auto sxx = [&](int i2) {
                    return (q.at(i2 - 1, b) - 2.0 * q.at(i2, b) + q.at(i2 + 1, b)) /
                           (hx * hx * hx * hx);
                };
                if (a - 1 >= 1) w += sxx(a - 1);
                if (a >= 1 && a <= nx - 2) w -= 2.0 * sxx(a);
                if (a + 1 <= nx - 2) w += sxx(a + 1);
            }
            // central second t-differences
            if (a >= 1 && a <= nx - 2) {
                const auto stt = [&](int j2) {
                    return (q.at(a, j2 - 1) - 2.0 * q.at(a, j2) + q.at(a, j2 + 1)) /
                           (ht * ht * ht * ht);
                };
                if (b - 1 >= 1) w += stt(b - 1);
                if (b >= 1 && b <= nt - 2) w -= 2.0 * stt(b);
                if (b + 1 <= nt - 2) w += stt(b + 1);
            }
            g.at(a, b) = v + 2.0 * p.gamma * h * w;
        }
    }
    if (project) f.project(g);
    return g;
}

QField initial_guess(const DerivedData& data, const InversionDomain& dom) {
    const auto& grid = dom.grid;
    QField f;
    f.q = GridFn2D(grid, 0.0);
    f.s0.resize(grid.nt());
    f.s1.resize(grid.nt());
    for (int j = 0; j < grid.nt(); ++j) {
        f.s0[j] = data.s0(grid.t.node(j));
        f.s1[j] = data.s1(grid.t.node(j));
    }
#pragma omp parallel for schedule(static)
    for (int i = 0; i < grid.nx(); ++i) {
        const double x = grid.x.node(i);
        const int n = std::max(4, 4 * i);  // even Simpson interval count
        const double hs = 2.0 * x / n;
        for (int j = 0; j < grid.nt(); ++j) {
            const double t = grid.t.node(j);
            double integral = 0.0;
            if (x > 0.0) {
                double s = data.s1(t) + data.s1(t + 2.0 * x);
                for (int k = 1; k < n; ++k)
                    s += (k % 2 ? 4.0 : 2.0) * data.s1(t + k * hs);
                integral = s * hs / 3.0;
            }
            f.q.at(i, j) = data.s0(t) + 0.5 * integral;
        }
    }
    f.enforce_constraints();
    return f;
}

std::pair<QField, DescentTrace> gdm_minimize(QField q0, const CarlemanParams& p, double step,
                                             const StoppingRule& caps) {
    if (step <= 0.0) throw ConfigError("gdm_minimize: step must be > 0");
    q0.enforce_constraints();

    DescentTrace trace;
    double k_val = functional_K(q0, p);
    GridFn2D grad = gradient_K(q0, p);
    auto inf_norm = [](const GridFn2D& g) {
        double m = 0.0;
        for (double v : g.data()) m = std::max(m, std::fabs(v));
        return m;
    };
    double gnorm = inf_norm(grad);
    const double k_stop = caps.functional_drop * std::fabs(k_val);
    const double g_stop = caps.gradient_drop * gnorm;
    trace.steps.push_back({0, k_val, gnorm, step, std::sqrt(discrete_l2(q0.q))});

    const double base_step = step;
    QField cur = std::move(q0);
    GridFn2D dir = grad;
    const auto precondition = [&](const QField& at, const GridFn2D& g, GridFn2D& out) {
        const GridFn2D diag = hessian_diagonal(at, p);
        for (size_t k = 0; k < g.data().size(); ++k) out.data()[k] = g.data()[k] / diag.data()[k];
        at.project(out);
    };
    precondition(cur, grad, dir);
    for (int it = 1; it <= caps.max_iter; ++it) {
        if (std::fabs(k_val) <= k_stop && gnorm <= g_stop) break;
        step = std::min(base_step, 2.0 * step);  // recover after backtracking
        QField trial = cur;
        double k_trial = 0.0;
        for (;;) {
            for (size_t k = 0; k < trial.q.data().size(); ++k)
                trial.q.data()[k] = cur.q.data()[k] - step * dir.data()[k];
            k_trial = functional_K(trial, p);
            if (k_trial <= k_val) break;
            step *= 0.5;
            if (step < 1e-12)
                throw NumericalError("gdm_minimize: step underflow after " +
                                     std::to_string(it - 1) + " accepted iterations, K = " +
                                     std::to_string(k_val));
        }
        cur = std::move(trial);
        k_val = k_trial;
        grad = gradient_K(cur, p);
        gnorm = inf_norm(grad);
        precondition(cur, grad, dir);
        trace.steps.push_back({it, k_val, gnorm, step, std::sqrt(discrete_l2(cur.q))});
    }
    return {std::move(cur), std::move(trace)};
}

PotentialProfile extract_r(const QField& f) {
    const auto& q = f.q;
    const int nx = q.nx();
    const double hx = q.grid().hx();
    // The forward difference of the first t-row is a second-order
    // approximation of q_x at the cell midpoint, so the coarse profile lives
    // on the midpoint grid; assigning it to the left node instead shifts the
    // whole profile by hx/2 and visibly biases the recovered dip location.
    GridFn1D coarse(UniformGrid1D(0.5 * hx, hx, nx - 1));
    for (int i = 0; i + 1 < nx; ++i)
        coarse.values[i] = 4.0 * (q.at(i + 1, 0) - q.at(i, 0)) / hx;
    PotentialProfile out;
    std::vector<double> xm(coarse.grid.count);
    for (int i = 0; i < coarse.grid.count; ++i) xm[i] = coarse.grid.node(i);
    CubicSpline spline(xm, coarse.values);
    out.refined = GridFn1D(UniformGrid1D::over(0.0, q.grid().x.back(), kRefinedNodes));
    // the half-cell margins at x = 0 and x = a use the spline's end segments
    for (int i = 0; i < out.refined.grid.count; ++i)
        out.refined.values[i] = spline(out.refined.grid.node(i));
    out.coarse = std::move(coarse);
    return out;
}

double relative_l2_error(const GridFn1D& f, const GridFn1D& g, double x_hi) {
    std::vector<double> gx(g.grid.count);
    for (int i = 0; i < g.grid.count; ++i) gx[i] = g.grid.node(i);
    CubicSpline gs(gx, g.values);
    double num = 0.0, den = 0.0;
    for (int i = 0; i < f.grid.count; ++i) {
        const double x = f.grid.node(i);
        if (x > x_hi || x < gs.x_min() || x > gs.x_max()) continue;
        const double gv = gs(x);
        num += (f.values[i] - gv) * (f.values[i] - gv);
        den += gv * gv;
    }
    if (den == 0.0) return num == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    return std::sqrt(num / den);
}

namespace reference {

double functional_K(const QField& f, const CarlemanParams& p) {
    const auto& q = f.q;
    const int nx = q.nx(), nt = q.nt();
    const double hx = q.grid().hx(), ht = q.grid().ht();
    const double h = hx * ht;
    double total = 0.0;
    for (int i = 1; i <= nx - 2; ++i)
        for (int j = 0; j <= nt - 2; ++j) {
            const double m = operator_M(f, i, j);
            total += m * m * cwf(q.grid().x.node(i), q.grid().t.node(j), p) * h;
        }
    for (int i = 0; i < nx; ++i)
        for (int j = 0; j < nt; ++j) total += p.gamma * q.at(i, j) * q.at(i, j) * h;
    for (int i = 0; i <= nx - 2; ++i)
        for (int j = 0; j <= nt - 2; ++j) {
            const double dx = (q.at(i + 1, j) - q.at(i, j)) / hx;
            const double dt = (q.at(i, j + 1) - q.at(i, j)) / ht;
            total += p.gamma * (dx * dx + dt * dt) * h;
        }
    for (int i = 1; i <= nx - 2; ++i)
        for (int j = 1; j <= nt - 2; ++j) {
            const double dxx = (q.at(i - 1, j) - 2.0 * q.at(i, j) + q.at(i + 1, j)) / (hx * hx);
            const double dtt = (q.at(i, j - 1) - 2.0 * q.at(i, j) + q.at(i, j + 1)) / (ht * ht);
            total += p.gamma * (dxx * dxx + dtt * dtt) * h;
        }
    return total;
}

GridFn2D gradient_K(const QField& f, const CarlemanParams& p, bool project) {
    const auto& q = f.q;
    const int nx = q.nx(), nt = q.nt();
    const double hx = q.grid().hx(), ht = q.grid().ht();
    const double h = hx * ht;
    GridFn2D g(q.grid(), 0.0);

    // adjoint-mode scatter over the misfit sum
    for (int i = 1; i <= nx - 2; ++i)
        for (int j = 0; j <= nt - 2; ++j) {
            const double w =
                2.0 * h * operator_M(f, i, j) * cwf(q.grid().x.node(i), q.grid().t.node(j), p);
            const double cxx = 1.0 / (hx * hx), cxt = 2.0 / (hx * ht);
            const double rrow = (q.at(i + 1, 0) - q.at(i, 0)) / hx;
            g.at(i - 1, j) += w * cxx;
            g.at(i, j) += w * (-2.0 * cxx - cxt + 4.0 * rrow);
            g.at(i + 1, j) += w * (cxx + cxt);
            g.at(i, j + 1) += w * cxt;
            g.at(i + 1, j + 1) += w * (-cxt);
            g.at(i + 1, 0) += w * (4.0 / hx) * q.at(i, j);
            g.at(i, 0) += w * (-4.0 / hx) * q.at(i, j);
        }
    // adjoint of the penalty sums
    for (int i = 0; i < nx; ++i)
        for (int j = 0; j < nt; ++j) g.at(i, j) += 2.0 * p.gamma * h * q.at(i, j);
    for (int i = 0; i <= nx - 2; ++i)
        for (int j = 0; j <= nt - 2; ++j) {
            const double cx = 2.0 * p.gamma * h * (q.at(i + 1, j) - q.at(i, j)) / (hx * hx);
            g.at(i + 1, j) += cx;
            g.at(i, j) -= cx;
            const double ct = 2.0 * p.gamma * h * (q.at(i, j + 1) - q.at(i, j)) / (ht * ht);
            g.at(i, j + 1) += ct;
            g.at(i, j) -= ct;
        }
    for (int i = 1; i <= nx - 2; ++i)
        for (int j = 1; j <= nt - 2; ++j) {
            const double cxx = 2.0 * p.gamma * h *
                               (q.at(i - 1, j) - 2.0 * q.at(i, j) + q.at(i + 1, j)) /
                               (hx * hx * hx * hx);
            g.at(i - 1, j) += cxx;
            g.at(i, j) -= 2.0 * cxx;
            g.at(i + 1, j) += cxx;
            const double ctt = 2.0 * p.gamma * h *
                               (q.at(i, j - 1) - 2.0 * q.at(i, j) + q.at(i, j + 1)) /
                               (ht * ht * ht * ht);
            g.at(i, j - 1) += ctt;
            g.at(i, j) -= 2.0 * ctt;
            g.at(i, j + 1) += ctt;
        }
    if (project) f.project(g);
    return g;
}

}  // namespace reference

}  // namespace cip
