#include "cip/recover.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "cip/errors.hpp"
#include "cip/spline.hpp"

namespace cip {

namespace {

double max_abs(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::fabs(x));
    return m;
}

CubicSpline spline_of(const GridFn1D& f) {
    std::vector<double> x(f.grid.count);
    for (int i = 0; i < f.grid.count; ++i) x[i] = f.grid.node(i);
    return CubicSpline(x, f.values);
}

// Dense Cholesky solve of an SPD system; returns false when not SPD.
bool cholesky_solve(std::vector<double>& A, std::vector<double>& b, int n) {
    for (int k = 0; k < n; ++k) {
        double d = A[k * n + k];
        for (int m = 0; m < k; ++m) d -= A[k * n + m] * A[k * n + m];
        if (d <= 0.0) return false;
        d = std::sqrt(d);
        A[k * n + k] = d;
        for (int i = k + 1; i < n; ++i) {
            double s = A[i * n + k];
            for (int m = 0; m < k; ++m) s -= A[i * n + m] * A[k * n + m];
            A[i * n + k] = s / d;
        }
    }
    for (int i = 0; i < n; ++i) {
        double s = b[i];
        for (int m = 0; m < i; ++m) s -= A[i * n + m] * b[m];
        b[i] = s / A[i * n + i];
    }
    for (int i = n - 1; i >= 0; --i) {
        double s = b[i];
        for (int m = i + 1; m < n; ++m) s -= A[m * n + i] * b[m];
        b[i] = s / A[i * n + i];
    }
    return true;
}

}  // namespace

IntervalPartition segment_intervals(const GridFn1D& r, double threshold, int min_nodes) {
    const int n = r.grid.count;
    const double band = threshold * max_abs(r.values);
    IntervalPartition part;
    part.grid = r.grid;

    std::vector<bool> pos(n);
    for (int i = 0; i < n; ++i) pos[i] = r.values[i] > band && band > 0.0;

    // raw runs; abutting intervals share the boundary node
    std::vector<SignInterval> runs;
    int start = 0;
    for (int i = 1; i <= n; ++i) {
        if (i == n || pos[i] != pos[start]) {
            runs.push_back({start, i - 1, pos[start]});
            start = i;
        }
    }
    // merge short runs into their (preceding, else following) neighbor
    bool merged = true;
    while (merged && runs.size() > 1) {
        merged = false;
        for (size_t k = 0; k < runs.size(); ++k) {
            if (runs[k].hi - runs[k].lo + 1 < min_nodes) {
                const size_t into = k > 0 ? k - 1 : k + 1;
                runs[into].lo = std::min(runs[into].lo, runs[k].lo);
                runs[into].hi = std::max(runs[into].hi, runs[k].hi);
                runs.erase(runs.begin() + k);
                // re-merge adjacent runs of equal sign
                for (size_t m = 0; m + 1 < runs.size();) {
                    if (runs[m].positive == runs[m + 1].positive) {
                        runs[m].hi = runs[m + 1].hi;
                        runs.erase(runs.begin() + m + 1);
                    } else {
                        ++m;
                    }
                }
                merged = true;
                break;
            }
        }
    }
    part.intervals = std::move(runs);
    return part;
}

RkSegment rk_advance(const GridFn1D& r, const SignInterval& interval, double p0, double dp0) {
    if (p0 <= 0.0) throw NumericalError("rk_advance: initial p must be positive");
    const CubicSpline rs = spline_of(r);
    const double h = r.grid.step;
    const auto accel = [&](double x, double p, double v) {
        if (p <= 0.0) {
            std::ostringstream os;
            os << "rk_advance: p reached " << p << " at x = " << x;
            throw NumericalError(os.str());
        }
        const double xc = std::clamp(x, rs.x_min(), rs.x_max());
        return 2.0 * rs(xc) * p + 1.5 * v * v / p;
    };

    RkSegment seg;
    double p = p0, v = dp0;
    seg.p.push_back(p);
    for (int i = interval.lo; i < interval.hi; ++i) {
        const double x = r.grid.node(i);
        const double k1p = v, k1v = accel(x, p, v);
        const double k2p = v + 0.5 * h * k1v, k2v = accel(x + 0.5 * h, p + 0.5 * h * k1p, k2p);
        const double k3p = v + 0.5 * h * k2v, k3v = accel(x + 0.5 * h, p + 0.5 * h * k2p, k3p);
        const double k4p = v + h * k3v, k4v = accel(x + h, p + h * k3p, k4p);
        p += (h / 6.0) * (k1p + 2.0 * k2p + 2.0 * k3p + k4p);
        v += (h / 6.0) * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
        if (p <= 0.0) {
            std::ostringstream os;
            os << "rk_advance: p became non-positive at x = " << r.grid.node(i + 1);
            throw NumericalError(os.str());
        }
        seg.p.push_back(p);
    }
    seg.dp_end = v;
    return seg;
}

WlsSegment wls_fit(const GridFn1D& r, const SignInterval& interval, double p0, double dp0,
                   double d2p0, double rho) {
    const double h = r.grid.step;
    const int n = interval.hi - interval.lo + 1;
    const double b1 = r.grid.node(interval.lo);
    const double L = h * (n - 1);

    WlsSegment seg;
    // left-end triple eliminated by substitution (Taylor at b1)
    std::vector<double> p(n);
    p[0] = p0;
    if (n > 1) p[1] = p0 + h * dp0 + 0.5 * h * h * d2p0;
    if (n > 2) p[2] = p0 + 2.0 * h * dp0 + 2.0 * h * h * d2p0;
    // cubic initial guess hitting 1 at the right end
    const double C = (1.0 - (p0 + dp0 * L + 0.5 * d2p0 * L * L)) / (L * L * L);
    for (int k = 3; k < n; ++k) {
        const double xi = k * h;
        p[k] = p0 + dp0 * xi + 0.5 * d2p0 * xi * xi + C * xi * xi * xi;
    }
    if (n <= 4) {  // nothing (or nearly nothing) to fit beyond the pinned values
        seg.p = std::move(p);
        return seg;
    }

    const int nu = n - 3;  // unknowns p[3..n-1]
    const auto node_x = [&](int k) { return b1 + k * h; };
    const auto weight = [&](int k) { return std::exp(-2.0 * rho * (node_x(k) - b1)) * h; };
    // residual of the recovery ODE multiplied through by p^2 so that it is
    // polynomial in the nodal values: p''p/2 - (3/4)(p')^2 - r p^2
    const auto cost = [&](const std::vector<double>& pp) {
        double s = 0.0;
        for (int k = 1; k + 1 < n; ++k) {
            const double d2 = (pp[k + 1] - 2.0 * pp[k] + pp[k - 1]) / (h * h);
            const double d1 = (pp[k + 1] - pp[k - 1]) / (2.0 * h);
            const double f = d2 * pp[k] / 2.0 - 0.75 * d1 * d1 -
                             r.values[interval.lo + k] * pp[k] * pp[k];
            s += weight(k) * f * f;
        }
        return s;
    };

    double mu = 1e-4;
    double fcur = cost(p);
    bool converged = false;
    for (int it = 0; it < 200 && !converged; ++it) {
        std::vector<double> JtJ(static_cast<size_t>(nu) * nu, 0.0), Jtr(nu, 0.0);
        for (int k = 1; k + 1 < n; ++k) {
            const double d2 = (p[k + 1] - 2.0 * p[k] + p[k - 1]) / (h * h);
            const double d1 = (p[k + 1] - p[k - 1]) / (2.0 * h);
            const double rk = r.values[interval.lo + k];
            const double f = d2 * p[k] / 2.0 - 0.75 * d1 * d1 - rk * p[k] * p[k];
            const double w = weight(k);
            // derivative triples w.r.t. p[k-1], p[k], p[k+1]
            const double Jm = p[k] / (2.0 * h * h) + 0.75 * d1 / h;
            const double Jc = d2 / 2.0 - p[k] / (h * h) - 2.0 * rk * p[k];
            const double Jp = p[k] / (2.0 * h * h) - 0.75 * d1 / h;
            const int cols[3] = {k - 1 - 3, k - 3, k + 1 - 3};
            const double vals[3] = {Jm, Jc, Jp};
            for (int a = 0; a < 3; ++a) {
                if (cols[a] < 0 || cols[a] >= nu) continue;
                Jtr[cols[a]] += w * vals[a] * f;
                for (int b = 0; b < 3; ++b) {
                    if (cols[b] < 0 || cols[b] >= nu) continue;
                    JtJ[static_cast<size_t>(cols[a]) * nu + cols[b]] += w * vals[a] * vals[b];
                }
            }
        }
        bool stepped = false;
        for (int tries = 0; tries < 40 && !stepped; ++tries) {
            auto A = JtJ;
            std::vector<double> rhs(nu);
            for (int a = 0; a < nu; ++a) {
                A[static_cast<size_t>(a) * nu + a] += mu * (JtJ[static_cast<size_t>(a) * nu + a] + 1e-14);
                rhs[a] = -Jtr[a];
            }
            if (!cholesky_solve(A, rhs, nu)) {
                mu *= 10.0;
                continue;
            }
            auto trial = p;
            bool positive = true;
            for (int a = 0; a < nu; ++a) {
                trial[a + 3] += rhs[a];
                if (trial[a + 3] <= 0.0) positive = false;
            }
            const double ftrial = positive ? cost(trial) : fcur + 1.0;
            if (positive && ftrial <= fcur) {
                const double steplen = max_abs(rhs);
                p = std::move(trial);
                if (steplen < 1e-9 * (1.0 + max_abs(p))) converged = true;
                fcur = ftrial;
                mu = std::max(mu / 3.0, 1e-14);
                stepped = true;
            } else {
                mu *= 2.0;
            }
        }
        if (!stepped) converged = true;  // damping saturated
    }
    seg.p = std::move(p);
    seg.residual = fcur;
    seg.converged = converged;
    return seg;
}

double rho_star(double l) {
    if (l <= 0.0) throw std::invalid_argument("rho_star: interval length must be > 0");
    return (2.1457 / l + 2.1081 / l + 14.40) / 2.0;
}

DepthMap integrate_depth(const GridFn1D& ptilde) {
    const CubicSpline ps = spline_of(ptilde);
    const double h = ptilde.grid.step;
    DepthMap out;
    out.y = GridFn1D(ptilde.grid);
    out.y.values[0] = 0.0;
    out.x_stop = ptilde.grid.back();
    bool stopped = false;
    for (int k = 0; k + 1 < ptilde.grid.count; ++k) {
        const double xm = ptilde.grid.node(k) + 0.5 * h;
        const double inc =
            (h / 6.0) * (ptilde.values[k] + 4.0 * ps(xm) + ptilde.values[k + 1]);
        out.y.values[k + 1] = out.y.values[k] + inc;
        if (!stopped && out.y.values[k + 1] >= 1.0) {
            const double frac = (1.0 - out.y.values[k]) / inc;
            out.x_stop = ptilde.grid.node(k) + frac * h;
            stopped = true;
        }
    }
    return out;
}

DielectricProfile run_algorithm2(const GridFn1D& r_refined, const RecoveryOptions& opts) {
    const auto part = segment_intervals(r_refined, opts.deadband, opts.min_interval_nodes);
    const double h = r_refined.grid.step;

    std::vector<double> p;
    DielectricProfile out;
    double pv = 1.0, dp = 0.0, d2p = 0.0;
    const CubicSpline rs = spline_of(r_refined);
    for (const auto& iv : part.intervals) {
        IntervalReport rep;
        rep.x_lo = r_refined.grid.node(iv.lo);
        rep.x_hi = r_refined.grid.node(iv.hi);
        rep.positive = iv.positive;
        std::vector<double> seg_p;
        try {
            if (!iv.positive) {
                auto seg = rk_advance(r_refined, iv, pv, dp);
                seg_p = std::move(seg.p);
                dp = seg.dp_end;
                pv = seg_p.back();
                d2p = 2.0 * rs(std::clamp(rep.x_hi, rs.x_min(), rs.x_max())) * pv +
                      1.5 * dp * dp / pv;
            } else {
                const double l = rep.x_hi - rep.x_lo;
                rep.rho = opts.rho_override.value_or(rho_star(l));
                auto seg = wls_fit(r_refined, iv, pv, dp, d2p, rep.rho);
                rep.residual = seg.residual;
                rep.converged = seg.converged;
                seg_p = std::move(seg.p);
                const int n = static_cast<int>(seg_p.size());
                pv = seg_p.back();
                if (n >= 3) {
                    dp = (3.0 * seg_p[n - 1] - 4.0 * seg_p[n - 2] + seg_p[n - 3]) / (2.0 * h);
                    d2p = (seg_p[n - 1] - 2.0 * seg_p[n - 2] + seg_p[n - 3]) / (h * h);
                }
            }
        } catch (const NumericalError& e) {
            std::ostringstream os;
            os << e.what() << " (interval [" << rep.x_lo << ", " << rep.x_hi << "])";
            throw NumericalError(os.str());
        }
        if (p.empty())
            p = std::move(seg_p);
        else
            p.insert(p.end(), seg_p.begin() + 1, seg_p.end());
        out.intervals.push_back(rep);
    }

    for (double v : p)
        if (!std::isfinite(v) || v <= 0.0)
            throw NumericalError("run_algorithm2: profile left the admissible range (p~ must stay "
                                 "finite and positive); the potential is too strong for the "
                                 "assumed background start");

    GridFn1D ptilde(UniformGrid1D(r_refined.grid.start, h, static_cast<int>(p.size())), p);
    const DepthMap depth = integrate_depth(ptilde);
    out.x_stop = depth.x_stop;

    // tabulate c(y) = p~^(-2) on a uniform y grid over [0,1]
    std::vector<double> yk, ck;
    for (int k = 0; k < ptilde.grid.count; ++k) {
        if (k > 0 && depth.y.values[k] <= yk.back()) continue;
        yk.push_back(depth.y.values[k]);
        ck.push_back(1.0 / (ptilde.values[k] * ptilde.values[k]));
        if (depth.y.values[k] > 1.0) break;
    }
    if (yk.size() < 2) throw NumericalError("run_algorithm2: depth map degenerate");
    CubicSpline cy(yk, ck);
    out.c = GridFn1D(UniformGrid1D::over(0.0, 1.0, opts.y_nodes));
    for (int k = 0; k < opts.y_nodes; ++k) {
        const double y = std::clamp(out.c.grid.node(k), cy.x_min(), cy.x_max());
        out.c.values[k] = cy(y);
    }
    out.max_c = *std::max_element(out.c.values.begin(), out.c.values.end());
    out.min_c = *std::min_element(out.c.values.begin(), out.c.values.end());
    return out;
}

std::pair<double, double> estimate_epsilon(const DielectricProfile& c, double background_lo,
                                           double background_hi, EpsilonMode mode) {
    if (background_lo > background_hi)
        throw ConfigError("estimate_epsilon: background interval reversed");
    const double v = mode == EpsilonMode::max ? c.max_c : c.min_c;
    return {v * background_lo, v * background_hi};
}

}  // namespace cip
