#include "cip/wave_forward.hpp"

#include <algorithm>
#include <cmath>

#include "cip/errors.hpp"
#include "cip/kernels.hpp"
#include "cip/spline.hpp"

namespace cip {

double TimeSeries::max_abs() const {
    double m = 0.0;
    for (double v : samples) m = std::max(m, std::fabs(v));
    return m;
}

double DielectricModel::value(double y) const {
    switch (kind) {
        case Kind::constant:
            return amplitude;
        case Kind::single_gaussian: {
            const double wc = 2.0 * std::sqrt(2.0 * std::log(2.0)) * widths[0];
            const double d = y - centers[0];
            const double s = 1.0 - amplitude * std::exp(-d * d / (2.0 * wc * wc));
            return 1.0 / (s * s);
        }
        case Kind::double_gaussian: {
            const double k = 2.0 * std::sqrt(2.0 * std::log(2.0));
            double dip = 0.0;
            for (size_t m = 0; m < 2; ++m) {
                const double wc = k * widths[m];
                const double d = y - centers[m];
                dip += amplitude * std::exp(-d * d / (2.0 * wc * wc));
            }
            const double s = 1.0 - dip;
            return 1.0 / (s * s);
        }
        case Kind::tabulated: {
            const auto& f = *tabulated;
            if (y <= f.grid.start) return f.values.front();
            if (y >= f.grid.back()) return f.values.back();
            const int i = std::min(static_cast<int>((y - f.grid.start) / f.grid.step),
                                   f.grid.count - 2);
            const double w = (y - f.grid.node(i)) / f.grid.step;
            return (1.0 - w) * f.values[i] + w * f.values[i + 1];
        }
    }
    return 1.0;
}

double DielectricModel::max_value() const {
    double m = 1.0;
    for (int k = 0; k <= 2000; ++k) m = std::max(m, value(k / 2000.0));
    return m;
}

DielectricModel DielectricModel::constant_model(double c, double cbar) {
    DielectricModel m;
    m.kind = Kind::constant;
    m.amplitude = c;
    m.cbar = cbar;
    return m;
}

DielectricModel DielectricModel::gaussian(double amplitude, double width, double center,
                                          double cbar) {
    DielectricModel m;
    m.kind = Kind::single_gaussian;
    m.amplitude = amplitude;
    m.widths = {width};
    m.centers = {center};
    m.cbar = cbar;
    return m;
}

DielectricModel DielectricModel::two_gaussians(double amplitude, double w1, double c1, double w2,
                                               double c2, double cbar) {
    DielectricModel m;
    m.kind = Kind::double_gaussian;
    m.amplitude = amplitude;
    m.widths = {w1, w2};
    m.centers = {c1, c2};
    m.cbar = cbar;
    return m;
}

WaveField solve_forward(const DielectricModel& model, const ForwardConfig& cfg) {
    const int ny = cfg.ny, nt = cfg.nt;
    const double hy = 2.0 * cfg.ytilde / ny;
    const double ht = cfg.duration / nt;

    double cmax = 1.0;
    std::vector<double> inv_c(ny + 1);
    for (int i = 0; i <= ny; ++i) {
        const double y = -cfg.ytilde + i * hy;
        // The analytic profiles have infinite Gaussian tails; the simulated
        // medium is the background outside the unit target strip.
        double c = model.value(y);
        if (model.kind == DielectricModel::Kind::single_gaussian ||
            model.kind == DielectricModel::Kind::double_gaussian) {
            if (y <= 0.0 || y >= 1.0) c = 1.0;
        }
        cmax = std::max(cmax, c);
        inv_c[i] = 1.0 / c;
    }
    if (ht * std::sqrt(cmax) > hy * (1.0 + 1e-12))
        throw ConfigError("solve_forward: CFL violated, need h_t*sqrt(max c) <= h_y = " +
                          std::to_string(hy) + " but h_t*sqrt(max c) = " +
                          std::to_string(ht * std::sqrt(cmax)));

    WaveField field{UniformGrid2D{UniformGrid1D(-cfg.ytilde, hy, ny + 1),
                                  UniformGrid1D(0.0, ht, nt + 1)},
                    GridFn2D{}};
    field.u = GridFn2D(field.grid);

    // Unit-mass Gaussian source: matches the delta-source amplitude so that
    // the c == 1 trace plateaus at 1/2.
    const double norm = std::sqrt(cfg.source_width / M_PI);
    std::vector<double> src(ny + 1);
    for (int i = 0; i <= ny; ++i) {
        const double y = field.grid.x.node(i);
        src[i] = norm * std::exp(-cfg.source_width * y * y);
    }

    std::vector<double> prev(ny + 1, 0.0), cur(ny + 1), next(ny + 1);
    for (int i = 0; i <= ny; ++i) cur[i] = ht * src[i];  // Taylor first step, u(y,0) = 0
    for (int i = 0; i <= ny; ++i) {
        field.u.at(i, 0) = 0.0;
        field.u.at(i, 1) = cur[i];
    }

    const double r2 = (ht * ht) / (hy * hy);
    const double wsum = 1.0 / hy + 1.0 / ht;
    for (int j = 2; j <= nt; ++j) {
        kernels::wave_step(prev.data(), cur.data(), next.data(), inv_c.data(), ny + 1, r2);
        // one-sided absorbing updates: u_y - u_t = 0 on the left, + on the right
        next[0] = (next[1] / hy + cur[0] / ht) / wsum;
        next[ny] = (next[ny - 1] / hy + cur[ny] / ht) / wsum;
        for (int i = 0; i <= ny; ++i) field.u.at(i, j) = next[i];
        std::swap(prev, cur);
        std::swap(cur, next);
    }
    if (!field.u.all_finite()) throw NumericalError("solve_forward: solution blew up");
    return field;
}

BoundaryData extract_boundary_data(const WaveField& field) {
    const auto& g = field.grid;
    const double hy = g.x.step;
    // y = 0 must be a grid node
    const double fi = -g.x.start / hy;
    const int m = static_cast<int>(std::lround(fi));
    if (m < 2 || m >= g.nx() || std::fabs(fi - m) > 1e-9)
        throw ConfigError("extract_boundary_data: y = 0 is not a grid node");

    BoundaryData bd;
    bd.g0.t0 = bd.g1.t0 = 0.0;
    bd.g0.dt = bd.g1.dt = g.t.step;
    bd.g0.samples.resize(g.nt());
    bd.g1.samples.resize(g.nt());
    for (int j = 0; j < g.nt(); ++j) {
        bd.g0.samples[j] = field.u.at(m, j);
        // second-order one-sided difference from the source side (y < 0)
        bd.g1.samples[j] =
            (3.0 * field.u.at(m, j) - 4.0 * field.u.at(m - 1, j) + field.u.at(m - 2, j)) /
            (2.0 * hy);
    }
    return bd;
}

double absorbing_residual(const WaveField& field, Side side) {
    const auto& g = field.grid;
    const double hy = g.x.step, ht = g.t.step;
    const int n = g.nx() - 1;
    double max_res = 0.0, max_ut = 0.0;
    for (int j = 1; j + 1 < g.nt(); ++j) {
        const double ut = (side == Side::right)
                              ? (field.u.at(n, j + 1) - field.u.at(n, j - 1)) / (2.0 * ht)
                              : (field.u.at(0, j + 1) - field.u.at(0, j - 1)) / (2.0 * ht);
        const double uy =
            (side == Side::right)
                ? (3.0 * field.u.at(n, j) - 4.0 * field.u.at(n - 1, j) + field.u.at(n - 2, j)) /
                      (2.0 * hy)
                : (-3.0 * field.u.at(0, j) + 4.0 * field.u.at(1, j) - field.u.at(2, j)) /
                      (2.0 * hy);
        const double res = (side == Side::right) ? uy + ut : uy - ut;
        max_res = std::max(max_res, std::fabs(res));
        max_ut = std::max(max_ut, std::fabs(ut));
    }
    if (max_ut == 0.0) return 0.0;
    return max_res / max_ut;
}

GridFn1D travel_time_map(const DielectricModel& model, const UniformGrid1D& ygrid) {
    GridFn1D x(ygrid);
    x.values[0] = 0.0;
    const double h = ygrid.step;
    for (int k = 0; k + 1 < ygrid.count; ++k) {
        const double yl = ygrid.node(k), ym = yl + 0.5 * h, yr = ygrid.node(k + 1);
        const double inc = (h / 6.0) * (std::sqrt(model.value(yl)) +
                                        4.0 * std::sqrt(model.value(ym)) +
                                        std::sqrt(model.value(yr)));
        x.values[k + 1] = x.values[k] + inc;
    }
    return x;
}

double travel_time_to_depth_one(const DielectricModel& model) {
    auto map = travel_time_map(model, UniformGrid1D::over(0.0, 1.0, 2001));
    return map.values.back();
}

GridFn1D true_potential(const DielectricModel& model, const UniformGrid1D& xgrid,
                        int aux_refine) {
    // Sample the travel-time map on a wide dense y range and invert it by a
    // monotone spline of y against x.
    const double pad = 0.25;
    const double y_hi = 1.0 + xgrid.back() + pad;
    const int ny = std::max(4001, 2000 * aux_refine + 1);
    std::vector<double> ys(ny), xs(ny);
    const double y_lo = -pad;
    const double hy = (y_hi - y_lo) / (ny - 1);
    // extend the map to negative y where c = 1 exactly
    double acc = y_lo;  // x(y_lo) = y_lo since c = 1 for y <= 0
    for (int k = 0; k < ny; ++k) {
        ys[k] = y_lo + k * hy;
        if (k > 0) {
            const double yl = ys[k - 1], ym = yl + 0.5 * hy, yr = ys[k];
            acc += (hy / 6.0) * (std::sqrt(model.value(yl)) + 4.0 * std::sqrt(model.value(ym)) +
                                 std::sqrt(model.value(yr)));
        }
        xs[k] = acc;
    }
    CubicSpline y_of_x(xs, ys);

    // S(x) = c(y(x))^(-1/4) on a finer auxiliary grid, differentiated by
    // central differences.
    const int na = aux_refine * xgrid.count + 3;
    const double ha = (xgrid.back() - xgrid.start + 2.0 * xgrid.step) / (na - 1);
    std::vector<double> S(na), xa(na);
    for (int k = 0; k < na; ++k) {
        xa[k] = xgrid.start - xgrid.step + k * ha;
        S[k] = std::pow(model.value(y_of_x(xa[k])), -0.25);
    }
    std::vector<double> xr(na - 2), rr(na - 2);
    for (int k = 1; k + 1 < na; ++k) {
        const double S1 = (S[k + 1] - S[k - 1]) / (2.0 * ha);
        const double S2 = (S[k + 1] - 2.0 * S[k] + S[k - 1]) / (ha * ha);
        xr[k - 1] = xa[k];
        rr[k - 1] = S2 / S[k] - 2.0 * (S1 / S[k]) * (S1 / S[k]);
    }
    CubicSpline r_spline(xr, rr);
    GridFn1D out(xgrid);
    for (int i = 0; i < xgrid.count; ++i) out.values[i] = r_spline(xgrid.node(i));
    return out;
}

}  // namespace cip
