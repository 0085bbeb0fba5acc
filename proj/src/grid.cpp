#include "cip/grid.hpp"

namespace cip {

namespace {

void require(bool ok, const char* what) {
    if (!ok) throw std::out_of_range(what);
}

}  // namespace

double dx_forward(const GridFn2D& f, int i, int j) {
    require(i >= 0 && i + 1 < f.nx() && j >= 0 && j < f.nt(), "dx_forward: index out of range");
    return (f.at(i + 1, j) - f.at(i, j)) / f.grid().hx();
}

double dt_forward(const GridFn2D& f, int i, int j) {
    require(i >= 0 && i < f.nx() && j >= 0 && j + 1 < f.nt(), "dt_forward: index out of range");
    return (f.at(i, j + 1) - f.at(i, j)) / f.grid().ht();
}

double dxx_central(const GridFn2D& f, int i, int j) {
    require(i >= 1 && i + 1 < f.nx() && j >= 0 && j < f.nt(), "dxx_central: index out of range");
    const double hx = f.grid().hx();
    return (f.at(i - 1, j) - 2.0 * f.at(i, j) + f.at(i + 1, j)) / (hx * hx);
}

double dtt_central(const GridFn2D& f, int i, int j) {
    require(i >= 0 && i < f.nx() && j >= 1 && j + 1 < f.nt(), "dtt_central: index out of range");
    const double ht = f.grid().ht();
    return (f.at(i, j - 1) - 2.0 * f.at(i, j) + f.at(i, j + 1)) / (ht * ht);
}

double dxt_forward(const GridFn2D& f, int i, int j) {
    require(i >= 0 && i + 1 < f.nx() && j >= 0 && j + 1 < f.nt(),
            "dxt_forward: index out of range");
    const double hh = f.grid().hx() * f.grid().ht();
    return ((f.at(i + 1, j + 1) - f.at(i + 1, j)) - (f.at(i, j + 1) - f.at(i, j))) / hh;
}

double pairwise_sum(const double* v, size_t n) {
    if (n <= 8) {
        double s = 0.0;
        for (size_t k = 0; k < n; ++k) s += v[k];
        return s;
    }
    const size_t half = n / 2;
    return pairwise_sum(v, half) + pairwise_sum(v + half, n - half);
}

double discrete_l2(const GridFn2D& f) {
    const int nx = f.nx(), nt = f.nt();
    std::vector<double> row(nx);
    for (int i = 0; i < nx; ++i) {
        double s = 0.0;
        for (int j = 0; j < nt; ++j) s += f.at(i, j) * f.at(i, j);
        row[i] = s;
    }
    return pairwise_sum(row.data(), row.size()) * f.grid().hx() * f.grid().ht();
}

double discrete_h2_seminorms(const GridFn2D& f) {
    const int nx = f.nx(), nt = f.nt();
    const double hx = f.grid().hx(), ht = f.grid().ht();
    std::vector<double> row(nx, 0.0);
    for (int i = 0; i < nx; ++i) {
        double s = 0.0;
        if (i + 1 < nx) {
            for (int j = 0; j + 1 < nt; ++j) {
                const double dx = (f.at(i + 1, j) - f.at(i, j)) / hx;
                const double dt = (f.at(i, j + 1) - f.at(i, j)) / ht;
                s += dx * dx + dt * dt;
            }
        }
        if (i >= 1 && i + 1 < nx) {
            for (int j = 1; j + 1 < nt; ++j) {
                const double dxx = (f.at(i - 1, j) - 2.0 * f.at(i, j) + f.at(i + 1, j)) / (hx * hx);
                const double dtt = (f.at(i, j - 1) - 2.0 * f.at(i, j) + f.at(i, j + 1)) / (ht * ht);
                s += dxx * dxx + dtt * dtt;
            }
        }
        row[i] = s;
    }
    return pairwise_sum(row.data(), row.size()) * hx * ht;
}

}  // namespace cip
