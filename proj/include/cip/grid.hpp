#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace cip {

/// Uniform 1D grid: node(i) = start + i*step for i = 0..count-1.
struct UniformGrid1D {
    double start = 0.0;
    double step = 0.0;
    int count = 0;

    UniformGrid1D() = default;
    UniformGrid1D(double start_, double step_, int count_)
        : start(start_), step(step_), count(count_) {
        if (step <= 0.0) throw std::invalid_argument("UniformGrid1D: step must be > 0");
        if (count < 2) throw std::invalid_argument("UniformGrid1D: count must be >= 2");
    }

    double node(int i) const { return start + i * step; }
    double back() const { return node(count - 1); }

    static UniformGrid1D over(double lo, double hi, int count) {
        if (count < 2) throw std::invalid_argument("UniformGrid1D: count must be >= 2");
        return UniformGrid1D(lo, (hi - lo) / (count - 1), count);
    }
};

struct UniformGrid2D {
    UniformGrid1D x;
    UniformGrid1D t;

    int nx() const { return x.count; }  // number of nodes along x
    int nt() const { return t.count; }
    double hx() const { return x.step; }
    double ht() const { return t.step; }
};

/// Scalar field on a UniformGrid2D, stored row-major (one x-row of t-values per row).
class GridFn2D {
public:
    GridFn2D() = default;
    explicit GridFn2D(UniformGrid2D grid, double fill = 0.0)
        : grid_(grid), values_(static_cast<size_t>(grid.nx()) * grid.nt(), fill) {}

    const UniformGrid2D& grid() const { return grid_; }
    int nx() const { return grid_.nx(); }
    int nt() const { return grid_.nt(); }

    double& at(int i, int j) { return values_[static_cast<size_t>(i) * grid_.nt() + j]; }
    double at(int i, int j) const { return values_[static_cast<size_t>(i) * grid_.nt() + j]; }

    double& at_checked(int i, int j) {
        check(i, j);
        return at(i, j);
    }
    double at_checked(int i, int j) const {
        check(i, j);
        return at(i, j);
    }

    std::vector<double>& data() { return values_; }
    const std::vector<double>& data() const { return values_; }

    bool all_finite() const {
        for (double v : values_)
            if (!std::isfinite(v)) return false;
        return true;
    }

private:
    void check(int i, int j) const {
        if (i < 0 || i >= grid_.nx() || j < 0 || j >= grid_.nt())
            throw std::out_of_range("GridFn2D: index (" + std::to_string(i) + "," +
                                    std::to_string(j) + ") out of range");
    }

    UniformGrid2D grid_;
    std::vector<double> values_;
};

struct GridFn1D {
    UniformGrid1D grid;
    std::vector<double> values;

    GridFn1D() = default;
    GridFn1D(UniformGrid1D g, std::vector<double> v) : grid(g), values(std::move(v)) {
        if (static_cast<int>(values.size()) != grid.count)
            throw std::invalid_argument("GridFn1D: value count does not match grid");
    }
    explicit GridFn1D(UniformGrid1D g, double fill = 0.0)
        : grid(g), values(static_cast<size_t>(g.count), fill) {}
};

// -- finite-difference stencils -------------------------------------------
//
// All stencils are bounds-checked and match the discrete operators of the
// convexified functional term by term: forward first differences, central
// second differences, and the four-point forward mixed difference.

double dx_forward(const GridFn2D& f, int i, int j);
double dt_forward(const GridFn2D& f, int i, int j);
double dxx_central(const GridFn2D& f, int i, int j);
double dtt_central(const GridFn2D& f, int i, int j);
double dxt_forward(const GridFn2D& f, int i, int j);

// -- discrete norms -------------------------------------------------------

/// L2 part: sum of f^2 over all nodes, cell weight hx*ht.
double discrete_l2(const GridFn2D& f);

/// First plus second difference sums with cell weight hx*ht:
/// forward differences over i <= Nx-1 / j <= Nt-1, central second
/// differences over the interior nodes.
double discrete_h2_seminorms(const GridFn2D& f);

/// Deterministic pairwise sum; reduction order independent of chunking.
double pairwise_sum(const double* v, size_t n);

}  // namespace cip
