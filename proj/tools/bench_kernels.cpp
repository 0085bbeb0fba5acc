// Timing comparison of the OpenMP kernels against the serial reference
// implementations: wave time stepping, functional evaluation, gradient.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "cip/convexify.hpp"
#include "cip/kernels.hpp"

using clk = std::chrono::steady_clock;

static double seconds_since(clk::time_point t0) {
    return std::chrono::duration<double>(clk::now() - t0).count();
}

template <class F>
static double time_best_of(int reps, F&& fn) {
    double best = 1e300;
    for (int r = 0; r < reps; ++r) {
        auto t0 = clk::now();
        fn();
        best = std::min(best, seconds_since(t0));
    }
    return best;
}

int main() {
#ifdef _OPENMP
    std::printf("OpenMP threads: %d\n", omp_get_max_threads());
#else
    std::printf("OpenMP not enabled; both columns run serially\n");
#endif

    // Wave step on the production-sized line.
    {
        const int n = 1601;
        std::vector<double> prev(n), cur(n), next(n), coef(n, 1.0);
        for (int i = 0; i < n; ++i) {
            prev[i] = std::sin(0.01 * i);
            cur[i] = std::sin(0.011 * i);
        }
        const double f = 0.25;
        const int steps = 3200;
        auto run = [&](auto stepper) {
            for (int s = 0; s < steps; ++s) {
                stepper(prev.data(), cur.data(), next.data(), coef.data(), n, f);
                std::swap(prev, cur);
                std::swap(cur, next);
            }
        };
        const double tp = time_best_of(3, [&] { run(cip::kernels::wave_step); });
        const double ts = time_best_of(3, [&] { run(cip::kernels::serial::wave_step); });
        std::printf("wave_step (%d nodes x %d steps): parallel %.4fs  serial %.4fs  speedup %.2fx\n",
                    n, steps, tp, ts, ts / tp);
    }

    // Functional and gradient on the production inversion grid.
    {
        cip::InversionDomain dom(4.0, 100, 100);
        cip::CarlemanParams p;
        cip::QField q;
        q.q = cip::GridFn2D(dom.grid, 0.0);
        q.s0.assign(dom.grid.nt(), 0.2);
        q.s1.assign(dom.grid.nt(), -0.1);
        for (int i = 0; i < dom.grid.nx(); ++i)
            for (int j = 0; j < dom.grid.nt(); ++j)
                q.q.at(i, j) = 0.3 * std::sin(0.13 * i) * std::cos(0.21 * j);
        q.enforce_constraints();

        double sink = 0.0;
        const double kp = time_best_of(5, [&] {
            for (int r = 0; r < 20; ++r) sink += cip::functional_K(q, p);
        });
        const double ks = time_best_of(5, [&] {
            for (int r = 0; r < 20; ++r) sink += cip::reference::functional_K(q, p);
        });
        std::printf("functional_K (20 evals): parallel %.4fs  serial %.4fs  speedup %.2fx\n", kp,
                    ks, ks / kp);
        std::printf("  agreement: |parallel - serial| = %.3e\n",
                    std::fabs(cip::functional_K(q, p) - cip::reference::functional_K(q, p)));

        const double gp = time_best_of(5, [&] {
            for (int r = 0; r < 20; ++r) sink += cip::gradient_K(q, p).at(10, 10);
        });
        const double gs = time_best_of(5, [&] {
            for (int r = 0; r < 20; ++r) sink += cip::reference::gradient_K(q, p).at(10, 10);
        });
        std::printf("gradient_K (20 evals): parallel %.4fs  serial %.4fs  speedup %.2fx\n", gp, gs,
                    gs / gp);

        const cip::GridFn2D g1 = cip::gradient_K(q, p);
        const cip::GridFn2D g2 = cip::reference::gradient_K(q, p);
        double worst = 0.0;
        for (size_t i = 0; i < g1.data().size(); ++i)
            worst = std::max(worst, std::fabs(g1.data()[i] - g2.data()[i]));
        std::printf("  agreement: max |parallel - serial| = %.3e (checksum %g)\n", worst, sink);
    }
    return 0;
}
