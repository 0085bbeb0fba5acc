#include "cip/kernels.hpp"

namespace cip::kernels {

void wave_step(const double* prev, const double* cur, double* next, const double* inv_c, int n,
               double r2) {
#pragma omp parallel for schedule(static)
    for (int i = 1; i < n - 1; ++i) {
        next[i] = 2.0 * cur[i] - prev[i] +
                  r2 * inv_c[i] * (cur[i - 1] - 2.0 * cur[i] + cur[i + 1]);
    }
}

namespace serial {

void wave_step(const double* prev, const double* cur, double* next, const double* inv_c, int n,
               double r2) {
    for (int i = 1; i < n - 1; ++i) {
        next[i] = 2.0 * cur[i] - prev[i] +
                  r2 * inv_c[i] * (cur[i - 1] - 2.0 * cur[i] + cur[i + 1]);
    }
}

}  // namespace serial

}  // namespace cip::kernels
