#pragma once

#include <cstddef>

namespace cip::kernels {

/// One interior leapfrog update: next = 2*cur - prev + r2*inv_c*D_yy cur.
/// Boundary nodes are left untouched. OpenMP-parallel over nodes.
void wave_step(const double* prev, const double* cur, double* next, const double* inv_c, int n,
               double r2);

namespace serial {
/// Plain-loop reference for wave_step, kept for tests and benchmarks.
void wave_step(const double* prev, const double* cur, double* next, const double* inv_c, int n,
               double r2);
}  // namespace serial

}  // namespace cip::kernels
