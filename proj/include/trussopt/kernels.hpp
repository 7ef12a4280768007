#pragma once

#include <cstddef>
#include <cstdint>

// Data-parallel inner loops of the analysis path. Every kernel has a scalar
// reference implementation; on x86-64 an AVX2/FMA variant is selected at
// runtime when the CPU supports it. The two backends are equivalence-tested
// against each other. TRUSSOPT_KERNELS=scalar in the environment forces the
// reference path.

namespace trussopt::kernels {

// Member geometry in SoA layout. DOF indices point into a displacement
// vector of length nf+1; suppressed DOFs alias the trailing slot, which the
// caller keeps at zero so the kernels never branch on support conditions.
struct StressBatch {
  std::size_t count = 0;
  const double* coef = nullptr;        // E/L per member
  const double* dir[3] = {};           // unit-vector component per axis
  const std::int32_t* end1[3] = {};    // DOF index of end 1, per axis
  const std::int32_t* end2[3] = {};    // DOF index of end 2, per axis
};

struct Backend {
  const char* name;

  double (*dot)(const double* a, const double* b, std::size_t n);

  // out[m] = coef[m] * sum_axis dir[axis][m] * (u[end2] - u[end1])
  void (*member_stress)(const StressBatch& g, const double* u, double* out);

  // max over i of max(v[i]*inv_hi, v[i]*inv_lo); -inf for empty input.
  // Callers pass reciprocals of the limits so both backends agree on the
  // rounding of the ratio.
  double (*range_ratio_max)(const double* v, std::size_t n, double inv_lo,
                            double inv_hi);

  // In-place lower Cholesky of a row-major symmetric matrix. Returns -1 on
  // success, otherwise the first column whose pivot is not safely positive
  // (mechanism / not positive definite).
  std::ptrdiff_t (*cholesky_factor)(double* a, std::size_t n);
};

const Backend& scalar_backend();

// nullptr unless the AVX2 variant was compiled in and the CPU supports it.
const Backend* avx2_backend();

// Runtime-selected backend, fixed at first use.
const Backend& active();

}  // namespace trussopt::kernels
