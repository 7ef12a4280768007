// AVX2/FMA variants of the analysis kernels. This TU is compiled with
// -mavx2 -mfma; avx2_backend() still checks the CPU at runtime before
// handing the backend out.

#include "trussopt/kernels.hpp"

#if defined(__AVX2__) && defined(__FMA__)

#include <immintrin.h>

#include <algorithm>
#include <cmath>
#include <limits>

namespace trussopt::kernels {
namespace {

inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  __m128d sh = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_add_sd(lo, sh));
}

double dot_avx2(const double* a, const double* b, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    acc = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc);
  double s = hsum(acc);
  for (; i < n; ++i) s += a[i] * b[i];
  return s;
}

void member_stress_avx2(const StressBatch& g, const double* u, double* out) {
  std::size_t m = 0;
  for (; m + 4 <= g.count; m += 4) {
    __m256d e = _mm256_setzero_pd();
    for (int a = 0; a < 3; ++a) {
      __m128i i2 =
          _mm_loadu_si128(reinterpret_cast<const __m128i*>(g.end2[a] + m));
      __m128i i1 =
          _mm_loadu_si128(reinterpret_cast<const __m128i*>(g.end1[a] + m));
      __m256d u2 = _mm256_i32gather_pd(u, i2, 8);
      __m256d u1 = _mm256_i32gather_pd(u, i1, 8);
      e = _mm256_fmadd_pd(_mm256_loadu_pd(g.dir[a] + m), _mm256_sub_pd(u2, u1),
                          e);
    }
    _mm256_storeu_pd(out + m, _mm256_mul_pd(_mm256_loadu_pd(g.coef + m), e));
  }
  for (; m < g.count; ++m) {
    double e = 0.0;
    for (int a = 0; a < 3; ++a)
      e += g.dir[a][m] * (u[g.end2[a][m]] - u[g.end1[a][m]]);
    out[m] = g.coef[m] * e;
  }
}

double range_ratio_max_avx2(const double* v, std::size_t n, double inv_lo,
                            double inv_hi) {
  const __m256d vlo = _mm256_set1_pd(inv_lo);
  const __m256d vhi = _mm256_set1_pd(inv_hi);
  __m256d best = _mm256_set1_pd(-std::numeric_limits<double>::infinity());
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d x = _mm256_loadu_pd(v + i);
    best = _mm256_max_pd(
        best, _mm256_max_pd(_mm256_mul_pd(x, vhi), _mm256_mul_pd(x, vlo)));
  }
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, best);
  double r = -std::numeric_limits<double>::infinity();
  for (double t : lanes) r = std::max(r, t);
  for (; i < n; ++i) r = std::max(r, std::max(v[i] * inv_hi, v[i] * inv_lo));
  return r;
}

std::ptrdiff_t cholesky_factor_avx2(double* a, std::size_t n) {
  double scale = 0.0;
  for (std::size_t j = 0; j < n; ++j)
    scale = std::max(scale, std::abs(a[j * n + j]));
  const double tiny = scale * 1e-12;
  for (std::size_t j = 0; j < n; ++j) {
    double* rj = a + j * n;
    const double d = rj[j] - dot_avx2(rj, rj, j);
    if (!(d > tiny)) return static_cast<std::ptrdiff_t>(j);
    const double ljj = std::sqrt(d);
    rj[j] = ljj;
    for (std::size_t i = j + 1; i < n; ++i) {
      double* ri = a + i * n;
      ri[j] = (ri[j] - dot_avx2(ri, rj, j)) / ljj;
    }
  }
  return -1;
}

}  // namespace

const Backend* avx2_backend() {
  static const Backend* selected = []() -> const Backend* {
    if (!__builtin_cpu_supports("avx2") || !__builtin_cpu_supports("fma"))
      return nullptr;
    static const Backend backend{"avx2", dot_avx2, member_stress_avx2,
                                 range_ratio_max_avx2, cholesky_factor_avx2};
    return &backend;
  }();
  return selected;
}

}  // namespace trussopt::kernels

#endif  // __AVX2__ && __FMA__
