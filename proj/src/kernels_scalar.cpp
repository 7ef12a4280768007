#include <algorithm>
#include <cmath>
#include <limits>

#include "trussopt/kernels.hpp"

namespace trussopt::kernels {
namespace {

double dot_scalar(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

void member_stress_scalar(const StressBatch& g, const double* u, double* out) {
  for (std::size_t m = 0; m < g.count; ++m) {
    double e = 0.0;
    for (int a = 0; a < 3; ++a)
      e += g.dir[a][m] * (u[g.end2[a][m]] - u[g.end1[a][m]]);
    out[m] = g.coef[m] * e;
  }
}

double range_ratio_max_scalar(const double* v, std::size_t n, double inv_lo,
                              double inv_hi) {
  double r = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i)
    r = std::max(r, std::max(v[i] * inv_hi, v[i] * inv_lo));
  return r;
}

std::ptrdiff_t cholesky_factor_scalar(double* a, std::size_t n) {
  double scale = 0.0;
  for (std::size_t j = 0; j < n; ++j)
    scale = std::max(scale, std::abs(a[j * n + j]));
  const double tiny = scale * 1e-12;
  for (std::size_t j = 0; j < n; ++j) {
    double* rj = a + j * n;
    const double d = rj[j] - dot_scalar(rj, rj, j);
    if (!(d > tiny)) return static_cast<std::ptrdiff_t>(j);
    const double ljj = std::sqrt(d);
    rj[j] = ljj;
    for (std::size_t i = j + 1; i < n; ++i) {
      double* ri = a + i * n;
      ri[j] = (ri[j] - dot_scalar(ri, rj, j)) / ljj;
    }
  }
  return -1;
}

}  // namespace

const Backend& scalar_backend() {
  static const Backend backend{"scalar", dot_scalar, member_stress_scalar,
                               range_ratio_max_scalar, cholesky_factor_scalar};
  return backend;
}

}  // namespace trussopt::kernels
