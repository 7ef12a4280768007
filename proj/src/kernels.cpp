#include <cstdlib>
#include <cstring>

#include "trussopt/kernels.hpp"

namespace trussopt::kernels {

#if !defined(TRUSSOPT_HAVE_AVX2)
const Backend* avx2_backend() { return nullptr; }
#endif

namespace {

const Backend& select() {
  if (const char* env = std::getenv("TRUSSOPT_KERNELS")) {
    if (std::strcmp(env, "scalar") == 0) return scalar_backend();
  }
  if (const Backend* simd = avx2_backend()) return *simd;
  return scalar_backend();
}

}  // namespace

const Backend& active() {
  static const Backend& backend = select();
  return backend;
}

}  // namespace trussopt::kernels
