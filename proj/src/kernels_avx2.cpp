#include "randers_foliate/kernels.hpp"

#include <immintrin.h>

// Built with -mavx2 only (no FMA) so every lane rounds exactly like the scalar loop.

namespace rf::kernels::avx2 {

void stencil4(const double* m2, const double* m1, const double* p1, const double* p2, double* out, std::size_t n,
              double scale) {
  const __m256d eight = _mm256_set1_pd(8.0);
  const __m256d s = _mm256_set1_pd(scale);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d outer = _mm256_sub_pd(_mm256_loadu_pd(m2 + i), _mm256_loadu_pd(p2 + i));
    const __m256d inner = _mm256_sub_pd(_mm256_loadu_pd(p1 + i), _mm256_loadu_pd(m1 + i));
    const __m256d sum = _mm256_add_pd(outer, _mm256_mul_pd(eight, inner));
    _mm256_storeu_pd(out + i, _mm256_mul_pd(sum, s));
  }
  for (; i < n; ++i) out[i] = ((m2[i] - p2[i]) + 8.0 * (p1[i] - m1[i])) * scale;
}

void multiply(const double* a, const double* b, double* out, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) _mm256_storeu_pd(out + i, _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
  for (; i < n; ++i) out[i] = a[i] * b[i];
}

void mul_i_wavenumber(const double* z, const double* k, double* out, std::size_t n_complex) {
  std::size_t j = 0;
  for (; j + 2 <= n_complex; j += 2) {
    const __m256d v = _mm256_loadu_pd(z + 2 * j);                    // re0 im0 re1 im1
    const __m256d kk = _mm256_set_pd(k[j + 1], k[j + 1], k[j], k[j]);  // k0 k0 k1 k1
    const __m256d swapped = _mm256_permute_pd(v, 0b0101);            // im0 re0 im1 re1
    const __m256d sign = _mm256_set_pd(1.0, -1.0, 1.0, -1.0);
    _mm256_storeu_pd(out + 2 * j, _mm256_mul_pd(_mm256_mul_pd(swapped, sign), kk));
  }
  for (; j < n_complex; ++j) {
    const double re = z[2 * j], im = z[2 * j + 1];
    out[2 * j] = -k[j] * im;
    out[2 * j + 1] = k[j] * re;
  }
}

void mul_real(const double* z, const double* s, double* out, std::size_t n_complex) {
  std::size_t j = 0;
  for (; j + 2 <= n_complex; j += 2) {
    const __m256d ss = _mm256_set_pd(s[j + 1], s[j + 1], s[j], s[j]);
    _mm256_storeu_pd(out + 2 * j, _mm256_mul_pd(_mm256_loadu_pd(z + 2 * j), ss));
  }
  for (; j < n_complex; ++j) {
    out[2 * j] = s[j] * z[2 * j];
    out[2 * j + 1] = s[j] * z[2 * j + 1];
  }
}

}  // namespace rf::kernels::avx2
