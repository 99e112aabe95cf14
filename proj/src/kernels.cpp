#include "randers_foliate/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <cstring>

namespace rf::kernels {

namespace scalar {

void stencil4(const double* m2, const double* m1, const double* p1, const double* p2, double* out, std::size_t n,
              double scale) {
  for (std::size_t i = 0; i < n; ++i) out[i] = ((m2[i] - p2[i]) + 8.0 * (p1[i] - m1[i])) * scale;
}

void multiply(const double* a, const double* b, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = a[i] * b[i];
}

void mul_i_wavenumber(const double* z, const double* k, double* out, std::size_t n_complex) {
  for (std::size_t j = 0; j < n_complex; ++j) {
    const double re = z[2 * j], im = z[2 * j + 1];
    out[2 * j] = -k[j] * im;
    out[2 * j + 1] = k[j] * re;
  }
}

void mul_real(const double* z, const double* s, double* out, std::size_t n_complex) {
  for (std::size_t j = 0; j < n_complex; ++j) {
    out[2 * j] = s[j] * z[2 * j];
    out[2 * j + 1] = s[j] * z[2 * j + 1];
  }
}

}  // namespace scalar

bool avx2_available() {
#if defined(__x86_64__) || defined(__i386__)
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

namespace {

Isa detect() {
  const char* env = std::getenv("RANDERS_FOLIATE_ISA");
  if (env != nullptr && std::strcmp(env, "scalar") == 0) return Isa::scalar;
  return avx2_available() ? Isa::avx2 : Isa::scalar;
}

std::atomic<Isa>& current() {
  static std::atomic<Isa> isa{detect()};
  return isa;
}

}  // namespace

Isa active_isa() { return current().load(std::memory_order_relaxed); }

Isa force_isa(Isa isa) {
  if (isa == Isa::avx2 && !avx2_available()) isa = Isa::scalar;
  return current().exchange(isa);
}

std::string_view isa_name(Isa isa) { return isa == Isa::avx2 ? "avx2" : "scalar"; }

void stencil4(const double* m2, const double* m1, const double* p1, const double* p2, double* out, std::size_t n,
              double scale) {
  if (active_isa() == Isa::avx2) return avx2::stencil4(m2, m1, p1, p2, out, n, scale);
  scalar::stencil4(m2, m1, p1, p2, out, n, scale);
}

void multiply(const double* a, const double* b, double* out, std::size_t n) {
  if (active_isa() == Isa::avx2) return avx2::multiply(a, b, out, n);
  scalar::multiply(a, b, out, n);
}

void mul_i_wavenumber(const double* z, const double* k, double* out, std::size_t n_complex) {
  if (active_isa() == Isa::avx2) return avx2::mul_i_wavenumber(z, k, out, n_complex);
  scalar::mul_i_wavenumber(z, k, out, n_complex);
}

void mul_real(const double* z, const double* s, double* out, std::size_t n_complex) {
  if (active_isa() == Isa::avx2) return avx2::mul_real(z, s, out, n_complex);
  scalar::mul_real(z, s, out, n_complex);
}

double pairwise_sum(const double* x, std::size_t n) {
  if (n <= 16) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += x[i];
    return s;
  }
  const std::size_t half = n / 2;
  return pairwise_sum(x, half) + pairwise_sum(x + half, n - half);
}

}  // namespace rf::kernels
