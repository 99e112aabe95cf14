#pragma once

#include <cstddef>
#include <string_view>

namespace rf::kernels {

enum class Isa { scalar, avx2 };

// Selected once: AVX2 when the CPU reports it, unless RANDERS_FOLIATE_ISA=scalar.
Isa active_isa();
std::string_view isa_name(Isa isa);

// Overrides the dispatch (tests); returns the previous choice.
Isa force_isa(Isa isa);
bool avx2_available();

// out[i] = ((m2[i] - p2[i]) + 8 (p1[i] - m1[i])) * scale, the fourth-order centered difference.
void stencil4(const double* m2, const double* m1, const double* p1, const double* p2, double* out, std::size_t n,
              double scale);

// out[i] = a[i] * b[i].
void multiply(const double* a, const double* b, double* out, std::size_t n);

// Interleaved complex z[j] -> i k[j] z[j].
void mul_i_wavenumber(const double* z, const double* k, double* out, std::size_t n_complex);

// Interleaved complex z[j] -> s[j] z[j] with real s.
void mul_real(const double* z, const double* s, double* out, std::size_t n_complex);

// Deterministic pairwise summation.
double pairwise_sum(const double* x, std::size_t n);

namespace scalar {
void stencil4(const double*, const double*, const double*, const double*, double*, std::size_t, double);
void multiply(const double*, const double*, double*, std::size_t);
void mul_i_wavenumber(const double*, const double*, double*, std::size_t);
void mul_real(const double*, const double*, double*, std::size_t);
}  // namespace scalar

namespace avx2 {
void stencil4(const double*, const double*, const double*, const double*, double*, std::size_t, double);
void multiply(const double*, const double*, double*, std::size_t);
void mul_i_wavenumber(const double*, const double*, double*, std::size_t);
void mul_real(const double*, const double*, double*, std::size_t);
}  // namespace avx2

}  // namespace rf::kernels
