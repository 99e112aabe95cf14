#include <fftw3.h>

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <span>
#include <vector>

#include "randers_foliate/error.hpp"
#include "randers_foliate/grid.hpp"
#include "randers_foliate/kernels.hpp"

namespace rf::detail {

namespace {

struct FftwBuffer {
  double* p = nullptr;
  explicit FftwBuffer(std::size_t n) : p(fftw_alloc_real(n)) {
    if (p == nullptr) throw NumericError("fftw: allocation failed");
  }
  ~FftwBuffer() { fftw_free(p); }
  FftwBuffer(const FftwBuffer&) = delete;
  FftwBuffer& operator=(const FftwBuffer&) = delete;
};

// Plans for one grid shape plus the wavenumber tables of the half-complex layout.
struct Plan {
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;
  std::size_t n_real = 0;
  std::size_t n_complex = 0;
  std::vector<std::vector<double>> k_first;   // per axis, Nyquist zeroed
  std::vector<std::vector<double>> k_signed;  // per axis, Nyquist kept (for ∂_a∂_a)
};

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

const Plan& plan_for(const PeriodicGrid& g) {
  static std::map<std::vector<double>, std::unique_ptr<Plan>> cache;
  std::vector<double> key;
  for (int a = 0; a < g.dim(); ++a) {
    key.push_back(g.size(a));
    key.push_back(g.period(a));
  }
  std::lock_guard<std::mutex> lock(planner_mutex());
  auto it = cache.find(key);
  if (it != cache.end()) return *it->second;

  auto plan = std::make_unique<Plan>();
  const int D = g.dim();
  std::vector<int> n(D);
  for (int a = 0; a < D; ++a) n[a] = g.size(D - 1 - a);  // FFTW is row-major, our axis 0 is fastest
  plan->n_real = g.node_count();
  const std::size_t half0 = static_cast<std::size_t>(g.size(0) / 2 + 1);
  plan->n_complex = g.node_count() / static_cast<std::size_t>(g.size(0)) * half0;
  FftwBuffer re(plan->n_real);
  FftwBuffer cx(2 * plan->n_complex);
  auto* c = reinterpret_cast<fftw_complex*>(cx.p);
  plan->forward = fftw_plan_dft_r2c(D, n.data(), re.p, c, FFTW_ESTIMATE);
  plan->backward = fftw_plan_dft_c2r(D, n.data(), c, re.p, FFTW_ESTIMATE);
  if (plan->forward == nullptr || plan->backward == nullptr) throw NumericError("fftw: planning failed");

  plan->k_first.assign(D, std::vector<double>(plan->n_complex));
  plan->k_signed.assign(D, std::vector<double>(plan->n_complex));
  for (std::size_t j = 0; j < plan->n_complex; ++j) {
    std::size_t rest = j;
    for (int a = 0; a < D; ++a) {
      const std::size_t len = a == 0 ? half0 : static_cast<std::size_t>(g.size(a));
      const long idx = static_cast<long>(rest % len);
      rest /= len;
      const long na = g.size(a);
      long wave = idx;
      if (a > 0 && idx > na / 2) wave = idx - na;
      const double scale = 2.0 * std::numbers::pi / g.period(a);
      const bool nyquist = (na % 2 == 0) && (idx == na / 2);
      plan->k_signed[a][j] = scale * static_cast<double>(wave);
      plan->k_first[a][j] = nyquist ? 0.0 : scale * static_cast<double>(wave);
    }
  }
  auto& slot = cache[key];
  slot = std::move(plan);
  return *slot;
}

}  // namespace

void spectral_derivative(const PeriodicGrid& g, std::span<const double> in, std::span<double> out, int axis1,
                         int axis2) {
  const Plan& p = plan_for(g);
  FftwBuffer re(p.n_real);
  FftwBuffer cx(2 * p.n_complex);
  FftwBuffer tmp(2 * p.n_complex);
  std::copy(in.begin(), in.end(), re.p);
  fftw_execute_dft_r2c(p.forward, re.p, reinterpret_cast<fftw_complex*>(cx.p));
  if (axis2 < 0) {
    kernels::mul_i_wavenumber(cx.p, p.k_first[axis1].data(), tmp.p, p.n_complex);
  } else if (axis1 == axis2) {
    std::vector<double> s(p.n_complex);
    for (std::size_t j = 0; j < p.n_complex; ++j) s[j] = -p.k_signed[axis1][j] * p.k_signed[axis1][j];
    kernels::mul_real(cx.p, s.data(), tmp.p, p.n_complex);
  } else {
    std::vector<double> s(p.n_complex);
    for (std::size_t j = 0; j < p.n_complex; ++j) s[j] = -p.k_first[axis1][j] * p.k_first[axis2][j];
    kernels::mul_real(cx.p, s.data(), tmp.p, p.n_complex);
  }
  fftw_execute_dft_c2r(p.backward, reinterpret_cast<fftw_complex*>(tmp.p), re.p);
  const double norm = 1.0 / static_cast<double>(p.n_real);
  for (std::size_t i = 0; i < p.n_real; ++i) out[i] = re.p[i] * norm;
}

void spectral_gradient(const PeriodicGrid& g, std::span<const double> in, std::vector<std::span<double>> out) {
  const Plan& p = plan_for(g);
  FftwBuffer re(p.n_real);
  FftwBuffer cx(2 * p.n_complex);
  FftwBuffer tmp(2 * p.n_complex);
  std::copy(in.begin(), in.end(), re.p);
  fftw_execute_dft_r2c(p.forward, re.p, reinterpret_cast<fftw_complex*>(cx.p));
  const double norm = 1.0 / static_cast<double>(p.n_real);
  for (int a = 0; a < g.dim(); ++a) {
    kernels::mul_i_wavenumber(cx.p, p.k_first[a].data(), tmp.p, p.n_complex);
    fftw_execute_dft_c2r(p.backward, reinterpret_cast<fftw_complex*>(tmp.p), re.p);
    for (std::size_t i = 0; i < p.n_real; ++i) out[a][i] = re.p[i] * norm;
  }
}

}  // namespace rf::detail
