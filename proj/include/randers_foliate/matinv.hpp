#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace rf::matinv {

using Matrix = Eigen::MatrixXd;

// Exponent vector (λ_1, ..., λ_k) selecting the coefficient of t_1^λ_1 ... t_k^λ_k.
using MultiIndex = std::vector<int>;

// Coefficient of t^k in det(I + tA). Zero for k > m, one for k = 0.
double sigma_single(const Matrix& A, int k);

// σ_0(A), ..., σ_m(A).
std::vector<double> sigma_all(const Matrix& A);

// Coefficient of t^λ in det(I + Σ t_i A_i), computed from mixed power traces.
double sigma_multi(std::span<const Matrix> mats, const MultiIndex& lambda);

// Convenience for the two-matrix case σ_{k,l}(A, B).
double sigma_pair(const Matrix& A, const Matrix& B, int k, int l);

// T_0 = I, T_r = σ_r(A) I - A T_{r-1}.
Matrix newton_transform(const Matrix& A, int r);

struct IdentityResidual {
  std::string identity;
  int checks = 0;
  double max_abs_residual = 0.0;
};

struct IdentitySuiteReport {
  std::uint64_t seed = 0;
  int trials = 0;
  int m_max = 0;
  std::vector<IdentityResidual> rows;

  double worst() const;
  bool passed(double tol) const { return worst() < tol; }
};

// Randomized check of the σ_λ algebra: multilinearity, symmetric reductions,
// the identity and repeated-argument rules, the Newton transform recursion and
// the rank-one expansion.
IdentitySuiteReport verify_sigma_identities(std::uint64_t seed, int trials, int m_max);

}  // namespace rf::matinv
