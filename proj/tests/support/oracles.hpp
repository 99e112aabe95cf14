#pragma once

// Independent reference computations and random generators shared by the unit and acceptance tests.

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "randers_foliate/foliated.hpp"
#include "randers_foliate/randers_point.hpp"

namespace rf::testing {

using Matrix = Eigen::MatrixXd;

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}
  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(gen_); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(gen_); }
  double normal() { return std::normal_distribution<double>(0.0, 1.0)(gen_); }

  Matrix matrix(int m, double scale = 1.0) {
    Matrix A(m, m);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) A(i, j) = scale * uniform(-1.0, 1.0);
    return A;
  }
  Vec vec(int n, double scale = 1.0) {
    Vec v(n);
    for (int i = 0; i < n; ++i) v(i) = scale * normal();
    return v;
  }
  Vec nonzero_vec(int n) {
    Vec v = vec(n);
    while (v.norm() < 1e-3) v = vec(n);
    return v;
  }
  // SPD with eigenvalues in roughly [0.3, 3].
  Mat spd(int n) {
    const Mat Q = Eigen::HouseholderQR<Mat>(Mat(vec_matrix(n))).householderQ();
    Vec d(n);
    for (int i = 0; i < n; ++i) d(i) = uniform(0.3, 3.0);
    Mat a = Q * d.asDiagonal() * Q.transpose();
    return 0.5 * (a + a.transpose());
  }
  // Covector with ‖β‖_α = r under the form a.
  Vec beta_with_norm(const Mat& a, double r) {
    const Vec b = nonzero_vec(static_cast<int>(a.rows()));
    const double norm = std::sqrt(b.dot(a.inverse() * b));
    return (r / norm) * b;
  }

 private:
  Mat vec_matrix(int n) {
    Mat M(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) M(i, j) = normal();
    return M;
  }
  std::mt19937_64 gen_;
};

// Coefficient of t^λ in det(I + Σ t_i A_i) by an exact discrete Fourier transform over
// (m+1)-th roots of unity in every variable (the polynomial has degree ≤ m in each t_i).
inline double sigma_lambda_oracle(const std::vector<Matrix>& mats, const std::vector<int>& lambda) {
  const int k = static_cast<int>(mats.size());
  const int m = static_cast<int>(mats.front().rows());
  const int q = m + 1;
  using C = std::complex<double>;
  const double two_pi = 2.0 * std::acos(-1.0);
  std::vector<int> idx(k, 0);
  C acc = 0.0;
  long total = 1;
  for (int i = 0; i < k; ++i) total *= q;
  for (long flat = 0; flat < total; ++flat) {
    long rest = flat;
    for (int i = 0; i < k; ++i) {
      idx[i] = static_cast<int>(rest % q);
      rest /= q;
    }
    Eigen::MatrixXcd S = Eigen::MatrixXcd::Identity(m, m);
    C weight = 1.0;
    for (int i = 0; i < k; ++i) {
      const C w = std::polar(1.0, two_pi * idx[i] / q);
      S += w * mats[i].cast<C>();
      weight *= std::polar(1.0, -two_pi * idx[i] * lambda[i] / q);
    }
    acc += S.determinant() * weight;
  }
  return acc.real() / static_cast<double>(total);
}

// ½ ∂²F²/∂y_i∂y_j by fourth-order central differences of F² along coordinate pairs.
inline Mat fd_half_hessian_F2(const RandersPoint& p, const Vec& y, double h) {
  const int n = p.dim();
  auto F2 = [&](const Vec& v) {
    const double F = randers_norm(p, v);
    return F * F;
  };
  auto e = [&](int i) {
    Vec v = Vec::Zero(n);
    v(i) = 1.0;
    return v;
  };
  Mat H(n, n);
  const double w[4] = {-1.0, 8.0, -8.0, 1.0};
  const double s[4] = {2.0, 1.0, -1.0, -2.0};
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double acc = 0.0;
      for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) acc += w[a] * w[b] * F2(y + s[a] * h * e(i) + s[b] * h * e(j));
      H(i, j) = 0.5 * acc / (144.0 * h * h);
    }
  return 0.5 * (H + H.transpose());
}

}  // namespace rf::testing
