#pragma once

#include "randers_foliate/linalg.hpp"

namespace rf {

// Randers norm F = α + β on one tangent space: α from the SPD form `a`,
// β a covector with ‖β‖_α < 1.
class RandersPoint {
 public:
  RandersPoint(Mat a, Vec beta);

  int dim() const { return static_cast<int>(a_.rows()); }
  const Mat& a() const { return a_; }
  const Mat& a_inverse() const { return a_inv_; }
  const Vec& beta() const { return beta_; }
  const Vec& beta_sharp() const { return beta_sharp_; }
  double beta_norm() const { return beta_norm_; }

  double inner(const Vec& u, const Vec& v) const { return u.dot(a_ * v); }
  double alpha(const Vec& y) const;
  double beta_of(const Vec& y) const { return beta_.dot(y); }

 private:
  Mat a_;
  Mat a_inv_;
  Vec beta_;
  Vec beta_sharp_;
  double beta_norm_ = 0.0;
};

double randers_norm(const RandersPoint& p, const Vec& y);

// g_y, positively 0-homogeneous in y. Throws DomainError for y = 0.
Mat fundamental_tensor(const RandersPoint& p, const Vec& y);

// The closed form with the α-powers as usually stated for unit α(y); it is not
// 0-homogeneous and is kept only to measure the discrepancy.
Mat fundamental_tensor_unit_alpha_form(const RandersPoint& p, const Vec& y);

// Mean Cartan torsion I_y as a covector and the angular form h_y.
Vec mean_cartan_torsion(const RandersPoint& p, const Vec& y);
Mat angular_form(const RandersPoint& p, const Vec& y);

double cartan_torsion(const RandersPoint& p, const Vec& y, const Vec& u, const Vec& v, const Vec& w);

// C_y(·,·,w) as a symmetric matrix.
Mat cartan_contract(const RandersPoint& p, const Vec& y, const Vec& w);

// τ(y) = log(sqrt(det g_y) / σ_F) with the Busemann–Hausdorff density σ_F.
double distortion(const RandersPoint& p, const Vec& y);

struct NormalData {
  Vec N;          // α-unit normal
  Vec n;          // F-normal ĉN - β♯
  Vec nu;         // n / (c ĉ), F-unit
  Vec beta_tan;   // β♯ - β(N) N
  double c = 1.0;
  double c_hat = 1.0;
};

// Throws PreconditionError unless α(N) = 1 within 1e-9.
NormalData f_normal(const RandersPoint& p, const Vec& N);

// τ(n) in closed form, ((m+2)/2) log(c / (2c - ĉ)).
double distortion_at_normal(const RandersPoint& p, const NormalData& nd);

// g_n restricted to the leaf tangent space W = ker N♭; u, v must lie in W.
double leaf_metric(const RandersPoint& p, const NormalData& nd, const Vec& u, const Vec& v);

// The vector u ∈ W with g_n(u, ·) = ⟨U, ·⟩ on W.
Vec g_raise(const RandersPoint& p, const NormalData& nd, const Vec& U);

// Component of X orthogonal to β♯⊤ inside W; identity when β♯⊤ vanishes.
Vec perp_beta_project(const RandersPoint& p, const NormalData& nd, const Vec& X);

inline constexpr double kBetaTanFloor = 1e-8;

}  // namespace rf
