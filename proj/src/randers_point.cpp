#include "randers_foliate/randers_point.hpp"

#include <cmath>
#include <string>

#include "randers_foliate/error.hpp"

namespace rf {

RandersPoint::RandersPoint(Mat a, Vec beta) : a_(std::move(a)), beta_(std::move(beta)) {
  if (a_.rows() != a_.cols() || a_.rows() < 1 || a_.rows() > kMaxDim)
    throw ShapeError("RandersPoint: a must be square with dimension in [1, 4]");
  if (beta_.size() != a_.rows()) throw ShapeError("RandersPoint: β has wrong length");
  if (!a_.allFinite() || !beta_.allFinite()) throw ValidationError("RandersPoint: non-finite entries");
  if ((a_ - a_.transpose()).cwiseAbs().maxCoeff() > 1e-12 * (1.0 + a_.cwiseAbs().maxCoeff()))
    throw ValidationError("RandersPoint: a is not symmetric");
  Eigen::LLT<Mat> llt(a_);
  if (llt.info() != Eigen::Success) throw ValidationError("RandersPoint: a is not positive definite");
  a_inv_ = llt.solve(Mat::Identity(a_.rows(), a_.cols()));
  beta_sharp_ = a_inv_ * beta_;
  beta_norm_ = std::sqrt(std::max(0.0, beta_.dot(beta_sharp_)));
  if (beta_norm_ >= 1.0 - 1e-9)
    throw ValidationError("RandersPoint: ‖β‖_α = " + std::to_string(beta_norm_) + " is not below 1");
}

double RandersPoint::alpha(const Vec& y) const { return std::sqrt(std::max(0.0, inner(y, y))); }

double randers_norm(const RandersPoint& p, const Vec& y) { return p.alpha(y) + p.beta_of(y); }

namespace {

double checked_alpha(const RandersPoint& p, const Vec& y, const char* who) {
  if (y.size() != p.dim()) throw ShapeError(std::string(who) + ": vector has wrong length");
  const double al = p.alpha(y);
  if (!(al > 0.0)) throw DomainError(std::string(who) + ": y = 0");
  return al;
}

}  // namespace

Mat fundamental_tensor(const RandersPoint& p, const Vec& y) {
  const double al = checked_alpha(p, y, "fundamental_tensor");
  const double F = al + p.beta_of(y);
  const Vec yf = p.a() * y / al;
  const Vec s = yf + p.beta();
  return (F / al) * (p.a() - yf * yf.transpose()) + s * s.transpose();
}

Mat fundamental_tensor_unit_alpha_form(const RandersPoint& p, const Vec& y) {
  const double al = checked_alpha(p, y, "fundamental_tensor_unit_alpha_form");
  const double by = p.beta_of(y);
  const Vec yf = p.a() * y;
  const Vec& b = p.beta();
  return (1.0 + by) / (al * al) * p.a() + b * b.transpose() - by / (al * al * al) * yf * yf.transpose() +
         (b * yf.transpose() + yf * b.transpose()) / al;
}

Vec mean_cartan_torsion(const RandersPoint& p, const Vec& y) {
  const double al = checked_alpha(p, y, "mean_cartan_torsion");
  const double F = al + p.beta_of(y);
  const double m2 = p.dim() + 1;  // m + 2 with dim = m + 1
  return m2 / (2.0 * F) * (p.beta() - p.beta_of(y) / (al * al) * (p.a() * y));
}

Mat angular_form(const RandersPoint& p, const Vec& y) {
  const double al = checked_alpha(p, y, "angular_form");
  const double F = al + p.beta_of(y);
  const Vec yf = p.a() * y / al;
  return (F / al) * (p.a() - yf * yf.transpose());
}

double cartan_torsion(const RandersPoint& p, const Vec& y, const Vec& u, const Vec& v, const Vec& w) {
  const Vec I = mean_cartan_torsion(p, y);
  const Mat h = angular_form(p, y);
  const double m2 = p.dim() + 1;
  return (I.dot(u) * v.dot(h * w) + I.dot(v) * u.dot(h * w) + I.dot(w) * u.dot(h * v)) / m2;
}

Mat cartan_contract(const RandersPoint& p, const Vec& y, const Vec& w) {
  const Vec I = mean_cartan_torsion(p, y);
  const Mat h = angular_form(p, y);
  const double m2 = p.dim() + 1;
  const Vec hw = h * w;
  return (I * hw.transpose() + hw * I.transpose() + I.dot(w) * h) / m2;
}

double distortion(const RandersPoint& p, const Vec& y) {
  const Mat g = fundamental_tensor(p, y);
  const double det_g = g.determinant();
  const double det_a = p.a().determinant();
  if (!(det_g > 0.0)) throw NumericError("distortion: g_y is not positive definite");
  // σ_F = sqrt(det a) (1 - b²)^{(n+1)/2} for the Busemann–Hausdorff volume, n = dim.
  const double b2 = p.beta_norm() * p.beta_norm();
  return 0.5 * std::log(det_g / det_a) - 0.5 * (p.dim() + 1) * std::log(1.0 - b2);
}

NormalData f_normal(const RandersPoint& p, const Vec& N) {
  if (N.size() != p.dim()) throw ShapeError("f_normal: N has wrong length");
  const double al = p.alpha(N);
  if (std::abs(al - 1.0) > 1e-9) throw PreconditionError("f_normal: N is not α-unit (α(N) = " + std::to_string(al) + ")");
  NormalData nd;
  nd.N = N;
  const double bN = p.beta_of(N);
  nd.beta_tan = p.beta_sharp() - bN * N;
  const double t2 = p.inner(nd.beta_tan, nd.beta_tan);
  nd.c = std::sqrt(std::max(0.0, 1.0 - t2));
  nd.c_hat = nd.c + bN;
  nd.n = nd.c_hat * N - p.beta_sharp();
  nd.nu = nd.n / (nd.c * nd.c_hat);
  return nd;
}

double distortion_at_normal(const RandersPoint& p, const NormalData& nd) {
  const double m2 = p.dim() + 1;
  return 0.5 * m2 * std::log(nd.c / (2.0 * nd.c - nd.c_hat));
}

namespace {

void require_tangent(const RandersPoint& p, const NormalData& nd, const Vec& u, const char* who) {
  if (u.size() != p.dim()) throw ShapeError(std::string(who) + ": vector has wrong length");
  const double s = std::abs(p.inner(u, nd.N));
  if (s > 1e-9 * std::max(1.0, p.alpha(u)))
    throw PreconditionError(std::string(who) + ": vector is not tangent to the leaf");
}

}  // namespace

double leaf_metric(const RandersPoint& p, const NormalData& nd, const Vec& u, const Vec& v) {
  require_tangent(p, nd, u, "leaf_metric");
  require_tangent(p, nd, v, "leaf_metric");
  return nd.c * nd.c_hat * (p.inner(u, v) - p.beta_of(u) * p.beta_of(v));
}

Vec g_raise(const RandersPoint& p, const NormalData& nd, const Vec& U) {
  require_tangent(p, nd, U, "g_raise");
  return (U + p.beta_of(U) / (nd.c * nd.c) * nd.beta_tan) / (nd.c * nd.c_hat);
}

Vec perp_beta_project(const RandersPoint& p, const NormalData& nd, const Vec& X) {
  require_tangent(p, nd, X, "perp_beta_project");
  const double t2 = p.inner(nd.beta_tan, nd.beta_tan);
  if (std::sqrt(t2) < kBetaTanFloor) return X;
  return X - p.inner(X, nd.beta_tan) / t2 * nd.beta_tan;
}

}  // namespace rf
