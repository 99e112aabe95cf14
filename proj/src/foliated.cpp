#include "randers_foliate/foliated.hpp"

#include <cmath>

#include "randers_foliate/error.hpp"
#include "randers_foliate/kernels.hpp"

namespace rf {

namespace {

inline int idx3(int i, int j, int k, int D) { return (i * D + j) * D + k; }

Mat inverse_spd(const Mat& a, std::size_t node) {
  Eigen::LLT<Mat> llt(a);
  if (llt.info() != Eigen::Success)
    throw NumericError("metric is not positive definite at node " + std::to_string(node));
  return llt.solve(Mat::Identity(a.rows(), a.cols()));
}

// ∂_k of a rank-1 field at a node: M(i, k) = ∂_k v^i.
Mat jacobian(const Field& grad, std::size_t node, int D) {
  Mat J(D, D);
  for (int i = 0; i < D; ++i)
    for (int k = 0; k < D; ++k) J(i, k) = grad.at(i * D + k, node);
  return J;
}

// (∇̄v)^i_k = ∂_k v^i + Γ^i_{kj} v^j.
Mat covariant_jacobian(const Field& grad, const Field& gamma, std::size_t node, const Vec& v, int D) {
  Mat J = jacobian(grad, node, D);
  for (int i = 0; i < D; ++i)
    for (int k = 0; k < D; ++k) {
      double s = 0.0;
      for (int j = 0; j < D; ++j) s += gamma.at(idx3(i, k, j, D), node) * v(j);
      J(i, k) += s;
    }
  return J;
}

Field vector_field(const GridPtr& g, int D, const char* name) { return Field(g, {D}, {1, 0}, name); }
Field operator_field(const GridPtr& g, int r, int c, const char* name) { return Field(g, {r, c}, {1, 1}, name); }

}  // namespace

Field levi_civita(const Field& metric, Scheme scheme, const std::vector<double>& active) {
  const auto& g = metric.grid();
  const int D = g->dim();
  if (metric.shape() != std::vector<int>{D, D}) throw ShapeError("levi_civita: metric must have shape {D, D}");
  const Field dg = gradient(metric, scheme);  // comp (i*D + j)*D + k = ∂_k g_ij
  Field gamma(g, {D, D, D}, {1, 2}, "christoffel");
  for (std::size_t node = 0; node < g->node_count(); ++node) {
    if (!active.empty() && active[node] <= 0.0) continue;
    const Mat ginv = inverse_spd(metric.mat(node), node);
    auto d = [&](int i, int j, int k) { return dg.at(idx3(i, j, k, D), node); };
    for (int i = 0; i < D; ++i)
      for (int j = 0; j < D; ++j)
        for (int k = 0; k < D; ++k) {
          double s = 0.0;
          for (int l = 0; l < D; ++l) s += ginv(i, l) * (d(l, k, j) + d(l, j, k) - d(j, k, l));
          gamma.at(idx3(i, j, k, D), node) = 0.5 * s;
        }
  }
  return gamma;
}

Mat leaf_frame(const Mat& a, const Vec& N) {
  const int D = static_cast<int>(a.rows());
  const Vec Nf = a * N;
  // Skip the coordinate axis most aligned with N; keep the others in axis order.
  int skip = 0;
  double best = -1.0;
  for (int k = 0; k < D; ++k) {
    const double align = std::abs(Nf(k)) / std::sqrt(a(k, k));
    if (align > best) {
      best = align;
      skip = k;
    }
  }
  Mat E(D, D - 1);
  int col = 0;
  for (int k = 0; k < D; ++k) {
    if (k == skip) continue;
    Vec v = Vec::Unit(D, k);
    v -= Nf(k) * N;
    for (int j = 0; j < col; ++j) v -= E.col(j).dot(a * v) * E.col(j);
    const double nv = std::sqrt(v.dot(a * v));
    if (!(nv > 1e-12)) throw NumericError("leaf_frame: degenerate projected coordinate vector");
    E.col(col++) = v / nv;
  }
  return E;
}

BarGeometry extrinsic_bar(const FoliatedRandersManifold& M, Scheme scheme) {
  const auto& g = M.grid;
  const int D = M.dim(), m = D - 1;
  const std::size_t n = g->node_count();
  BarGeometry B;
  B.scheme = scheme;
  B.christoffel = levi_civita(M.metric, scheme, M.quadrature_fraction);

  // Smooth primitive fields, sampled at every node (the chart may degenerate only at masked nodes,
  // and none of these need a^{-1}).
  B.beta_tan = vector_field(g, D, "beta_tan");
  B.c = scalar_field(g, "c");
  B.c_hat = scalar_field(g, "c_hat");
  for (std::size_t node = 0; node < n; ++node) {
    const Mat a = M.metric.mat(node);
    const Vec N = M.normal.vec(node), bs = M.beta_sharp.vec(node);
    const double bN = M.beta.vec(node).dot(N);
    const Vec bt = bs - bN * N;
    const double c = std::sqrt(std::max(0.0, 1.0 - bt.dot(a * bt)));
    B.beta_tan.set_vec(node, bt);
    B.c.at(0, node) = c;
    B.c_hat.at(0, node) = c + bN;
  }
  const Field dN = gradient(M.normal, scheme);
  const Field db = gradient(M.beta_sharp, scheme);
  const Field dbt = gradient(B.beta_tan, scheme);
  B.grad_c = gradient(B.c, scheme);
  B.grad_c_hat = gradient(B.c_hat, scheme);

  B.frame = Field(g, {D, m}, {1, 0}, "frame");
  B.grad_normal = operator_field(g, D, D, "grad_N");
  B.shape_coord = operator_field(g, D, D, "Abar_coord");
  B.shape = operator_field(g, m, m, "Abar");
  B.curvature_vector = vector_field(g, D, "Zbar");
  B.grad_beta = operator_field(g, D, D, "grad_beta");
  B.deformation = operator_field(g, D, D, "Def_beta");
  B.grad_beta_tan = operator_field(g, D, D, "grad_beta_tan");

  for (std::size_t node = 0; node < n; ++node) {
    if (!M.active(node)) continue;
    const Mat a = M.metric.mat(node);
    const Mat ainv = inverse_spd(a, node);
    const Vec N = M.normal.vec(node);
    const Mat P = Mat::Identity(D, D) - N * (a * N).transpose();  // a-orthogonal projection onto T𝔉

    const Mat gN = covariant_jacobian(dN, B.christoffel, node, N, D);
    const Vec Zb = P * (gN * N);
    const Mat Ab = -P * gN * P;
    const Mat E = leaf_frame(a, N);
    B.frame.set_mat(node, E);
    B.grad_normal.set_mat(node, gN);
    B.curvature_vector.set_vec(node, Zb);
    B.shape_coord.set_mat(node, Ab);
    B.shape.set_mat(node, E.transpose() * a * Ab * E);

    const Mat gb = covariant_jacobian(db, B.christoffel, node, M.beta_sharp.vec(node), D);
    B.grad_beta.set_mat(node, gb);
    B.deformation.set_mat(node, 0.5 * (gb + ainv * gb.transpose() * a));
    B.grad_beta_tan.set_mat(node, covariant_jacobian(dbt, B.christoffel, node, B.beta_tan.vec(node), D));
  }
  return B;
}

CurvatureBar curvature_bar(const FoliatedRandersManifold& M, const BarGeometry& bar) {
  const auto& g = M.grid;
  const int D = M.dim(), m = D - 1;
  const Field da = gradient(M.metric, bar.scheme);  // ∂_k a_ij at (i*D + j)*D + k
  const Field dda = hessian(M.metric, bar.scheme);  // ∂_k ∂_l a_ij at ((i*D + j)*D + k)*D + l
  CurvatureBar C;
  C.riemann = Field(g, {D, D, D, D}, {1, 3}, "riemann");
  C.r_normal = operator_field(g, m, m, "R_N");
  C.ricci_normal = scalar_field(g, "Ric_N");
  std::vector<double> dgam(static_cast<std::size_t>(D * D * D * D));
  for (std::size_t node = 0; node < g->node_count(); ++node) {
    if (!M.active(node)) continue;
    const Mat a = M.metric.mat(node);
    const Mat ainv = inverse_spd(a, node);
    auto d1 = [&](int i, int j, int k) { return da.at(idx3(i, j, k, D), node); };
    auto d2 = [&](int i, int j, int k, int l) { return dda.at(((i * D + j) * D + k) * D + l, node); };
    auto S = [&](int l, int j, int k) { return d1(l, k, j) + d1(l, j, k) - d1(j, k, l); };
    auto dS = [&](int l, int j, int k, int q) { return d2(l, k, j, q) + d2(l, j, k, q) - d2(j, k, l, q); };
    auto gam = [&](int i, int j, int k) { return bar.christoffel.at(idx3(i, j, k, D), node); };
    // ∂_q Γ^i_{jk} = ½ ∂_q(a^{il}) S_{ljk} + ½ a^{il} ∂_q S_{ljk}, with ∂_q a^{-1} = -a^{-1}(∂_q a)a^{-1}.
    for (int q = 0; q < D; ++q) {
      Mat daq(D, D);
      for (int i = 0; i < D; ++i)
        for (int j = 0; j < D; ++j) daq(i, j) = d1(i, j, q);
      const Mat dinv = -ainv * daq * ainv;
      for (int i = 0; i < D; ++i)
        for (int j = 0; j < D; ++j)
          for (int k = 0; k < D; ++k) {
            double s = 0.0;
            for (int l = 0; l < D; ++l) s += dinv(i, l) * S(l, j, k) + ainv(i, l) * dS(l, j, k, q);
            dgam[static_cast<std::size_t>(idx3(i, j, k, D) * D + q)] = 0.5 * s;
          }
    }
    auto dG = [&](int i, int j, int k, int q) { return dgam[static_cast<std::size_t>(idx3(i, j, k, D) * D + q)]; };
    const Vec N = M.normal.vec(node);
    Mat RN = Mat::Zero(D, D);
    for (int i = 0; i < D; ++i)
      for (int j = 0; j < D; ++j)
        for (int k = 0; k < D; ++k)
          for (int l = 0; l < D; ++l) {
            double r = dG(i, l, j, k) - dG(i, k, j, l);
            for (int p = 0; p < D; ++p) r += gam(i, k, p) * gam(p, l, j) - gam(i, l, p) * gam(p, k, j);
            C.riemann.at(((i * D + j) * D + k) * D + l, node) = r;
            RN(i, k) += r * N(j) * N(l);
          }
    const Mat E = bar.frame.mat(node);
    const Mat RNf = E.transpose() * a * RN * E;
    C.r_normal.set_mat(node, RNf);
    C.ricci_normal.at(0, node) = RNf.trace();
  }
  return C;
}

Field riccati_residual(const FoliatedRandersManifold& M, const BarGeometry& bar, const CurvatureBar& curv) {
  for (double f : M.quadrature_fraction)
    if (f != 1.0) throw PreconditionError("riccati_residual: needs a manifold without excision");
  const auto& g = M.grid;
  const int D = M.dim(), m = D - 1;
  const Field dA = gradient(bar.shape_coord, bar.scheme);        // ∂_k Ā^i_j at (i*D + j)*D + k
  const Field dZ = gradient(bar.curvature_vector, bar.scheme);  // ∂_k Z̄^i
  Field out = operator_field(g, m, m, "riccati_residual");
  for (std::size_t node = 0; node < g->node_count(); ++node) {
    const Mat a = M.metric.mat(node);
    const Mat ainv = inverse_spd(a, node);
    const Vec N = M.normal.vec(node);
    const Vec Zb = bar.curvature_vector.vec(node);
    const Mat Ab = bar.shape_coord.mat(node);
    auto gam = [&](int i, int j, int k) { return bar.christoffel.at(idx3(i, j, k, D), node); };
    Mat nablaN_A = Mat::Zero(D, D);
    for (int i = 0; i < D; ++i)
      for (int j = 0; j < D; ++j) {
        double s = 0.0;
        for (int k = 0; k < D; ++k) {
          double t = dA.at(idx3(i, j, k, D), node);
          for (int p = 0; p < D; ++p) t += gam(i, k, p) * Ab(p, j) - gam(p, k, j) * Ab(i, p);
          s += N(k) * t;
        }
        nablaN_A(i, j) = s;
      }
    const Mat gZ = covariant_jacobian(dZ, bar.christoffel, node, Zb, D);
    const Mat defZ = 0.5 * (gZ + ainv * gZ.transpose() * a);
    const Mat E = bar.frame.mat(node);
    const Mat Af = bar.shape.mat(node);
    const Vec Zf = E.transpose() * a * Zb;
    const Mat rhs = E.transpose() * a * defZ * E + E.transpose() * a * nablaN_A * E - Af * Af - Zf * Zf.transpose();
    out.set_mat(node, curv.r_normal.mat(node) - rhs);
  }
  return out;
}

Field codazzi_residual_bar(const FoliatedRandersManifold& M, const BarGeometry& bar) {
  for (double f : M.quadrature_fraction)
    if (f != 1.0) throw PreconditionError("codazzi_residual_bar: needs a manifold without excision");
  const auto& g = M.grid;
  const int D = M.dim(), m = D - 1;
  const Field dZ = gradient(bar.curvature_vector, bar.scheme);
  Field out = operator_field(g, m, m, "codazzi_residual");
  for (std::size_t node = 0; node < g->node_count(); ++node) {
    const Mat a = M.metric.mat(node);
    const Mat gZ = covariant_jacobian(dZ, bar.christoffel, node, bar.curvature_vector.vec(node), D);
    const Mat E = bar.frame.mat(node);
    const Mat S = E.transpose() * a * gZ * E;  // S(i, j) = ⟨∇̄_{e_j} Z̄, e_i⟩
    out.set_mat(node, 0.5 * (S - S.transpose()));
  }
  return out;
}

Field divergence_a(const FoliatedRandersManifold& M, const Field& X, Scheme scheme) {
  const auto& g = M.grid;
  const int D = M.dim();
  Field weighted(g, {D}, {1, 0});
  std::vector<double> root(g->node_count());
  for (std::size_t node = 0; node < g->node_count(); ++node) {
    root[node] = std::sqrt(std::max(0.0, M.metric.mat(node).determinant()));
    for (int i = 0; i < D; ++i) weighted.at(i, node) = root[node] * X.at(i, node);
  }
  Field div = scalar_field(g, "div");
  for (int k = 0; k < D; ++k) {
    const Field dk = derivative(weighted, k, scheme);
    for (std::size_t node = 0; node < g->node_count(); ++node) div.at(0, node) += dk.at(k, node);
  }
  for (std::size_t node = 0; node < g->node_count(); ++node)
    div.at(0, node) = M.active(node) ? div.at(0, node) / root[node] : 0.0;
  return div;
}

std::string volume_name(Volume v) {
  switch (v) {
    case Volume::a: return "dV_a";
    case Volume::g: return "dV_g";
    case Volume::F: return "dV_F";
  }
  return "";
}

std::vector<double> volume_weights(const FoliatedRandersManifold& M, Volume volume) {
  const auto& g = *M.grid;
  const int D = M.dim();
  const double cell = g.cell_volume();
  const double power = 0.5 * (D + 1);  // (m + 2)/2
  std::vector<double> w(g.node_count(), 0.0);
  for (std::size_t node = 0; node < g.node_count(); ++node) {
    if (!M.active(node)) continue;
    const Mat a = M.metric.mat(node);
    double factor = 1.0;
    if (volume != Volume::a) {
      const Vec N = M.normal.vec(node), bs = M.beta_sharp.vec(node), b = M.beta.vec(node);
      if (volume == Volume::F) {
        factor = std::pow(1.0 - b.dot(bs), power);
      } else {
        const double bN = b.dot(N);
        const Vec bt = bs - bN * N;
        const double c = std::sqrt(std::max(0.0, 1.0 - bt.dot(a * bt)));
        factor = std::pow(c * (c + bN), power);
      }
    }
    w[node] = M.quadrature_fraction[node] * cell * std::sqrt(a.determinant()) * factor;
  }
  return w;
}

double integrate(const std::vector<double>& f, const FoliatedRandersManifold& M, Volume volume) {
  const std::size_t n = M.grid->node_count();
  if (f.size() != n) throw ShapeError("integrate: field has wrong size");
  const auto w = volume_weights(M, volume);
  std::vector<double> masked(n, 0.0);
  for (std::size_t node = 0; node < n; ++node) {
    if (!M.active(node)) continue;
    if (!std::isfinite(f[node])) throw NumericError("integrate: non-finite value at node " + std::to_string(node));
    masked[node] = f[node];
  }
  std::vector<double> prod(n);
  kernels::multiply(masked.data(), w.data(), prod.data(), n);
  return kernels::pairwise_sum(prod.data(), n);
}

double integrate(const Field& f, const FoliatedRandersManifold& M, Volume volume) {
  if (f.components() != 1) throw ShapeError("integrate: scalar field expected");
  auto c = f.component(0);
  return integrate(std::vector<double>(c.begin(), c.end()), M, volume);
}

}  // namespace rf
