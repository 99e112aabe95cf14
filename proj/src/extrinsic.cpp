#include "randers_foliate/extrinsic.hpp"

#include <cmath>
#include <limits>

#include "randers_foliate/error.hpp"

namespace rf {

namespace {

inline int idx3(int i, int j, int k, int D) { return (i * D + j) * D + k; }

Mat covariant_jacobian(const Field& grad, const Field& gamma, std::size_t node, const Vec& v, int D) {
  Mat J(D, D);
  for (int i = 0; i < D; ++i)
    for (int k = 0; k < D; ++k) {
      double s = grad.at(i * D + k, node);
      for (int j = 0; j < D; ++j) s += gamma.at(idx3(i, k, j, D), node) * v(j);
      J(i, k) = s;
    }
  return J;
}

Vec perp(const Vec& X, const Vec& bt) {
  const double t2 = bt.squaredNorm();
  if (std::sqrt(t2) < kBetaTanFloor) return X;
  return X - X.dot(bt) / t2 * bt;
}

Field leaf_op(const GridPtr& g, int m, const char* name) { return Field(g, {m, m}, {1, 1}, name); }
Field leaf_vec(const GridPtr& g, int m, const char* name) { return Field(g, {m}, {1, 0}, name); }

}  // namespace

Mat g_from_normal(const Mat& a, const Vec& beta, const Vec& n) {
  const Vec nf = a * n;
  const double bn = beta.dot(n);
  return (1.0 + bn) * a + beta * beta.transpose() - bn * nf * nf.transpose() + beta * nf.transpose() +
         nf * beta.transpose();
}

Field g_metric_field(const FoliatedRandersManifold& M, const BarGeometry& bar) {
  const int D = M.dim();
  Field g(M.grid, {D, D}, {0, 2}, "g");
  for (std::size_t node = 0; node < M.grid->node_count(); ++node) {
    const Vec n = bar.c_hat.at(0, node) * M.normal.vec(node) - M.beta_sharp.vec(node);
    g.set_mat(node, g_from_normal(M.metric.mat(node), M.beta.vec(node), n));
  }
  return g;
}

Mat cAg_initial(const FormulaInputs& in) {
  const int m = static_cast<int>(in.Abar.rows());
  const double c = in.c, ch = in.c_hat;
  const Vec& bt = in.bt;
  const Vec Abt = in.Abar * bt;
  const Vec W = Abt - bt.dot(Abt) * bt + 2.0 / ch * (in.Def * bt) + in.U + bt.dot(in.U) * bt;
  return in.Abar - 0.5 / (c * ch * ch) * in.n_c_c_hat * Mat::Identity(m, m) + in.Def / ch +
         0.5 * (in.U - Abt) * bt.transpose() + 0.5 / (c * c) * bt * W.transpose();
}

Mat cAg_split(const FormulaInputs& in) {
  const int m = static_cast<int>(in.Abar.rows());
  const double c = in.c, ch = in.c_hat;
  const Vec& bt = in.bt;
  if (bt.norm() < kBetaTanFloor) throw DomainError("cAg_split: β♯⊤ vanishes");
  const Vec Abt = in.Abar * bt;
  const Vec left = perp(in.U - Abt, bt);
  const Vec right = 2.0 / ch * (in.Def * bt) + perp(in.U + Abt, bt);
  return in.Abar - 0.5 / (c * ch * ch) * in.n_c_c_hat * Mat::Identity(m, m) + in.Def / ch +
         0.5 * left * bt.transpose() + 0.5 / (c * c) * bt * right.transpose() +
         bt.dot(in.U) / (c * c * (1.0 - c * c)) * bt * bt.transpose();
}

Mat cAg_parallel_orthogonal(const FormulaInputs& in) {
  const double c = in.c;
  const Vec& bt = in.bt;
  const Vec Abt = in.Abar * bt;
  return in.Abar - 0.5 * perp(Abt + c * in.Zbar, bt) * bt.transpose() +
         0.5 / (c * c) * bt * perp(Abt - c * in.Zbar, bt).transpose() -
         bt.dot(in.Zbar) / (c * (1.0 - c * c)) * bt * bt.transpose();
}

RankOnePieces rank_one_pieces(const FormulaInputs& in) {
  RankOnePieces r;
  const double c = in.c, ch = in.c_hat;
  const Vec& bt = in.bt;
  const Vec Abt = in.Abar * bt;
  r.delta = -0.5 / (c * ch * ch) * in.n_c_c_hat;
  r.U1 = 0.5 / (c * c) * (2.0 / ch * (in.Def * bt) + perp(in.U + Abt, bt));
  r.U2 = 0.5 * perp(in.U - Abt, bt);
  const double t2 = bt.squaredNorm();
  r.a3 = std::sqrt(t2) < kBetaTanFloor ? 0.0 : bt.dot(in.U) / (c * c * (1.0 - c * c));
  r.A1 = bt * r.U1.transpose();
  r.A2 = r.U2 * bt.transpose();
  r.A3 = r.a3 * bt * bt.transpose();
  return r;
}

RankOnePieces rank_one_pieces_parallel(const FormulaInputs& in) {
  RankOnePieces r;
  const double c = in.c, ch = in.c_hat;
  const Vec& bt = in.bt;
  const Vec Abt = in.Abar * bt;
  r.delta = -0.5 / (c * ch * ch) * in.n_c_c_hat;
  r.U1 = 0.5 / (c * ch) * perp(Abt + (c - 2.0 * ch) * in.Zbar, bt);
  r.U2 = 0.5 * (c - 2.0 * ch) / ch * perp(Abt + c * in.Zbar, bt);
  const double one_minus = 1.0 - c * c;
  r.a3 = std::sqrt(bt.squaredNorm()) < kBetaTanFloor
             ? 0.0
             : (c - 2.0 * ch) / (c * ch * one_minus) * bt.dot(in.Zbar) -
                   (ch - c) / (c * c * ch * one_minus) * Abt.dot(bt);
  r.A1 = bt * r.U1.transpose();
  r.A2 = r.U2 * bt.transpose();
  r.A3 = r.a3 * bt * bt.transpose();
  return r;
}

Vec z_formula(const FormulaInputs& in) {
  const double c = in.c, ch = in.c_hat;
  const Vec inner = in.Zbar - in.grad_c_hat / ch;
  return in.Zbar / (c * ch) - in.grad_c_hat / (c * ch * ch) + in.bt.dot(inner) / (c * c * c * ch) * in.bt;
}

Mat cbar_twice(const FormulaInputs& in, bool use_c_hat) {
  const int m = static_cast<int>(in.Abar.rows());
  const double c = in.c, ch = in.c_hat;
  const Vec& bt = in.bt;
  const Vec& Zb = in.Zbar;
  const Vec& grad = use_c_hat ? in.grad_c_hat : in.grad_c;
  const double bZ = bt.dot(Zb);
  const double coef_I = ((ch - 2.0 / c) * in.bt_c_hat + (c - 1.0 / ch) * in.n_c_hat +
                         bZ * (c * ch - ch * ch + 2.0 / c * ch - 1.0)) /
                        (c * ch);
  const double coef_bb = ((2.0 / c - 3.0 * ch) * in.bt_c_hat + (1.0 / ch - 3.0 * c) * in.n_c_hat +
                          bZ * (3.0 * ch * ch - 3.0 * c * ch - 2.0 / c * ch + 1.0)) /
                         (c * ch);
  return Zb * bt.transpose() + bt * Zb.transpose() - (bt * grad.transpose() + grad * bt.transpose()) / ch +
         coef_I * Mat::Identity(m, m) + coef_bb * bt * bt.transpose();
}

Mat csharp_n_formula(const FormulaInputs& in, bool use_c_hat) {
  return csharp_nu_from_cbar_twice(in, cbar_twice(in, use_c_hat)) / (in.c * in.c_hat);
}

Mat cn_z_display(const FormulaInputs& in) { return cbar_twice(in, true); }

FormulaInputs with_corrected_u(const FormulaInputs& in) {
  FormulaInputs out = in;
  out.U += (1.0 - in.c / in.c_hat) * (in.Abar * in.bt + in.c * in.Zbar);
  return out;
}

Mat cbar_twice_derived(const FormulaInputs& in) {
  const int m = static_cast<int>(in.Abar.rows());
  const Vec& bt = in.bt;
  const double k = (bt.dot(in.Zbar) - in.bt_c_hat / in.c_hat) / (in.c * in.c);
  return bt * in.Zbar.transpose() + in.Zbar * bt.transpose() -
         (bt * in.grad_c_hat.transpose() + in.grad_c_hat * bt.transpose()) / in.c_hat +
         k * (Mat::Identity(m, m) - bt * bt.transpose());
}

Mat csharp_nu_from_cbar_twice(const FormulaInputs& in, const Mat& cbar2) {
  const Mat Cbar = 0.5 * cbar2;
  return Cbar + in.bt * (in.bt.transpose() * Cbar) / (in.c * in.c);
}

ExtrinsicBundle build_extrinsic(const FoliatedRandersManifold& M, const BarGeometry& bar) {
  const auto& grid = M.grid;
  const int D = M.dim(), m = D - 1;
  const std::size_t count = grid->node_count();
  ExtrinsicBundle X;
  X.scheme = bar.scheme;
  X.g = g_metric_field(M, bar);
  X.n = Field(grid, {D}, {1, 0}, "n");
  X.nu = Field(grid, {D}, {1, 0}, "nu");
  for (std::size_t node = 0; node < count; ++node) {
    const double c = bar.c.at(0, node), ch = bar.c_hat.at(0, node);
    const Vec n = ch * M.normal.vec(node) - M.beta_sharp.vec(node);
    X.n.set_vec(node, n);
    X.nu.set_vec(node, n / (c * ch));
  }
  // Independent route: Christoffels of g from its own numeric derivatives.
  X.g_christoffel = levi_civita(X.g, bar.scheme, M.quadrature_fraction);
  const Field dnu = gradient(X.nu, bar.scheme);

  X.Ag_direct = leaf_op(grid, m, "Ag_direct");
  X.Ag_formula = leaf_op(grid, m, "Ag_formula");
  X.Ag_initial = leaf_op(grid, m, "Ag_initial");
  X.Ag_stated = leaf_op(grid, m, "Ag_stated");
  X.Z_direct = leaf_vec(grid, m, "Z_direct");
  X.Z_formula = leaf_vec(grid, m, "Z_formula");
  X.Z_direct_coord = Field(grid, {D}, {1, 0}, "Z_direct_coord");
  X.Csharp_direct = leaf_op(grid, m, "Csharp_nu");
  X.Csharp_formula = leaf_op(grid, m, "Csharp_nu_formula");
  X.Csharp_stated = leaf_op(grid, m, "Csharp_nu_stated");
  X.Csharp_stated_alt = leaf_op(grid, m, "Csharp_nu_stated_alt");
  X.Csharp_n_direct = leaf_op(grid, m, "Csharp_n");
  X.Cn_bilinear = leaf_op(grid, m, "Cn_Z");
  X.Cn_display = leaf_op(grid, m, "Cn_Z_display");
  X.Cn_derived = leaf_op(grid, m, "Cn_Z_derived");
  X.A = leaf_op(grid, m, "A");
  X.gram = leaf_op(grid, m, "g_leaf");
  X.delta = scalar_field(grid, "delta");
  X.inputs.resize(count);

  for (std::size_t node = 0; node < count; ++node) {
    if (!M.active(node)) continue;
    const Mat a = M.metric.mat(node);
    const Mat g = X.g.mat(node);
    const Vec N = M.normal.vec(node);
    const Vec nu = X.nu.vec(node);
    const Vec n = X.n.vec(node);
    const Mat E = bar.frame.mat(node);
    const Mat EtA = E.transpose() * a;
    const Mat G = E.transpose() * g * E;
    X.gram.set_mat(node, G);

    // Direct route: A^g(u) = -∇_u ν and Z = ∇_ν ν, both projected g-orthogonally to ν.
    const Mat gnu = covariant_jacobian(dnu, X.g_christoffel, node, nu, D);
    auto tangential = [&](const Vec& w) -> Vec { return w - w.dot(g * nu) * nu; };
    Mat Ag(m, m);
    for (int j = 0; j < m; ++j) Ag.col(j) = EtA * tangential(-gnu * E.col(j));
    X.Ag_direct.set_mat(node, Ag);
    const Vec Zc = tangential(gnu * nu);
    X.Z_direct_coord.set_vec(node, Zc);
    const Vec Zd = EtA * Zc;
    X.Z_direct.set_vec(node, Zd);

    // Formula route from the a-side data.
    FormulaInputs in;
    in.c = bar.c.at(0, node);
    in.c_hat = bar.c_hat.at(0, node);
    const Vec dc = bar.grad_c.vec(node), dch = bar.grad_c_hat.vec(node);
    const Vec bt_c = bar.beta_tan.vec(node);
    in.n_c_c_hat = (in.c_hat * dc + in.c * dch).dot(n);
    in.n_c_hat = dch.dot(n);
    in.N_c = dc.dot(N);
    in.bt_c_hat = dch.dot(bt_c);
    in.Abar = bar.shape.mat(node);
    in.Zbar = EtA * bar.curvature_vector.vec(node);
    in.bt = EtA * bt_c;
    in.grad_c_hat = E.transpose() * dch;
    in.grad_c = E.transpose() * dc;
    in.Def = EtA * bar.deformation.mat(node) * E;
    in.U = EtA * (bar.grad_beta_tan.mat(node) * n) / in.c_hat - in.c * in.Zbar;

    X.Ag_stated.set_mat(node, cAg_initial(in) / in.c);
    const FormulaInputs fixed = with_corrected_u(in);
    const Mat initial = cAg_initial(fixed) / in.c;
    X.Ag_initial.set_mat(node, initial);
    X.Ag_formula.set_mat(node, in.bt.norm() < kBetaTanFloor ? initial : Mat(cAg_split(fixed) / in.c));
    const Vec Zf = z_formula(in);
    X.Z_formula.set_vec(node, Zf);
    X.delta.at(0, node) = -0.5 / (in.c * in.c_hat * in.c_hat) * in.n_c_c_hat;

    // Cartan torsion terms.
    const RandersPoint p(a, M.beta.vec(node));
    const Mat Cnu = E.transpose() * cartan_contract(p, nu, Zc) * E;
    const Mat Csharp = G.ldlt().solve(Cnu);
    X.Csharp_direct.set_mat(node, Csharp);
    const Mat Cn = E.transpose() * cartan_contract(p, n, Zc) * E;
    X.Csharp_n_direct.set_mat(node, G.ldlt().solve(Cn));
    const Mat cbar2 = cbar_twice_derived(in);
    X.Csharp_formula.set_mat(node, csharp_nu_from_cbar_twice(in, cbar2));
    X.Csharp_stated.set_mat(node, csharp_nu_from_cbar_twice(in, cbar_twice(in, false)));
    X.Csharp_stated_alt.set_mat(node, csharp_nu_from_cbar_twice(in, cbar_twice(in, true)));
    const Vec Zf_coord = E * Zf;
    X.Cn_bilinear.set_mat(node, E.transpose() * cartan_contract(p, n, Zf_coord) * E);
    X.Cn_display.set_mat(node, 0.5 * cn_z_display(in));
    X.Cn_derived.set_mat(node, 0.5 * cbar2);
    X.A.set_mat(node, Ag + Csharp);
    X.inputs[node] = std::move(in);
  }
  X.inputs_c = bar.c;
  X.inputs_c_hat = bar.c_hat;
  return X;
}

Field codazzi_residual_g(const FoliatedRandersManifold& M, const BarGeometry& bar, const ExtrinsicBundle& X) {
  for (double f : M.quadrature_fraction)
    if (f != 1.0) throw PreconditionError("codazzi_residual_g: needs a manifold without excision");
  const int D = M.dim(), m = D - 1;
  const Field dZ = gradient(X.Z_direct_coord, X.scheme);
  Field out = leaf_op(M.grid, m, "codazzi_residual_g");
  for (std::size_t node = 0; node < M.grid->node_count(); ++node) {
    const Mat gZ = covariant_jacobian(dZ, X.g_christoffel, node, X.Z_direct_coord.vec(node), D);
    const Mat E = bar.frame.mat(node);
    const Mat S = E.transpose() * X.g.mat(node) * gZ * E;
    out.set_mat(node, 0.5 * (S - S.transpose()));
  }
  return out;
}

double g_asymmetry(const FoliatedRandersManifold& M, const ExtrinsicBundle& X, const Field& op) {
  double worst = 0.0;
  for (std::size_t node = 0; node < M.grid->node_count(); ++node) {
    if (!M.active(node)) continue;
    const Mat S = X.gram.mat(node) * op.mat(node);
    worst = std::max(worst, (S - S.transpose()).cwiseAbs().maxCoeff());
  }
  return worst;
}

double max_difference(const FoliatedRandersManifold& M, const Field& a, const Field& b) {
  if (a.shape() != b.shape()) throw ShapeError("max_difference: shapes differ");
  double worst = 0.0;
  for (std::size_t node = 0; node < M.grid->node_count(); ++node) {
    if (!M.active(node)) continue;
    double s = 0.0;
    for (int c = 0; c < a.components(); ++c) {
      const double d = a.at(c, node) - b.at(c, node);
      s += d * d;
    }
    worst = std::max(worst, std::sqrt(s));
  }
  return worst;
}

std::vector<double> ratio_field(const FoliatedRandersManifold& M, const Field& x, const Field& y) {
  std::vector<double> r(M.grid->node_count(), std::numeric_limits<double>::quiet_NaN());
  for (std::size_t node = 0; node < M.grid->node_count(); ++node) {
    if (!M.active(node)) continue;
    double xy = 0.0, yy = 0.0;
    for (int c = 0; c < x.components(); ++c) {
      xy += x.at(c, node) * y.at(c, node);
      yy += y.at(c, node) * y.at(c, node);
    }
    if (yy > 1e-20) r[node] = xy / yy;
  }
  return r;
}

}  // namespace rf
