#include "randers_foliate/verifier.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <functional>
#include <map>
#include <mutex>
#include <thread>

#include "randers_foliate/error.hpp"
#include "randers_foliate/kernels.hpp"
#include "randers_foliate/matinv.hpp"

namespace rf {

std::string verdict_name(Verdict v) {
  switch (v) {
    case Verdict::pass: return "pass";
    case Verdict::fail: return "fail";
    default: return "not-applicable";
  }
}

std::string relation_name(Relation r) { return r == Relation::equal ? "equal" : "at-least"; }

const std::vector<FormulaInfo>& formula_registry() {
  static const std::vector<FormulaInfo> reg = {
      {"reeb-F", "reeb", false, false, 1e-6, "∫σ1(A) dV_F = 0"},
      {"reeb-a", "reeb", false, false, 1e-6, "∫σ1(Ā) dV_a = 0"},
      {"reeb-weighted", "reeb", false, false, 1e-6, "∫(f σ1(Ā) - N(f)) dV_a = 0"},
      {"reeb-g", "reeb", false, false, 1e-6, "∫σ1(A^g) dV_g = 0"},
      {"second-order-init", "second-order", false, false, 1e-6, "∫(2σ2(Ā) - Ric̄_N) dV_a = 0"},
      {"second-order-F", "second-order", false, false, 1e-6, "∫(σ2(A) - ½Ric_ν) dV_F = 0, Ric_ν = c⁻²Ric̄_N (Berwald)"},
      {"sigma2-berwald", "second-order", false, false, 1e-6, "second-order σ2 formula for parallel β♯, as stated"},
      {"sigma2-berwald-alt", "second-order", false, false, 1e-6,
       "sigma2-berwald with the ‖Z̄⊥‖² factor read as (c-2ĉ)²(1-c²)/(4ĉ²)"},
      {"sigma2-berwald-derived", "second-order", false, false, 1e-6,
       "c⁻²(σ2(cA) - ½Ric̄_N) with cA = Ā + δI + ĉ⁻¹Def + cC♯ + A1 + A2 + A3 from the recomputed pieces"},
      {"sigma2-berwald-const", "second-order", false, false, 1e-6, "sigma2-berwald reduced form for β(N) = const"},
      {"sigma2-tangent", "second-order", false, false, 1e-6, "σ2 formula for parallel β♯ tangent to the leaves"},
      {"curvature-series", "series", true, false, 1e-6, "∫Σ_{‖λ‖=k} σ_λ(B_1..B_k) dV_F = 0 on F-locally symmetric spaces"},
      {"space-form", "series", true, false, 1e-6, "∫σ_k(A) dV_F = K^{k/2} C(m/2, k/2) Vol_F or 0 when R_ν = K I"},
      {"randers-k", "series", true, false, 1e-6, "order-k σ_k formula for flat Berwald foliations, as stated"},
      {"randers-k-derived", "series", true, false, 1e-6,
       "c⁻ᵏσ_k(cA) with cA assembled from the recomputed rank-one pieces (flat Berwald)"},
      {"randers-k-tg", "series", true, false, 1e-6, "order-k formula for totally geodesic foliations (Ā = 0)"},
      {"randers-k-zbar0", "series", true, false, 1e-6, "randers-k reduced claim for β(N) = const, Z̄ = 0"},
      {"reeb-type", "series", false, false, 1e-6, "Reeb-type formula for flat Berwald foliations"},
      {"reeb-type-pointwise", "series", false, false, 1e-10, "max |reeb-type integrand - randers-k integrand (k = 1)|"},
      {"general-beta", "general", false, false, 1e-6, "∫(cĉ)^{m/2}c⁻²(ĉ-c)(cN(c) + cβ(Z̄) + ⟨Ā(β♯⊤),β♯⟩) dV_a = 0, as stated"},
      {"general-beta-c", "general", false, false, 1e-6, "∫⟨Ā(β♯⊤) + cZ̄, β♯⟩ dV_a = 0, gated on c and β(N) ≠ 0 constant"},
      {"general-beta-cc", "general", false, false, 1e-6, "∫⟨Ā(β♯⊤) + cZ̄, β♯⟩ dV_a = 0, gated on cĉ constant"},
      {"general-beta-corrected", "general", false, false, 1e-6, "Reeb formula for g through the recomputed trace of A^g"},
      {"eigen-beta", "general", false, false, 1e-6, "∫λ dV_a = 0 for β♯ = ε′X + εN, X a unit eigenfield of Ā, Z̄ = 0"},
      {"umbilicity", "inequality", false, false, 1e-6, "U^F ≥ (1-‖β‖²)^{(m+2)/2} m r ∫c⁻² dV_a"},
      {"energy", "inequality", false, false, 1e-8, "ℰ(ν) ≥ (1-‖β‖²)^{(m+2)/2}((m+1)/2 Vol_a + 1/(2m) ∫c⁻²Ric̄_N dV_a)"},
      {"energy-parallel", "inequality", false, false, 1e-10, "ℰ(ν) = (m+1)/2 Vol_F when ν is parallel"},
      {"sphere-energy", "inequality", false, false, 1e-8, "ℰ(ν) ≥ (1-‖β‖²)^{(m+2)/2} ((m+1)c²+1)/(2c²) Vol_a on the round sphere"},
      {"riemannian-vanishing", "vanishing", false, false, 1e-8, "sup ‖Ā(β♯⊤)‖ = 0 for parallel β♯ on a Riemannian foliation"},
      {"tangent-vanishing", "vanishing", false, false, 1e-8, "sup ‖Ā(β♯)‖ = 0 for parallel β♯ tangent to a Riemannian foliation"},
      {"randers-k-vanishing", "vanishing", false, false, 1e-8,
       "sup ‖Ā(β♯⊤)‖ = 0 from the reduced randers-k claim with k = 2"},
      {"sigma-identities", "matinv", false, true, 1e-9, "randomized σ_λ identity suite, worst residual"},
  };
  return reg;
}

namespace {

const FormulaInfo* find_info(const std::string& base) {
  for (const auto& f : formula_registry())
    if (f.id == base) return &f;
  return nullptr;
}

// "randers-k.k2" -> ("randers-k", 2); plain ids give k = 0.
std::pair<std::string, int> split_id(const std::string& id) {
  const auto pos = id.rfind(".k");
  if (pos == std::string::npos) return {id, 0};
  const std::string tail = id.substr(pos + 2);
  if (tail.empty() || !std::all_of(tail.begin(), tail.end(), [](char ch) { return ch >= '0' && ch <= '9'; }))
    return {id, 0};
  return {id.substr(0, pos), std::stoi(tail)};
}

bool is_group(const std::string& s) {
  for (const auto& f : formula_registry())
    if (f.group == s) return true;
  return false;
}

}  // namespace

void check_formula_selectors(const std::vector<std::string>& selectors) {
  if (selectors.empty()) throw ConfigError("no formulas selected");
  for (const auto& s : selectors) {
    if (s == "all" || is_group(s)) continue;
    const auto [base, k] = split_id(s);
    const FormulaInfo* info = find_info(base);
    if (!info) throw ConfigError("unknown formula '" + s + "'");
    if (k > 0 && !info->series) throw ConfigError("formula '" + base + "' takes no order");
    if (k < 0 || k > 16) throw ConfigError("formula order out of range in '" + s + "'");
  }
}

std::vector<std::string> expand_formulas(const std::vector<std::string>& selectors, int m) {
  check_formula_selectors(selectors);
  std::vector<std::string> chosen;
  auto add = [&](const std::string& id) {
    if (std::find(chosen.begin(), chosen.end(), id) == chosen.end()) chosen.push_back(id);
  };
  auto add_info = [&](const FormulaInfo& f) {
    if (!f.series) {
      add(f.id);
      return;
    }
    for (int k = 1; k <= m; ++k) add(f.id + ".k" + std::to_string(k));
  };
  for (const auto& s : selectors) {
    if (s == "all") {
      for (const auto& f : formula_registry()) add_info(f);
    } else if (is_group(s)) {
      for (const auto& f : formula_registry())
        if (f.group == s) add_info(f);
    } else {
      const auto [base, k] = split_id(s);
      const FormulaInfo& f = *find_info(base);
      if (k == 0)
        add_info(f);
      else if (k <= m)
        add(s);
    }
  }
  // Registry order, then k.
  auto rank = [](const std::string& id) {
    const auto [base, k] = split_id(id);
    const auto& reg = formula_registry();
    for (std::size_t i = 0; i < reg.size(); ++i)
      if (reg[i].id == base) return std::make_pair(i, k);
    return std::make_pair(reg.size(), k);
  };
  std::stable_sort(chosen.begin(), chosen.end(), [&](const auto& a, const auto& b) { return rank(a) < rank(b); });
  return chosen;
}

Geometry build_geometry(const ExampleSpec& spec, int resolution, Scheme scheme) {
  return build_geometry(build_example(spec, resolution), scheme);
}

Geometry build_geometry(FoliatedRandersManifold M, Scheme scheme) {
  M.validate();
  Geometry G;
  G.M = std::move(M);
  G.bar = extrinsic_bar(G.M, scheme);
  G.curv = curvature_bar(G.M, G.bar);
  G.X = build_extrinsic(G.M, G.bar);
  const Field df = gradient(G.M.test_function, scheme);
  G.N_f = scalar_field(G.M.grid, "N(f)");
  for (std::size_t node = 0; node < G.M.grid->node_count(); ++node)
    G.N_f.at(0, node) = df.vec(node).dot(G.M.normal.vec(node));
  G.div_beta = divergence_a(G.M, G.M.beta_sharp, scheme);
  return G;
}

namespace {

using matinv::Matrix;

Matrix dyn(const Mat& A) { return Matrix(A); }

Mat newton(const Mat& A, int r) { return Mat(matinv::newton_transform(dyn(A), r)); }

double sigma(const Mat& A, int k) { return matinv::sigma_single(dyn(A), k); }

Vec perp(const Vec& X, const Vec& bt) {
  const double t2 = bt.squaredNorm();
  if (std::sqrt(t2) < kBetaTanFloor) return X;
  return X - X.dot(bt) / t2 * bt;
}

double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

// Measured hypotheses. Thresholds are absolute and far above roundoff for the catalog fields.
constexpr double kParallelTol = 1e-8;
constexpr double kFlatTol = 1e-8;
constexpr double kZeroTol = 1e-10;
constexpr double kConstTol = 1e-10;

struct Probe {
  const Geometry& G;

  template <class F>
  double max_over(F f) const {
    double worst = 0.0;
    for (std::size_t node = 0; node < G.M.grid->node_count(); ++node)
      if (G.M.active(node)) worst = std::max(worst, f(node));
    return worst;
  }
  template <class F>
  double spread(F f) const {
    double lo = 1e300, hi = -1e300;
    for (std::size_t node = 0; node < G.M.grid->node_count(); ++node) {
      if (!G.M.active(node)) continue;
      const double v = f(node);
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    return hi >= lo ? hi - lo : 0.0;
  }
  template <class F>
  double min_over(F f) const {
    double best = 1e300;
    for (std::size_t node = 0; node < G.M.grid->node_count(); ++node)
      if (G.M.active(node)) best = std::min(best, f(node));
    return best;
  }
  std::size_t first_active() const {
    for (std::size_t node = 0; node < G.M.grid->node_count(); ++node)
      if (G.M.active(node)) return node;
    throw NumericError("manifold has no integrated node");
  }

  const FormulaInputs& in(std::size_t node) const { return G.X.inputs[node]; }
  double c(std::size_t node) const { return G.bar.c.at(0, node); }
  double ch(std::size_t node) const { return G.bar.c_hat.at(0, node); }
  double beta_N(std::size_t node) const { return ch(node) - c(node); }
  double beta_norm2(std::size_t node) const { return G.M.beta.vec(node).dot(G.M.beta_sharp.vec(node)); }

  HypothesisCheck berwald() const {
    const double v = max_over([&](std::size_t n) { return G.bar.grad_beta.mat(n).norm(); });
    return {"parallel β♯ (∇̄β = 0)", v, kParallelTol, v < kParallelTol};
  }
  HypothesisCheck flat() const {
    const double v = max_over([&](std::size_t n) {
      double s = 0.0;
      for (int i = 0; i < G.curv.riemann.components(); ++i) s = std::max(s, std::abs(G.curv.riemann.at(i, n)));
      return s;
    });
    return {"flat a (K̄ = 0)", v, kFlatTol, v < kFlatTol};
  }
  HypothesisCheck beta_nonzero() const {
    const double v = max_over([&](std::size_t n) { return std::sqrt(beta_norm2(n)); });
    return {"β♯ nonzero", v, kZeroTol, v > kZeroTol};
  }
  HypothesisCheck riemannian() const {
    const double v = max_over([&](std::size_t n) { return std::sqrt(beta_norm2(n)); });
    return {"β = 0", v, kZeroTol, v < kZeroTol};
  }
  HypothesisCheck bt_nonzero() const {
    const double v = min_over([&](std::size_t n) { return in(n).bt.norm(); });
    return {"β♯⊤ nowhere zero (min ‖β♯⊤‖)", v, kBetaTanFloor, v > kBetaTanFloor};
  }
  HypothesisCheck beta_N_const() const {
    const double v = spread([&](std::size_t n) { return beta_N(n); });
    return {"β(N) constant (spread)", v, kConstTol, v < kConstTol};
  }
  HypothesisCheck beta_N_zero() const {
    const double v = max_over([&](std::size_t n) { return std::abs(beta_N(n)); });
    return {"β♯ tangent to the leaves (sup |β(N)|)", v, kZeroTol, v < kZeroTol};
  }
  HypothesisCheck beta_N_nonzero() const {
    const double v = min_over([&](std::size_t n) { return std::abs(beta_N(n)); });
    return {"β(N) ≠ 0 (min |β(N)|)", v, kZeroTol, v > kZeroTol};
  }
  HypothesisCheck c_const() const {
    const double v = spread([&](std::size_t n) { return c(n); });
    return {"c constant (spread)", v, kConstTol, v < kConstTol};
  }
  HypothesisCheck cch_const() const {
    const double v = spread([&](std::size_t n) { return c(n) * ch(n); });
    return {"cĉ constant (spread)", v, kConstTol, v < kConstTol};
  }
  HypothesisCheck bt_norm_const() const {
    const double v = spread([&](std::size_t n) { return in(n).bt.norm(); });
    return {"‖β♯⊤‖ constant (spread)", v, kConstTol, v < kConstTol};
  }
  HypothesisCheck zbar_zero() const {
    const double v = max_over([&](std::size_t n) { return in(n).Zbar.norm(); });
    return {"Riemannian foliation (sup ‖Z̄‖)", v, kZeroTol, v < kZeroTol};
  }
  HypothesisCheck abar_zero() const {
    const double v = max_over([&](std::size_t n) { return in(n).Abar.norm(); });
    return {"totally geodesic (sup ‖Ā‖)", v, kZeroTol, v < kZeroTol};
  }
  HypothesisCheck nonsingular() const {
    return {"no singular set", G.M.excision.empty() ? 0.0 : 1.0, 0.5, G.M.excision.empty(), true};
  }
};

bool all_hold(const std::vector<HypothesisCheck>& hs) {
  return std::all_of(hs.begin(), hs.end(), [](const HypothesisCheck& h) { return h.holds; });
}

struct Integral {
  double value = 0.0;
  double scale = 0.0;
};

Integral integrate_with_scale(const std::vector<double>& f, const Geometry& G, Volume v) {
  std::vector<double> a(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) a[i] = std::abs(f[i]);
  return {integrate(f, G.M, v), integrate(a, G.M, v)};
}

template <class F>
std::vector<double> pointwise(const Geometry& G, F f) {
  std::vector<double> out(G.M.grid->node_count(), 0.0);
  for (std::size_t node = 0; node < out.size(); ++node)
    if (G.M.active(node)) out[node] = f(node);
  return out;
}

Sample integral_sample(const std::vector<double>& f, const Geometry& G, Volume v, double expected = 0.0) {
  const Integral I = integrate_with_scale(f, G, v);
  Sample s;
  s.value = I.value;
  s.scale = I.scale;
  s.expected = expected;
  return s;
}

// R_ν is known in closed form for flat Berwald (0) and Riemannian (R̄_N) instances.
bool known_r_nu(const Geometry& G, std::vector<HypothesisCheck>& hyps) {
  const Probe P{G};
  const HypothesisCheck riem = P.riemannian();
  if (riem.holds) {
    hyps.push_back(riem);
    hyps.push_back({"locally symmetric a", 0.0, 0.0, G.M.profile.locally_symmetric, true});
    return G.M.profile.locally_symmetric;
  }
  const HypothesisCheck b = P.berwald(), f = P.flat();
  hyps.push_back(b);
  hyps.push_back(f);
  return b.holds && f.holds;
}

Mat r_nu(const Geometry& G, std::size_t node, bool riemannian) {
  const int m = G.M.leaf_dim();
  if (riemannian) return G.curv.r_normal.mat(node);
  return Mat::Zero(m, m);
}

// ---- individual formulas -------------------------------------------------------------------

// The k = 1, 2 members of the series are known for every Riemannian foliation and, through the
// series, for F-locally symmetric spaces; flat Berwald is the case certified here.
bool riemannian_or_flat_berwald(const Geometry& G, std::vector<HypothesisCheck>& hyps) {
  const Probe P{G};
  const HypothesisCheck riem = P.riemannian();
  hyps.push_back(riem);
  if (riem.holds) return true;
  const HypothesisCheck b = P.berwald(), f = P.flat();
  hyps.push_back(b);
  hyps.push_back(f);
  return b.holds && f.holds;
}

Sample reeb_F(const Geometry& G) {
  std::vector<HypothesisCheck> h;
  const bool ok = riemannian_or_flat_berwald(G, h);
  Sample s = integral_sample(pointwise(G, [&](std::size_t n) { return G.X.A.mat(n).trace(); }), G, Volume::F);
  s.applicable = ok;
  s.hypotheses = h;
  return s;
}

Sample reeb_a(const Geometry& G) {
  return integral_sample(pointwise(G, [&](std::size_t n) { return G.bar.shape.mat(n).trace(); }), G, Volume::a);
}

Sample reeb_weighted(const Geometry& G) {
  return integral_sample(pointwise(G,
                                   [&](std::size_t n) {
                                     return G.M.test_function.at(0, n) * G.bar.shape.mat(n).trace() -
                                            G.N_f.at(0, n);
                                   }),
                         G, Volume::a);
}

Sample reeb_g(const Geometry& G) {
  return integral_sample(pointwise(G, [&](std::size_t n) { return G.X.Ag_direct.mat(n).trace(); }), G, Volume::g);
}

Sample second_order_init(const Geometry& G) {
  const Probe P{G};
  std::vector<HypothesisCheck> h{P.nonsingular()};
  Sample s = integral_sample(
      pointwise(G, [&](std::size_t n) { return 2.0 * sigma(G.bar.shape.mat(n), 2) - G.curv.ricci_normal.at(0, n); }),
      G, Volume::a);
  s.applicable = all_hold(h);
  s.hypotheses = h;
  return s;
}

Sample second_order_F(const Geometry& G) {
  const Probe P{G};
  std::vector<HypothesisCheck> h{P.nonsingular()};
  const bool ok = riemannian_or_flat_berwald(G, h);
  Sample s = integral_sample(pointwise(G,
                                       [&](std::size_t n) {
                                         const double c = P.c(n);
                                         return sigma(G.X.A.mat(n), 2) - 0.5 * G.curv.ricci_normal.at(0, n) / (c * c);
                                       }),
                             G, Volume::F);
  s.applicable = ok && h.front().holds;
  s.hypotheses = h;
  return s;
}

double sigma2_berwald_integrand(const Geometry& G, std::size_t n, bool simplified) {
  const Probe P{G};
  const FormulaInputs& in = P.in(n);
  const double c = in.c, ch = in.c_hat, c2 = c * c, one = 1.0 - c2, k = c - 2.0 * ch;
  const Mat Cs = G.X.Csharp_direct.mat(n);
  const Mat B = in.Abar + c * Cs;
  const Vec& bt = in.bt;
  const Vec w = in.Abar * bt;
  const Vec wp = perp(w, bt), Zp = perp(in.Zbar, bt), Cbp = perp(Vec(Cs * bt), bt);
  const double wb = w.dot(bt), bZ = bt.dot(in.Zbar), Bbb = bt.dot(B * bt);
  const double zz_coef = simplified ? k * k * one / (4.0 * ch * ch) : c * k * k * one / (4.0 * c * ch * ch);
  const double val = sigma(B, 2) + (k / (c * ch) * wb - (ch - c) / (c2 * ch) * bZ) * B.trace() +
                     (ch - c) / (c * ch * one) * Bbb * wb - zz_coef * Zp.squaredNorm() +
                     k / (c * ch * one) * bZ * Bbb - (1.0 - k * k) / (4.0 * ch * ch) * wp.squaredNorm() -
                     k * (one + 2.0 * c * ch) / (2.0 * ch * ch) * wp.dot(Zp) -
                     (1.0 + c2 - 2.0 * c * ch) / (2.0 * ch) * wp.dot(Cbp) - k * (1.0 + c2) / (2.0 * ch) * Cbp.dot(Zp) -
                     0.5 * G.curv.ricci_normal.at(0, n);
  return val / c2;
}

Sample sigma2_berwald(const Geometry& G, bool simplified) {
  const Probe P{G};
  std::vector<HypothesisCheck> h{P.nonsingular(), P.berwald(), P.beta_nonzero(), P.bt_nonzero()};
  Sample s;
  if (P.bt_nonzero().holds)
    s = integral_sample(pointwise(G, [&](std::size_t n) { return sigma2_berwald_integrand(G, n, simplified); }), G, Volume::a);
  s.applicable = all_hold(h);
  s.hypotheses = h;
  return s;
}

// c·A from Ā, δ, Def, C♯ (direct) and the rank-one pieces of the recomputed comparison formula.
Mat cA_from_pieces(const Geometry& G, std::size_t n) {
  const FormulaInputs& in = G.X.inputs[n];
  const int m = static_cast<int>(in.Abar.rows());
  const RankOnePieces r = rank_one_pieces(with_corrected_u(in));
  return in.Abar + r.delta * Mat::Identity(m, m) + in.Def / in.c_hat + in.c * G.X.Csharp_direct.mat(n) + r.A1 + r.A2 +
         r.A3;
}

Sample sigma2_berwald_derived(const Geometry& G) {
  const Probe P{G};
  std::vector<HypothesisCheck> h{P.nonsingular(), P.berwald(), P.beta_nonzero(), P.bt_nonzero()};
  Sample s;
  if (P.bt_nonzero().holds)
    s = integral_sample(pointwise(G,
                                  [&](std::size_t n) {
                                    const double c = P.c(n);
                                    return (sigma(cA_from_pieces(G, n), 2) - 0.5 * G.curv.ricci_normal.at(0, n)) /
                                           (c * c);
                                  }),
                        G, Volume::a);
  s.applicable = all_hold(h);
  s.hypotheses = h;
  return s;
}

Sample sigma2_berwald_const(const Geometry& G) {
  const Probe P{G};
  std::vector<HypothesisCheck> h{P.nonsingular(), P.berwald(), P.beta_nonzero(), P.bt_nonzero(), P.beta_N_const()};
  Sample s = integral_sample(pointwise(G,
                                       [&](std::size_t n) {
                                         const FormulaInputs& in = P.in(n);
                                         const double c = in.c, ch = in.c_hat, c2 = c * c, k = c - 2.0 * ch;
                                         const Mat Cs = G.X.Csharp_direct.mat(n);
                                         const Vec w = in.Abar * in.bt, Cb = Cs * in.bt;
                                         const Vec& Z = in.Zbar;
                                         return c * Cs.trace() * in.Abar.trace() - c * (in.Abar * Cs).trace() -
                                                (1.0 - k * k) / (4.0 * ch * ch) * w.squaredNorm() -
                                                k * (1.0 - c2 + 2.0 * c * ch) / (2.0 * ch * ch) * w.dot(Z) -
                                                (1.0 + c2 - 2.0 * c * ch) / (2.0 * ch) * w.dot(Cb) -
                                                c * k * k * (1.0 - c2) / (4.0 * c * ch * ch) * Z.squaredNorm() -
                                                k * (1.0 + c2) / (2.0 * ch) * Cb.dot(Z);
                                       }),
                             G, Volume::a);
  s.applicable = all_hold(h);
  s.hypotheses = h;
  return s;
}

Sample sigma2_tangent(const Geometry& G) {
  const Probe P{G};
  std::vector<HypothesisCheck> h{P.nonsingular(), P.berwald(), P.beta_nonzero(), P.beta_N_zero()};
  Sample s = integral_sample(pointwise(G,
                                       [&](std::size_t n) {
                                         const FormulaInputs& in = P.in(n);
                                         const double c = in.c, c2 = c * c;
                                         const Mat Cs = G.X.Csharp_direct.mat(n);
                                         const Vec w = in.Abar * in.bt, Cb = Cs * in.bt;
                                         const Vec& Z = in.Zbar;
                                         return c * Cs.trace() * in.Abar.trace() - c * (in.Abar * Cs).trace() -
                                                (1.0 - c2) / (4.0 * c2) * w.squaredNorm() +
                                                (1.0 + c2) / (2.0 * c) * w.dot(Z) - (1.0 - c2) / 4.0 * Z.squaredNorm() -
                                                (1.0 - c2) / (2.0 * c) * w.dot(Cb) + (1.0 + c2) / 2.0 * Cb.dot(Z);
                                       }),
                             G, Volume::a);
  s.applicable = all_hold(h);
  s.hypotheses = h;
  return s;
}

}  // namespace

double series_invariant(const Mat& A, const Mat& R, int k) {
  const int m = static_cast<int>(A.rows());
  if (k == 0) return 1.0;
  // B_1..B_k
  std::vector<Matrix> B;
  Mat Rj = Mat::Identity(m, m);
  double fact = 1.0;
  for (int i = 1; i <= k; ++i) {
    fact *= i;
    const int j = i / 2;
    if (i % 2 == 0) Rj = (j == 1 ? R : Mat(Rj * R));
    const double sign = (j % 2 == 0) ? 1.0 : -1.0;
    const Mat Bi = i % 2 == 0 ? Mat(sign / fact * Rj) : Mat(sign / fact * (Rj * A));
    B.push_back(dyn(Bi));
  }
  // Enumerate λ with Σ i λ_i = k.
  double total = 0.0;
  matinv::MultiIndex lambda(k, 0);
  std::function<void(int, int)> rec = [&](int i, int left) {
    if (i > k) {
      if (left == 0) total += matinv::sigma_multi(B, lambda);
      return;
    }
    for (int l = 0; l * i <= left; ++l) {
      lambda[i - 1] = l;
      rec(i + 1, left - l * i);
    }
    lambda[i - 1] = 0;
  };
  rec(1, k);
  return total;
}

namespace {

Sample curvature_series(const Geometry& G, int k) {
  std::vector<HypothesisCheck> h;
  const bool known = known_r_nu(G, h);
  Sample s;
  if (known) {
    const bool riem = Probe{G}.riemannian().holds;
    s = integral_sample(
        pointwise(G, [&](std::size_t n) { return series_invariant(G.X.A.mat(n), r_nu(G, n, riem), k); }), G,
        Volume::F);
  }
  s.applicable = known;
  s.hypotheses = h;
  if (!known) s.note = "R_ν only known for flat Berwald or locally symmetric Riemannian examples";
  return s;
}

Sample space_form(const Geometry& G, int k) {
  const Probe P{G};
  const int m = G.M.leaf_dim();
  std::vector<HypothesisCheck> h;
  double K = 0.0;
  bool ok = false;
  const HypothesisCheck riem = P.riemannian();
  if (riem.holds) {
    K = G.M.profile.curvature;
    const double dev = P.max_over([&](std::size_t n) {
      return (G.curv.r_normal.mat(n) - K * Mat::Identity(m, m)).norm();
    });
    h.push_back(riem);
    h.push_back({"R_ν = K I (sup ‖R̄_N - K I‖)", dev, kFlatTol, dev < kFlatTol});
    ok = dev < kFlatTol;
  } else {
    const HypothesisCheck b = P.berwald(), f = P.flat();
    h.push_back(b);
    h.push_back(f);
    ok = b.holds && f.holds;
  }
  Sample s = integral_sample(pointwise(G, [&](std::size_t n) { return sigma(G.X.A.mat(n), k); }), G, Volume::F);
  if (m % 2 == 0 && k % 2 == 0) {
    double vol = 0.0;
    for (double w : volume_weights(G.M, Volume::F)) vol += w;
    s.expected = std::pow(K, 0.5 * k) * binomial(m / 2, k / 2) * vol;
  }
  s.applicable = ok;
  s.hypotheses = h;
  return s;
}

std::vector<HypothesisCheck> randers_k_hyps(const Geometry& G) {
  const Probe P{G};
  return {P.berwald(), P.flat(), P.bt_nonzero()};
}

double randers_k_point(const Geometry& G, std::size_t n, int k) {
  const FormulaInputs& in = G.X.inputs[n];
  const int m = static_cast<int>(in.Abar.rows());
  const Mat I = Mat::Identity(m, m);
  const double delta = G.X.delta.at(0, n);
  const RankOnePieces r = rank_one_pieces_parallel(in);
  const Mat C = in.Abar + delta * I;
  const Mat D = in.c * G.X.Csharp_direct.mat(n);
  const Vec& bt = in.bt;
  double v = delta * (m - k + 1) * sigma(in.Abar, k - 1);
  for (int j = 1; j <= k; ++j) v += matinv::sigma_pair(dyn(C), dyn(D), k - j, j);
  v += (newton(C + D, k - 1) * bt).dot(r.U1);
  v += bt.dot(newton(C + D + r.A1, k - 1) * r.U2);
  v += r.a3 * bt.dot(newton(C + D + r.A1 + r.A2, k - 1) * bt);
  return v;
}

double reeb_type_point(const Geometry& G, std::size_t n) {
  const FormulaInputs& in = G.X.inputs[n];
  const int m = static_cast<int>(in.Abar.rows());
  const double c = in.c, ch = in.c_hat;
  return c * G.X.Csharp_direct.mat(n).trace() + m * G.X.delta.at(0, n) +
         (c - 2.0 * ch) / (c * ch) * in.bt.dot(in.Zbar) - (ch - c) / (c * c * ch) * (in.Abar * in.bt).dot(in.bt);
}

Sample randers_k(const Geometry& G, int k) {
  auto h = randers_k_hyps(G);
  Sample s;
  if (Probe{G}.bt_nonzero().holds)
    s = integral_sample(pointwise(G, [&](std::size_t n) { return randers_k_point(G, n, k); }), G, Volume::a);
  s.applicable = all_hold(h);
  s.hypotheses = h;
  return s;
}

Sample randers_k_derived(const Geometry& G, int k) {
  auto h = randers_k_hyps(G);
  Sample s;
  if (Probe{G}.bt_nonzero().holds)
    s = integral_sample(
        pointwise(G, [&](std::size_t n) { return sigma(cA_from_pieces(G, n), k) / std::pow(G.X.inputs[n].c, k); }), G,
        Volume::a);
  s.applicable = all_hold(h);
  s.hypotheses = h;
  return s;
}

Sample randers_k_tg(const Geometry& G, int k) {
  const Probe P{G};
  auto h = randers_k_hyps(G);
  h.push_back(P.abar_zero());
  Sample s;
  if (P.bt_nonzero().holds)
    s = integral_sample(
        pointwise(G,
                  [&](std::size_t n) {
                    const FormulaInputs& in = P.in(n);
                    const int m = static_cast<int>(in.Abar.rows());
                    const Mat I = Mat::Identity(m, m);
                    const double c = in.c, ch = in.c_hat, delta = G.X.delta.at(0, n), kk = c - 2.0 * ch;
                    const Mat Cs = G.X.Csharp_direct.mat(n);
                    const Vec& bt = in.bt;
                    const Vec Zp = perp(in.Zbar, bt);
                    const Mat P1 = kk / (2.0 * c * ch) * bt * Zp.transpose();
                    const Mat P2 = c * kk / (2.0 * ch) * Zp * bt.transpose();
                    return std::pow(c, k) * sigma(Cs, k) +
                           kk / (2.0 * c * ch) * (newton(Cs + delta * I, k - 1) * bt).dot(Zp) +
                           c * kk / (2.0 * ch) * bt.dot(newton(c * Cs + delta * I + P1, k - 1) * Zp) +
                           kk / (c * ch * (1.0 - c * c)) * bt.dot(in.Zbar) *
                               bt.dot(newton(c * Cs + delta * I + P1 + P2, k - 1) * bt);
                  }),
        G, Volume::a);
  s.applicable = all_hold(h);
  s.hypotheses = h;
  return s;
}

Sample randers_k_zbar0(const Geometry& G, int k) {
  const Probe P{G};
  auto h = randers_k_hyps(G);
  h.push_back(P.beta_N_const());
  h.push_back(P.zbar_zero());
  Sample s = integral_sample(pointwise(G,
                                       [&](std::size_t n) {
                                         const FormulaInputs& in = P.in(n);
                                         const double c = in.c, ch = in.c_hat;
                                         const Vec w = in.Abar * in.bt;
                                         return (1.0 + c * c - 2.0 * c * ch) / (2.0 * c * ch) *
                                                (newton(in.Abar, k - 1) * in.bt).dot(perp(w, in.bt));
                                       }),
                             G, Volume::a);
  s.applicable = all_hold(h);
  s.hypotheses = h;
  return s;
}

Sample reeb_type(const Geometry& G) {
  auto h = randers_k_hyps(G);
  Sample s = integral_sample(pointwise(G, [&](std::size_t n) { return reeb_type_point(G, n); }), G, Volume::a);
  s.applicable = all_hold(h);
  s.hypotheses = h;
  return s;
}

Sample reeb_type_pointwise(const Geometry& G) {
  const Probe P{G};
  auto h = randers_k_hyps(G);
  Sample s;
  if (P.bt_nonzero().holds) {
    s.value = P.max_over([&](std::size_t n) { return std::abs(reeb_type_point(G, n) - randers_k_point(G, n, 1)); });
    s.scale = P.max_over([&](std::size_t n) { return std::abs(reeb_type_point(G, n)); });
  }
  s.applicable = all_hold(h);
  s.hypotheses = h;
  return s;
}

double general_beta_point(const Geometry& G, std::size_t n) {
  const FormulaInputs& in = G.X.inputs[n];
  const int m = G.M.leaf_dim();
  const double c = in.c, ch = in.c_hat;
  return std::pow(c * ch, 0.5 * m) / (c * c) * (ch - c) *
         (c * in.N_c + c * in.bt.dot(in.Zbar) + (in.Abar * in.bt).dot(in.bt));
}

Sample general_beta(const Geometry& G) {
  return integral_sample(pointwise(G, [&](std::size_t n) { return general_beta_point(G, n); }), G, Volume::a);
}

Sample general_beta_gen(const Geometry& G, bool cc_reading) {
  const Probe P{G};
  std::vector<HypothesisCheck> h;
  if (cc_reading) {
    h.push_back(P.cch_const());
  } else {
    h.push_back(P.c_const());
    h.push_back(P.beta_N_const());
    h.push_back(P.beta_N_nonzero());
  }
  Sample s = integral_sample(pointwise(G,
                                       [&](std::size_t n) {
                                         const FormulaInputs& in = P.in(n);
                                         return (in.Abar * in.bt + in.c * in.Zbar).dot(in.bt);
                                       }),
                             G, Volume::a);
  s.applicable = all_hold(h);
  s.hypotheses = h;
  return s;
}

Sample general_beta_corrected(const Geometry& G) {
  const int m = G.M.leaf_dim();
  return integral_sample(pointwise(G,
                                   [&](std::size_t n) {
                                     const FormulaInputs& in = G.X.inputs[n];
                                     const double c = in.c, ch = in.c_hat;
                                     const double Nch = G.bar.grad_c_hat.vec(n).dot(G.M.normal.vec(n));
                                     const double tr = in.Abar.trace() - 0.5 * m / (c * ch * ch) * in.n_c_c_hat +
                                                       G.div_beta.at(0, n) / ch - Nch / ch;
                                     return std::pow(c * ch, 0.5 * (m + 2)) / c * tr;
                                   }),
                         G, Volume::a);
}

Sample eigen_beta(const Geometry& G) {
  const Probe P{G};
  std::vector<HypothesisCheck> h{P.zbar_zero(), P.c_const(), P.beta_N_const(), P.beta_N_nonzero(), P.bt_nonzero(),
                                 P.bt_norm_const()};
  const double eig = P.max_over([&](std::size_t n) {
    const FormulaInputs& in = P.in(n);
    const double t2 = in.bt.squaredNorm();
    if (t2 == 0.0) return 1.0;
    const Vec w = in.Abar * in.bt;
    return (w - w.dot(in.bt) / t2 * in.bt).norm() / std::sqrt(t2);
  });
  h.push_back({"β♯⊤ eigenvector of Ā", eig, 1e-10, eig < 1e-10});
  Sample s = integral_sample(pointwise(G,
                                       [&](std::size_t n) {
                                         const FormulaInputs& in = P.in(n);
                                         const double t2 = in.bt.squaredNorm();
                                         return t2 == 0.0 ? 0.0 : (in.Abar * in.bt).dot(in.bt) / t2;
                                       }),
                             G, Volume::a);
  s.applicable = all_hold(h);
  s.hypotheses = h;
  return s;
}

// A in a g-orthonormal leaf frame, symmetrized.
Mat symmetric_in_g_frame(const Mat& A, const Mat& G) {
  const Eigen::LLT<Mat> llt(G);
  const Mat L = llt.matrixL();
  const Mat S = L.transpose() * A * L.transpose().inverse();
  return 0.5 * (S + S.transpose());
}

double dnu_norm2(const Geometry& G, std::size_t n) {
  const Mat A = G.X.A.mat(n), Gm = G.X.gram.mat(n);
  const Vec Z = G.X.Z_direct.vec(n);
  return (A.transpose() * Gm * A * Gm.inverse()).trace() + Z.dot(Gm * Z);
}

double volume(const Geometry& G, Volume v) {
  const auto w = volume_weights(G.M, v);
  return kernels::pairwise_sum(w.data(), w.size());
}

Sample umbilicity(const Geometry& G) {
  const Probe P{G};
  const int m = G.M.leaf_dim();
  std::vector<HypothesisCheck> h{P.berwald()};
  const double max_ric = -P.min_over([&](std::size_t n) { return -G.curv.ricci_normal.at(0, n) / (P.c(n) * P.c(n)); });
  const double r = -max_ric;
  h.push_back({"Ric_ν ≤ -r < 0 (max Ric_ν)", max_ric, 0.0, max_ric < 0.0});
  const auto lhs = pointwise(G, [&](std::size_t n) {
    const Eigen::SelfAdjointEigenSolver<Mat> es(symmetric_in_g_frame(G.X.A.mat(n), G.X.gram.mat(n)));
    if (es.info() != Eigen::Success) throw NumericError("umbilicity: eigen-decomposition failed at node " + std::to_string(n));
    const Vec k = es.eigenvalues();
    double s = 0.0;
    for (int i = 0; i < m; ++i)
      for (int j = i + 1; j < m; ++j) s += (k(i) - k(j)) * (k(i) - k(j));
    return s;
  });
  const auto cm2 = pointwise(G, [&](std::size_t n) { return 1.0 / (P.c(n) * P.c(n)); });
  Sample s;
  s.relation = Relation::at_least;
  s.value = integrate(lhs, G.M, Volume::F);
  const double b2 = P.beta_norm2(P.first_active());
  s.expected = std::pow(1.0 - b2, 0.5 * (m + 2)) * m * r * integrate(cm2, G.M, Volume::a);
  s.scale = std::abs(s.value);
  s.applicable = all_hold(h);
  s.hypotheses = h;
  return s;
}

double energy_value(const Geometry& G) {
  const int m = G.M.leaf_dim();
  const auto d = pointwise(G, [&](std::size_t n) { return dnu_norm2(G, n); });
  return 0.5 * (m + 1) * volume(G, Volume::F) + 0.5 * integrate(d, G.M, Volume::F);
}

Sample energy(const Geometry& G) {
  const Probe P{G};
  const int m = G.M.leaf_dim();
  std::vector<HypothesisCheck> h{P.berwald()};
  const auto ric = pointwise(G, [&](std::size_t n) { return G.curv.ricci_normal.at(0, n) / (P.c(n) * P.c(n)); });
  Sample s;
  s.relation = Relation::at_least;
  s.value = energy_value(G);
  const double b2 = P.beta_norm2(P.first_active());
  s.expected = std::pow(1.0 - b2, 0.5 * (m + 2)) *
               (0.5 * (m + 1) * volume(G, Volume::a) + 0.5 / m * integrate(ric, G.M, Volume::a));
  s.scale = std::abs(s.value);
  s.applicable = all_hold(h);
  s.hypotheses = h;
  s.note = "‖Dν‖² = tr_g(AᵀA) + g(Z, Z) with g = g_ν";
  return s;
}

Sample energy_parallel(const Geometry& G) {
  const Probe P{G};
  const int m = G.M.leaf_dim();
  std::vector<HypothesisCheck> h{P.berwald(), P.abar_zero(), P.zbar_zero(), P.beta_N_const()};
  Sample s;
  s.value = energy_value(G);
  s.expected = 0.5 * (m + 1) * volume(G, Volume::F);
  s.scale = s.expected;
  s.applicable = all_hold(h);
  s.hypotheses = h;
  return s;
}

Sample sphere_energy(const Geometry& G) {
  const Probe P{G};
  const int m = G.M.leaf_dim();
  std::vector<HypothesisCheck> h{
      {"round sphere", 0.0, 0.0, G.M.example == "sphere-latitudes", true}, P.berwald(), P.c_const()};
  Sample s;
  s.relation = Relation::at_least;
  s.value = energy_value(G);
  const std::size_t n0 = P.first_active();
  const double c = P.c(n0), b2 = P.beta_norm2(n0);
  s.expected = std::pow(1.0 - b2, 0.5 * (m + 2)) * ((m + 1) * c * c + 1.0) / (2.0 * c * c) * volume(G, Volume::a);
  s.scale = std::abs(s.value);
  s.applicable = all_hold(h);
  s.hypotheses = h;
  return s;
}

double sup_abar_bt(const Geometry& G) {
  const Probe P{G};
  return P.max_over([&](std::size_t n) { return (P.in(n).Abar * P.in(n).bt).norm(); });
}

Sample vanishing(const Geometry& G, std::vector<HypothesisCheck> h) {
  Sample s;
  s.value = sup_abar_bt(G);
  const Probe P{G};
  s.scale = P.max_over([&](std::size_t n) { return P.in(n).Abar.norm() * P.in(n).bt.norm(); });
  s.applicable = all_hold(h);
  s.hypotheses = std::move(h);
  return s;
}

Sample riemannian_vanishing(const Geometry& G) {
  const Probe P{G};
  const double dev = P.min_over([&](std::size_t n) { return std::abs(2.0 * P.beta_N(n) + P.c(n) - 1.0); });
  return vanishing(G, {P.berwald(), P.beta_nonzero(), P.zbar_zero(), P.beta_N_const(), P.bt_norm_const(),
                       {"2β(N) + c ≠ 1 (min |2β(N) + c - 1|)", dev, kZeroTol, dev > kZeroTol}});
}

Sample tangent_vanishing(const Geometry& G) {
  const Probe P{G};
  return vanishing(G, {P.berwald(), P.beta_nonzero(), P.beta_N_zero(), P.zbar_zero()});
}

Sample randers_k_vanishing(const Geometry& G) {
  const Probe P{G};
  const int m = G.M.leaf_dim();
  auto h = randers_k_hyps(G);
  h.push_back(P.beta_N_const());
  h.push_back(P.zbar_zero());
  h.push_back({"m ≥ 2", static_cast<double>(m), 2.0, m >= 2, true});
  const double coef = P.min_over([&](std::size_t n) {
    const double c = P.c(n), ch = P.ch(n);
    return std::abs(1.0 + c * c - 2.0 * c * ch);
  });
  h.push_back({"1 + c² - 2cĉ ≠ 0", coef, kZeroTol, coef > kZeroTol});
  return vanishing(G, h);
}

Sample dispatch(const std::string& id, const Geometry& G) {
  const auto [base, k] = split_id(id);
  if (base == "reeb-F") return reeb_F(G);
  if (base == "reeb-a") return reeb_a(G);
  if (base == "reeb-weighted") return reeb_weighted(G);
  if (base == "reeb-g") return reeb_g(G);
  if (base == "second-order-init") return second_order_init(G);
  if (base == "second-order-F") return second_order_F(G);
  if (base == "sigma2-berwald") return sigma2_berwald(G, false);
  if (base == "sigma2-berwald-alt") return sigma2_berwald(G, true);
  if (base == "sigma2-berwald-derived") return sigma2_berwald_derived(G);
  if (base == "sigma2-berwald-const") return sigma2_berwald_const(G);
  if (base == "sigma2-tangent") return sigma2_tangent(G);
  if (base == "curvature-series") return curvature_series(G, k);
  if (base == "space-form") return space_form(G, k);
  if (base == "randers-k") return randers_k(G, k);
  if (base == "randers-k-derived") return randers_k_derived(G, k);
  if (base == "randers-k-tg") return randers_k_tg(G, k);
  if (base == "randers-k-zbar0") return randers_k_zbar0(G, k);
  if (base == "reeb-type") return reeb_type(G);
  if (base == "reeb-type-pointwise") return reeb_type_pointwise(G);
  if (base == "general-beta") return general_beta(G);
  if (base == "general-beta-c") return general_beta_gen(G, false);
  if (base == "general-beta-cc") return general_beta_gen(G, true);
  if (base == "general-beta-corrected") return general_beta_corrected(G);
  if (base == "eigen-beta") return eigen_beta(G);
  if (base == "umbilicity") return umbilicity(G);
  if (base == "energy") return energy(G);
  if (base == "energy-parallel") return energy_parallel(G);
  if (base == "sphere-energy") return sphere_energy(G);
  if (base == "riemannian-vanishing") return riemannian_vanishing(G);
  if (base == "tangent-vanishing") return tangent_vanishing(G);
  if (base == "randers-k-vanishing") return randers_k_vanishing(G);
  throw ConfigError("formula '" + id + "' is not evaluated on examples");
}

}  // namespace

Sample evaluate_formula(const std::string& id, const Geometry& G) {
  const auto [base, k] = split_id(id);
  if (k > G.M.leaf_dim()) throw ConfigError("formula order exceeds the leaf dimension in '" + id + "'");
  return dispatch(id, G);
}

std::vector<double> randers_k_integrand(const Geometry& G, int k) {
  return pointwise(G, [&](std::size_t n) { return randers_k_point(G, n, k); });
}

std::vector<double> reeb_type_integrand(const Geometry& G) {
  return pointwise(G, [&](std::size_t n) { return reeb_type_point(G, n); });
}

double tolerance_from_table(const std::vector<ConvergencePoint>& table, Scheme scheme, double base) {
  if (table.size() < 2) return base;
  const double fine = table[table.size() - 1].value, coarse = table[table.size() - 2].value;
  double err = std::abs(fine - coarse);
  if (scheme == Scheme::central4) err /= 15.0;
  return std::max(base, 10.0 * err);
}

namespace {

// Integral identities on a manifold with an excised singular set converge in the excision radius, not in h.
constexpr double kSingularBase = 1e-2;

double base_tolerance(const FormulaInfo& info, bool singular) {
  if (singular && info.base_tolerance == 1e-6) return kSingularBase;
  return info.base_tolerance;
}

double axis_spacing(const FoliatedRandersManifold& M) {
  int axis = 0;
  for (int a = 1; a < M.dim(); ++a)
    if (M.grid->size(a) > M.grid->size(axis)) axis = a;
  return M.grid->spacing(axis);
}

struct ResolutionRun {
  std::vector<Sample> samples;
  std::vector<int> sizes;
  double h = 0.0;
  bool singular = false;
  std::string error;
};

template <class Job>
void run_parallel(std::size_t count, int jobs, Job job) {
  const int workers = std::max(1, std::min<int>(jobs, static_cast<int>(count)));
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) job(i);
    });
  for (auto& t : pool) t.join();
}

}  // namespace

std::vector<ResidualReport> verify(const VerifyRequest& req) {
  if (req.resolutions.empty()) throw ConfigError("at least one resolution is required");
  std::vector<int> res = req.resolutions;
  std::sort(res.begin(), res.end());
  res.erase(std::unique(res.begin(), res.end()), res.end());
  const Params params = resolve_params(req.example);
  const int m = static_cast<int>(example_sizes(req.example, 8).size()) - 1;
  const auto ids = expand_formulas(req.formulas, m);

  std::vector<std::string> example_ids;
  for (const auto& id : ids)
    if (!find_info(split_id(id).first)->example_free) example_ids.push_back(id);

  std::vector<ResolutionRun> runs(res.size());
  if (!example_ids.empty()) {
    run_parallel(res.size(), req.jobs, [&](std::size_t i) {
      try {
        const Geometry G = build_geometry(req.example, res[i], req.scheme);
        runs[i].sizes = G.M.grid->sizes();
        runs[i].h = axis_spacing(G.M);
        runs[i].singular = G.M.profile.singular;
        for (const auto& id : example_ids) runs[i].samples.push_back(evaluate_formula(id, G));
      } catch (const std::exception& e) {
        runs[i].error = e.what();
      }
    });
    for (const auto& r : runs)
      if (!r.error.empty()) throw NumericError(r.error);
  }

  std::vector<ResidualReport> out;
  std::size_t col = 0;
  for (const auto& id : ids) {
    const FormulaInfo& info = *find_info(split_id(id).first);
    ResidualReport rep;
    rep.formula_id = id;
    rep.scheme = scheme_name(req.scheme);
    if (info.example_free) {
      const auto suite = matinv::verify_sigma_identities(req.seed, 100, 4);
      rep.example = "-";
      rep.value = suite.worst();
      rep.expected = 0.0;
      rep.tolerance = info.base_tolerance;
      rep.scale = 1.0;
      rep.verdict = std::abs(rep.value) <= rep.tolerance ? Verdict::pass : Verdict::fail;
      for (const auto& row : suite.rows)
        rep.hypotheses.push_back({row.identity, row.max_abs_residual, info.base_tolerance,
                                  row.max_abs_residual <= info.base_tolerance});
      rep.note = "seed " + std::to_string(req.seed) + ", 100 trials, m ≤ 4";
      out.push_back(std::move(rep));
      continue;
    }
    rep.example = req.example.name;
    rep.params = params;
    rep.resolution = runs.back().sizes;
    const Sample& fin = runs.back().samples[col];
    rep.relation = fin.relation;
    rep.value = fin.value;
    rep.expected = fin.expected;
    rep.scale = fin.scale;
    rep.hypotheses = fin.hypotheses;
    rep.note = fin.note;
    for (std::size_t i = 0; i < runs.size(); ++i)
      rep.convergence.push_back({res[i], runs[i].h, runs[i].samples[col].value - runs[i].samples[col].expected});
    const double base = base_tolerance(info, runs.back().singular);
    if (fin.relation == Relation::equal)
      rep.tolerance = tolerance_from_table(rep.convergence, req.scheme, base);
    else
      rep.tolerance = base;
    if (!fin.applicable) {
      rep.verdict = Verdict::not_applicable;
    } else if (fin.relation == Relation::equal) {
      rep.verdict = std::abs(rep.value - rep.expected) <= rep.tolerance ? Verdict::pass : Verdict::fail;
    } else {
      rep.verdict = rep.value >= rep.expected - rep.tolerance ? Verdict::pass : Verdict::fail;
    }
    out.push_back(std::move(rep));
    ++col;
  }
  return out;
}

bool all_applicable_pass(const std::vector<ResidualReport>& reports) {
  return std::none_of(reports.begin(), reports.end(), [](const ResidualReport& r) { return r.verdict == Verdict::fail; });
}

}  // namespace rf
