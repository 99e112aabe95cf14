// Acceptance suite: one PASS/FAIL line per criterion, measurements indented below it.
// Usage: acceptance [--criterion N]...   (default: all). Exit 1 if any selected criterion fails.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstdarg>
#include <cstring>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "../support/oracles.hpp"
#include "randers_foliate/extrinsic.hpp"
#include "randers_foliate/matinv.hpp"
#include "randers_foliate/report.hpp"
#include "randers_foliate/verifier.hpp"

using namespace rf;
using rf::testing::Rng;

namespace {

// Pinned thresholds.
constexpr double kC1Rel = 1e-9;
constexpr double kC1Identity = 1e-9;
constexpr double kC2Hessian = 1e-6;
constexpr double kC2Det = 1e-8;
constexpr double kC2Stated = 1e-12;
constexpr double kC3Orth = 1e-11;
constexpr double kC3Norm = 1e-12;
constexpr double kRatioCentral4 = 12.0;
constexpr double kRatioSpectral = 100.0;
constexpr double kFinest = 1e-3;
// Differences at or below this are roundoff; a ratio between two such values carries no order information.
constexpr double kRoundoffFloor = 1e-11;
constexpr double kC6 = 1e-5;
constexpr double kC7 = 1e-6;
constexpr double kC8 = 1e-2;
constexpr double kC9Margin = -1e-8;
constexpr double kC9Equality = 1e-10;
constexpr double kC10 = 1e-8;

void detail(const char* fmt, ...) __attribute__((format(printf, 1, 2)));
void detail(const char* fmt, ...) {
  std::printf("    ");
  va_list ap;
  va_start(ap, fmt);
  std::vprintf(fmt, ap);
  va_end(ap);
  std::printf("\n");
}

const char* ok(bool b) { return b ? "ok" : "FAIL"; }

double sup(const Field& f) {
  double m = 0.0;
  for (double v : f.data()) m = std::max(m, std::abs(v));
  return m;
}

// ---------------------------------------------------------------------------------------------

bool criterion1() {
  Rng rng(1001);
  double worst = 0.0;
  for (int t = 0; t < 200; ++t) {
    const int m = rng.integer(1, 5), k = rng.integer(1, 3);
    std::vector<matinv::Matrix> mats;
    for (int i = 0; i < k; ++i) mats.push_back(rng.matrix(m));
    std::vector<int> lambda(k, 0);
    int budget = rng.integer(0, m);
    for (int i = 0; i < k; ++i) {
      lambda[i] = i + 1 == k ? budget : rng.integer(0, budget);
      budget -= lambda[i];
    }
    const double got = matinv::sigma_multi(mats, lambda);
    const double oracle = rf::testing::sigma_lambda_oracle(mats, lambda);
    worst = std::max(worst, std::abs(got - oracle) / std::max(1.0, std::abs(oracle)));
  }
  const bool oracle_ok = worst < kC1Rel;
  detail("sigma_multi vs determinant DFT oracle, 200 tuples: max rel err %.3e (< %.0e) %s", worst, kC1Rel, ok(oracle_ok));
  const auto suite = matinv::verify_sigma_identities(1002, 100, 5);
  bool ids_ok = true;
  for (const auto& row : suite.rows) {
    const bool r = row.max_abs_residual < kC1Identity;
    ids_ok &= r;
    detail("%-28s checks %5d  max |res| %.3e %s", row.identity.c_str(), row.checks, row.max_abs_residual, ok(r));
  }
  return oracle_ok && ids_ok;
}

bool criterion2() {
  Rng rng(2001);
  double hess = 0.0, det = 0.0, stated = 0.0;
  for (int t = 0; t < 100; ++t) {
    const int n = rng.integer(2, 4);
    const Mat a = rng.spd(n);
    const RandersPoint p(a, rng.beta_with_norm(a, rng.uniform(0.0, 0.9)));
    const Vec y = rng.nonzero_vec(n);
    const Mat g = fundamental_tensor(p, y);
    const Mat H = rf::testing::fd_half_hessian_F2(p, y, 1e-3 * y.norm());
    hess = std::max(hess, (g - H).norm() / g.norm());
    const double expected = std::pow(randers_norm(p, y) / p.alpha(y), n + 1) * a.determinant();
    det = std::max(det, std::abs(g.determinant() / expected - 1.0));
    const Vec u = y / p.alpha(y);
    stated = std::max(stated, (fundamental_tensor_unit_alpha_form(p, u) - fundamental_tensor(p, u)).norm());
  }
  detail("closed form vs FD Hessian of F^2/2: max rel %.3e (< %.0e) %s", hess, kC2Hessian, ok(hess < kC2Hessian));
  detail("det g_y = (F/alpha)^(m+2) det a: max rel %.3e (< %.0e) %s", det, kC2Det, ok(det < kC2Det));
  detail("stated form at alpha(y) = 1: max |diff| %.3e (< %.0e) %s", stated, kC2Stated, ok(stated < kC2Stated));
  return hess < kC2Hessian && det < kC2Det && stated < kC2Stated;
}

bool criterion3() {
  Rng rng(3001);
  double norm = 0.0, orth = 0.0, Fn = 0.0;
  auto check = [&](const RandersPoint& p, const Vec& N) {
    const NormalData nd = f_normal(p, N);
    norm = std::max(norm, std::abs(p.alpha(nd.n) - 1.0));
    Fn = std::max(Fn, std::abs(randers_norm(p, nd.n) - nd.c * nd.c_hat));
    const Mat g = fundamental_tensor(p, nd.n);
    const Mat E = leaf_frame(p.a(), N);
    for (int j = 0; j < E.cols(); ++j) orth = std::max(orth, std::abs(nd.n.dot(g * E.col(j))));
  };
  {
    Vec b(2), N(2);
    b << 0.3, 0.4;
    N << 0.0, 1.0;
    const RandersPoint p(Mat::Identity(2, 2), b);
    const NormalData nd = f_normal(p, N);
    detail("R^2, N = e2, beta = (0.3, 0.4): c = %.6f  c_hat = %.6f  n = (%.6f, %.6f)", nd.c, nd.c_hat, nd.n(0), nd.n(1));
    check(p, N);
  }
  for (int t = 0; t < 100; ++t) {
    const int n = rng.integer(2, 4);
    const Mat a = rng.spd(n);
    const RandersPoint p(a, rng.beta_with_norm(a, rng.uniform(0.0, 0.9)));
    Vec N = rng.nonzero_vec(n);
    N /= p.alpha(N);
    check(p, N);
  }
  detail("|alpha(n) - 1| max %.3e (< %.0e) %s", norm, kC3Norm, ok(norm < kC3Norm));
  detail("|g_n(n, w)| over a-orthonormal leaf frames max %.3e (< %.0e) %s", orth, kC3Orth, ok(orth < kC3Orth));
  detail("|F(n) - c c_hat| max %.3e (< %.0e) %s", Fn, kC3Norm, ok(Fn < kC3Norm));
  return norm < kC3Norm && orth < kC3Orth && Fn < kC3Norm;
}

// Sup-norm differences formula vs direct for one (example, scheme) at 32, 64, 128.
struct Ladder {
  std::string example;
  Scheme scheme;
  std::map<std::string, std::vector<double>> err;  // quantity -> per resolution
};

const std::vector<int> kLadder{32, 64, 128};

std::vector<Ladder>& ladders() {
  static std::vector<Ladder> cache;
  if (!cache.empty()) return cache;
  for (const char* ex : {"flat-graph", "conformal-torus"})
    for (Scheme s : {Scheme::spectral, Scheme::central4}) {
      Ladder L{ex, s, {}};
      for (int res : kLadder) {
        const Geometry G = build_geometry({ex, {}}, res, s);
        L.err["shape_g"].push_back(max_difference(G.M, G.X.Ag_formula, G.X.Ag_direct));
        L.err["Z"].push_back(max_difference(G.M, G.X.Z_formula, G.X.Z_direct));
        L.err["Csharp"].push_back(max_difference(G.M, G.X.Csharp_formula, G.X.Csharp_direct));
      }
      cache.push_back(std::move(L));
    }
  return cache;
}

bool ladder_ok(const std::vector<double>& e, Scheme s, std::string& why) {
  const double need = s == Scheme::central4 ? kRatioCentral4 : kRatioSpectral;
  bool good = e.back() < kFinest;
  why.clear();
  for (std::size_t i = 1; i < e.size(); ++i) {
    char buf[64];
    if (e[i] <= kRoundoffFloor) {
      std::snprintf(buf, sizeof buf, " floor");
    } else {
      const double r = e[i - 1] / e[i];
      std::snprintf(buf, sizeof buf, " %.1f", r);
      good &= r >= need;
    }
    why += buf;
  }
  return good;
}

bool ladder_criterion(const std::vector<std::string>& quantities) {
  bool all = true;
  for (const auto& L : ladders())
    for (const auto& q : quantities) {
      const auto& e = L.err.at(q);
      std::string ratios;
      const bool good = ladder_ok(e, L.scheme, ratios);
      all &= good;
      detail("%-15s %-8s %-7s %.2e %.2e %.2e  ratios%s %s", L.example.c_str(), scheme_name(L.scheme).c_str(),
             q.c_str(), e[0], e[1], e[2], ratios.c_str(), ok(good));
    }
  return all;
}

bool criterion4() { return ladder_criterion({"shape_g"}); }
bool criterion5() { return ladder_criterion({"Z", "Csharp"}); }

bool criterion6() {
  bool all = true;
  std::vector<double> ric, cod, codg;
  for (int res : {32, 64}) {
    const Geometry G = build_geometry({"conformal-torus", {}}, res, Scheme::spectral);
    ric.push_back(sup(riccati_residual(G.M, G.bar, G.curv)));
    cod.push_back(sup(codazzi_residual_bar(G.M, G.bar)));
    codg.push_back(sup(codazzi_residual_g(G.M, G.bar, G.X)));
  }
  auto row = [&](const char* name, const std::vector<double>& e) {
    const bool small = e[1] < kC6;
    const bool conv = e[1] <= kRoundoffFloor || e[1] < e[0];
    all &= small && conv;
    detail("%-22s res 32 %.2e  res 64 %.2e (< %.0e, converging) %s", name, e[0], e[1], kC6, ok(small && conv));
  };
  row("Riccati", ric);
  row("Codazzi (a)", cod);
  row("Codazzi (g)", codg);
  return all;
}

struct Item {
  ExampleSpec example;
  std::vector<std::string> formulas;
};

bool integral_items(const std::vector<Item>& items, double threshold, bool require_applicable = true) {
  bool all = true;
  for (const auto& it : items) {
    VerifyRequest req;
    req.example = it.example;
    const int d = default_resolution(it.example);
    req.resolutions = {d / 2, d};
    req.formulas = it.formulas;
    req.jobs = 2;
    std::string label = it.example.name;
    for (const auto& [k, v] : it.example.params) label += " " + k + "=" + std::to_string(v).substr(0, 5);
    for (const auto& r : verify(req)) {
      const bool applicable = r.verdict != Verdict::not_applicable;
      const bool good = (applicable || !require_applicable) && std::abs(r.residual()) < threshold;
      all &= good;
      const double coarse = r.convergence.size() > 1 ? r.convergence[0].value - r.expected : NAN;
      detail("%-20s %-40s res %d: %+.3e (coarse %+.3e)%s %s", r.formula_id.c_str(), label.c_str(), d, r.residual(), coarse,
             applicable ? "" : " [n/a]", ok(good));
    }
  }
  return all;
}

const Params kFlatGraphNormalZero{{"amp_y", 0.0}, {"bx", 0.0}, {"by", 0.5}, {"bz", 0.0}};

bool criterion7() {
  return integral_items(
      {
          {{"conformal-torus", {{"beta_scale", 0.0}}}, {"reeb-F", "reeb-weighted", "second-order-init"}},
          {{"conformal-torus", {}}, {"general-beta"}},
          {{"flat-graph", {}}, {"sigma2-berwald"}},
          {{"flat-graph", kFlatGraphNormalZero}, {"sigma2-berwald-const"}},
          {{"flat-graph", {}}, {"randers-k", "space-form"}},
      },
      kC7);
}

bool criterion8() {
  bool all = true;
  const auto sizes = example_sizes({"sphere-latitudes", {}}, 256);
  detail("grid %dx%d (fields are constant along the longitude axis, which keeps the minimum size)", sizes[0], sizes[1]);
  for (const char* id : {"reeb-a", "reeb-weighted", "reeb-g"}) {
    std::vector<double> r;
    for (double r0 : {0.2, 0.1, 0.05}) {
      const Geometry G = build_geometry({"sphere-latitudes", {{"r0", r0}}}, 256, Scheme::spectral);
      r.push_back(std::abs(evaluate_formula(id, G).value));
    }
    bool mono = true;
    for (std::size_t i = 1; i < r.size(); ++i) mono &= r[i] <= kRoundoffFloor || r[i] < r[i - 1];
    const bool good = mono && r.back() < kC8;
    all &= good;
    detail("%-14s |res| r0=0.2 %.3e  r0=0.1 %.3e  r0=0.05 %.3e  decreasing %s, < %.0e %s", id, r[0], r[1], r[2],
           mono ? "yes" : "no", kC8, ok(good));
  }
  return all;
}

bool criterion9() {
  bool all = true;
  const std::vector<ExampleSpec> berwald{{"flat-parallel", {}},
                                         {"flat-parallel", {{"dim", 2}, {"by", 0.0}}},
                                         {"flat-graph", {}},
                                         {"flat-graph", kFlatGraphNormalZero},
                                         {"conformal-torus", {{"beta_scale", 0.0}}},
                                         {"sphere-latitudes", {{"eps_n", 0.0}, {"eps_rot", 0.0}}}};
  for (const auto& ex : berwald) {
    const Geometry G = build_geometry(ex, default_resolution(ex), Scheme::spectral);
    const Sample s = evaluate_formula("energy", G);
    const double margin = s.value - s.expected;
    const bool good = s.applicable && margin >= kC9Margin;
    all &= good;
    std::string label = ex.name;
    for (const auto& [k, v] : ex.params) label += " " + k + "=" + std::to_string(v).substr(0, 4);
    detail("energy margin %-44s E = %.6e  bound = %.6e  margin %+.3e%s %s", label.c_str(), s.value, s.expected, margin,
           s.applicable ? "" : " [n/a]", ok(good));
  }
  for (const auto& ex : {ExampleSpec{"flat-parallel", {}}, ExampleSpec{"flat-parallel", {{"dim", 2}, {"by", 0.0}}}}) {
    const Geometry G = build_geometry(ex, default_resolution(ex), Scheme::spectral);
    const Sample s = evaluate_formula("energy-parallel", G);
    const double diff = std::abs(s.value - s.expected);
    const bool good = s.applicable && diff < kC9Equality;
    all &= good;
    detail("energy equality %s dim %d: E = %.12e  (m+1)/2 Vol_F = %.12e  |diff| %.3e %s", ex.name.c_str(), G.M.dim(),
           s.value, s.expected, diff, ok(good));
  }
  return all;
}

bool criterion10() {
  bool all = true;
  const std::vector<std::pair<ExampleSpec, std::string>> cases{
      {{"flat-parallel", {}}, "riemannian-vanishing"},
      {{"flat-graph", {{"amp_x", 0.0}, {"amp_y", 0.0}, {"slope", 0.5}}}, "riemannian-vanishing"},
      {{"flat-parallel", {{"bz", 0.0}}}, "tangent-vanishing"},
      {{"flat-graph", {{"amp_x", 0.0}, {"amp_y", 0.0}, {"slope", 0.5}, {"bz", 0.1}}}, "tangent-vanishing"},
  };
  for (const auto& [ex, id] : cases) {
    const Geometry G = build_geometry(ex, default_resolution(ex), Scheme::spectral);
    const Sample s = evaluate_formula(id, G);
    const bool good = s.applicable && std::abs(s.value) < kC10;
    all &= good;
    std::string label = ex.name;
    for (const auto& [k, v] : ex.params) label += " " + k + "=" + std::to_string(v).substr(0, 4);
    detail("%-18s %-52s sup %.3e (sup |Abar| %.3e)%s %s", id.c_str(), label.c_str(), s.value, sup(G.bar.shape),
           s.applicable ? "" : " [n/a]", ok(good));
  }
  return all;
}

bool criterion11() {
  VerifyRequest req;
  req.example = {"flat-graph", {}};
  req.resolutions = {16, 32};
  req.formulas = {"all"};
  req.seed = 7;
  req.jobs = 4;
  const auto a = verify(req), b = verify(req);
  req.jobs = 1;
  const auto c = verify(req);
  const bool json = render_json(a) == render_json(b) && render_json(a) == render_json(c);
  const bool csv = render_csv(a) == render_csv(b) && render_csv(a) == render_csv(c);
  detail("%zu reports; JSON byte-identical across runs and job counts: %s", a.size(), json ? "yes" : "no");
  detail("CSV byte-identical across runs and job counts: %s", csv ? "yes" : "no");
  return json && csv;
}

const std::vector<std::pair<const char*, std::function<bool()>>> kCriteria{
    {"sigma_lambda oracle equivalence and identities", criterion1},
    {"fundamental tensor", criterion2},
    {"normal construction", criterion3},
    {"shape operator formula vs direct, convergence", criterion4},
    {"Z and C-sharp formulas vs direct, convergence", criterion5},
    {"Riccati and Codazzi residuals", criterion6},
    {"integral formulae at default resolution", criterion7},
    {"singular case, sphere excision sweep", criterion8},
    {"energy inequality and equality", criterion9},
    {"vanishing conclusions", criterion10},
    {"determinism", criterion11},
};

}  // namespace

int main(int argc, char** argv) {
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--criterion") == 0 && i + 1 < argc) {
      selected.insert(std::atoi(argv[++i]));
    } else {
      std::fprintf(stderr, "usage: %s [--criterion N]...\n", argv[0]);
      return 2;
    }
  }
  bool all = true;
  for (int n = 1; n <= static_cast<int>(kCriteria.size()); ++n) {
    if (!selected.empty() && !selected.count(n)) continue;
    bool pass = false;
    std::printf("criterion %d: %s\n", n, kCriteria[n - 1].first);
    try {
      pass = kCriteria[n - 1].second();
    } catch (const std::exception& e) {
      detail("error: %s", e.what());
    }
    std::printf("criterion %d: %s\n", n, pass ? "PASS" : "FAIL");
    std::fflush(stdout);
    all &= pass;
  }
  return all ? 0 : 1;
}
