#include <doctest.h>

#include <cmath>
#include <numbers>

#include "randers_foliate/error.hpp"
#include "randers_foliate/verifier.hpp"

using namespace rf;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// a = diag(e^{2u}, e^{2w}, 1) with u = 0.3 sin z, w = 0.2 cos z; leaves z = const; β♯ = ε′e^{-u}∂x + ε∂z.
FoliatedRandersManifold warped_torus(int nz, double eps, double eps_prime) {
  auto grid = std::make_shared<PeriodicGrid>(std::vector<int>{8, 8, nz}, std::vector<double>{kTwoPi, kTwoPi, kTwoPi});
  FoliatedRandersManifold M;
  M.example = "warped-torus";
  M.grid = grid;
  M.metric = Field(grid, {3, 3}, {0, 2}, "a");
  M.beta = Field(grid, {3}, {0, 1}, "beta");
  M.beta_sharp = Field(grid, {3}, {1, 0}, "beta_sharp");
  M.normal = Field(grid, {3}, {1, 0}, "N");
  M.test_function = scalar_field(grid, "f");
  for (std::size_t i = 0; i < grid->node_count(); ++i) {
    const double z = grid->coordinate(i, 2);
    const double u = 0.3 * std::sin(z), w = 0.2 * std::cos(z);
    Mat a = Mat::Zero(3, 3);
    a(0, 0) = std::exp(2 * u);
    a(1, 1) = std::exp(2 * w);
    a(2, 2) = 1.0;
    Vec bs(3), N(3);
    bs << eps_prime * std::exp(-u), 0.0, eps;
    N << 0.0, 0.0, 1.0;
    M.metric.set_mat(i, a);
    M.beta_sharp.set_vec(i, bs);
    M.beta.set_vec(i, a * bs);
    M.normal.set_vec(i, N);
    M.test_function.at(0, i) = std::cos(z);
  }
  M.quadrature_fraction.assign(grid->node_count(), 1.0);
  M.validate();
  return M;
}

// (2π)² ∫ u′ e^{u+w} dz by the trapezoid rule, exact to roundoff for this analytic periodic integrand.
double warped_oracle() {
  const int n = 4096;
  double s = 0.0;
  for (int j = 0; j < n; ++j) {
    const double z = kTwoPi * j / n;
    s += 0.3 * std::cos(z) * std::exp(0.3 * std::sin(z) + 0.2 * std::cos(z));
  }
  return kTwoPi * kTwoPi * s * kTwoPi / n;
}

const ResidualReport& find(const std::vector<ResidualReport>& r, const std::string& id) {
  for (const auto& x : r)
    if (x.formula_id == id) return x;
  FAIL("missing report " << id);
  throw;
}

}  // namespace

TEST_CASE("formula registry ids are unique and groups expand in registry order") {
  const auto& reg = formula_registry();
  for (std::size_t i = 0; i < reg.size(); ++i)
    for (std::size_t j = i + 1; j < reg.size(); ++j) CHECK(reg[i].id != reg[j].id);
  const auto ids = expand_formulas({"randers-k"}, 2);
  CHECK(ids == std::vector<std::string>{"randers-k.k1", "randers-k.k2"});
  const auto reeb = expand_formulas({"reeb-g", "reeb"}, 2);
  CHECK(reeb == std::vector<std::string>{"reeb-F", "reeb-a", "reeb-weighted", "reeb-g"});
  const auto all = expand_formulas({"all"}, 2);
  CHECK(all.back() == "sigma-identities");
  CHECK_THROWS_AS(check_formula_selectors({"reeb-F", "bogus"}), ConfigError);
  CHECK_NOTHROW(check_formula_selectors({"curvature-series.k2", "inequality", "all"}));
}

TEST_CASE("tolerance from a convergence table") {
  const std::vector<ConvergencePoint> t{{16, 0.4, 1e-3}, {32, 0.2, 1e-4}};
  CHECK(tolerance_from_table(t, Scheme::spectral, 1e-6) == doctest::Approx(10 * 9e-4));
  CHECK(tolerance_from_table(t, Scheme::central4, 1e-6) == doctest::Approx(10 * 9e-4 / 15));
  CHECK(tolerance_from_table({{32, 0.2, 1.0}}, Scheme::spectral, 1e-6) == 1e-6);
  const std::vector<ConvergencePoint> flat{{16, 0.4, 1e-12}, {32, 0.2, 1e-12}};
  CHECK(tolerance_from_table(flat, Scheme::spectral, 1e-6) == 1e-6);
}

TEST_CASE("series invariant: k = 1 is the trace, odd terms carry A") {
  Mat A(2, 2), R(2, 2);
  A << 1.0, 0.5, 0.5, -2.0;
  R << 0.3, 0.0, 0.0, 0.7;
  CHECK(series_invariant(A, R, 1) == doctest::Approx(A.trace()));
  CHECK(std::abs(series_invariant(A, Mat::Zero(2, 2), 2) - (A(0, 0) * A(1, 1) - A(0, 1) * A(1, 0))) < 1e-12);
  // A = 0 leaves only the B_2 = -R/2 contributions at even weight.
  CHECK(series_invariant(Mat::Zero(2, 2), R, 2) == doctest::Approx(-0.5 * R.trace()));
}

TEST_CASE("Reeb identities hold on the Riemannian conformal torus") {
  VerifyRequest req;
  req.example = {"conformal-torus", {{"beta_scale", 0.0}}};
  req.resolutions = {16, 32};
  req.formulas = {"reeb", "second-order-init"};
  const auto r = verify(req);
  for (const auto& x : r) {
    CAPTURE(x.formula_id);
    CHECK(x.verdict == Verdict::pass);
    CHECK(std::abs(x.residual()) < 1e-8);
  }
}

TEST_CASE("curvature series at k = 1 reproduces the Finsler Reeb integral") {
  const Geometry G = build_geometry({"flat-graph", {}}, 32, Scheme::spectral);
  const Sample a = evaluate_formula("curvature-series.k1", G), b = evaluate_formula("reeb-F", G);
  REQUIRE(a.applicable);
  REQUIRE(b.applicable);
  CHECK(std::abs(a.value - b.value) < 1e-12 * std::max(1.0, a.scale));
}

TEST_CASE("Reeb-type integrand equals the k = 1 series integrand pointwise") {
  const Geometry G = build_geometry({"flat-graph", {}}, 32, Scheme::spectral);
  const auto a = reeb_type_integrand(G), b = randers_k_integrand(G, 1);
  double worst = 0.0, size = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    worst = std::max(worst, std::abs(a[i] - b[i]));
    size = std::max(size, std::abs(a[i]));
  }
  CHECK(size > 1e-3);
  CHECK(worst < 1e-10);
  CHECK(evaluate_formula("reeb-type-pointwise", G).value < 1e-10);
}

TEST_CASE("Finsler Reeb formula is not applicable off its hypotheses") {
  const Geometry G = build_geometry({"conformal-torus", {}}, 16, Scheme::spectral);
  const Sample s = evaluate_formula("reeb-F", G);
  CHECK_FALSE(s.applicable);
  bool some_failed = false;
  for (const auto& h : s.hypotheses) some_failed |= !h.holds;
  CHECK(some_failed);
}

TEST_CASE("general-β formula as stated fails on the generic conformal torus; the recomputed form holds") {
  VerifyRequest req;
  req.example = {"conformal-torus", {}};
  req.resolutions = {16, 32};
  req.formulas = {"general-beta", "general-beta-corrected"};
  const auto r = verify(req);
  CHECK(find(r, "general-beta").verdict == Verdict::fail);
  CHECK(std::abs(find(r, "general-beta").residual()) > 1.0);
  CHECK(find(r, "general-beta-corrected").verdict == Verdict::pass);
  CHECK(std::abs(find(r, "general-beta-corrected").residual()) < 1e-10);
}

TEST_CASE("pairing slip: the stated σ_2 form fails even for β(N) = 0, the derived form holds") {
  const Geometry G = build_geometry({"flat-graph", {{"amp_y", 0.0}, {"bx", 0.0}, {"bz", 0.0}, {"by", 0.5}}}, 32,
                                    Scheme::spectral);
  const Sample stated = evaluate_formula("sigma2-berwald", G), derived = evaluate_formula("sigma2-berwald-derived", G);
  REQUIRE(stated.applicable);
  REQUIRE(derived.applicable);
  CHECK(stated.value == doctest::Approx(-7.0339e-2).epsilon(1e-3));
  CHECK(std::abs(derived.value) < 1e-6);
}

TEST_CASE("warped torus: the eigenfield construction has ∫λ dV_a ≠ 0") {
  const double eps = 0.3, eps_prime = 0.4;
  const Geometry G = build_geometry(warped_torus(64, eps, eps_prime), Scheme::spectral);
  const Sample s = evaluate_formula("eigen-beta", G);
  for (const auto& h : s.hypotheses) {
    CAPTURE(h.name);
    CHECK(h.holds);
  }
  CHECK(s.applicable);
  const double oracle = -warped_oracle();
  CHECK(std::abs(oracle) > 0.1);
  CHECK(s.value == doctest::Approx(oracle).epsilon(1e-10));
}

TEST_CASE("the same construction on the conformal torus integrates to zero") {
  VerifyRequest req;
  req.example = {"conformal-torus", {{"beta_mode", 2}, {"amp", 0.0}}};
  req.resolutions = {16, 32};
  req.formulas = {"eigen-beta"};
  const auto r = verify(req);
  REQUIRE(r.size() == 1);
  CHECK(r[0].verdict == Verdict::pass);
}

TEST_CASE("verify is deterministic and independent of the job count") {
  VerifyRequest req;
  req.example = {"flat-graph", {{"dim", 2}, {"by", 0.0}, {"amp_y", 0.0}}};
  req.resolutions = {32, 16};
  req.formulas = {"all"};
  req.jobs = 1;
  const auto a = verify(req);
  req.jobs = 4;
  const auto b = verify(req);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].formula_id == b[i].formula_id);
    CHECK(a[i].value == b[i].value);
    CHECK(a[i].verdict == b[i].verdict);
    CHECK(a[i].convergence.size() == b[i].convergence.size());
  }
  CHECK(a.front().resolution == std::vector<int>{32, 8});
}

TEST_CASE("verify rejects bad requests") {
  VerifyRequest req;
  req.example = {"flat-graph", {}};
  req.resolutions = {16};
  req.formulas = {"no-such-formula"};
  CHECK_THROWS_AS(verify(req), ConfigError);
  req.formulas = {"all"};
  req.example = {"nowhere", {}};
  CHECK_THROWS_AS(verify(req), ConfigError);
}

TEST_CASE("a formula id is never shadowed by a group name") {
  CHECK(expand_formulas({"general-beta"}, 2) == std::vector<std::string>{"general-beta"});
  CHECK(expand_formulas({"general"}, 2).size() == 5);
}
