#include <doctest.h>

#include <cmath>
#include <numbers>

#include "randers_foliate/error.hpp"
#include "randers_foliate/extrinsic.hpp"
#include "randers_foliate/verifier.hpp"

using namespace rf;

namespace {

double sup(const Field& f) {
  double m = 0.0;
  for (double v : f.data()) m = std::max(m, std::abs(v));
  return m;
}

}  // namespace

TEST_CASE("catalog is alphabetical and resolves parameters") {
  const auto& c = catalog();
  REQUIRE(c.size() == 4);
  for (std::size_t i = 1; i < c.size(); ++i) CHECK(c[i - 1].name < c[i].name);
  CHECK_THROWS_AS(catalog_entry("klein-bottle"), ConfigError);
  CHECK_THROWS_AS(resolve_params({"flat-graph", {{"nope", 1.0}}}), ConfigError);
  const Params p = resolve_params({"flat-graph", {{"bx", 0.1}}});
  CHECK(p.at("bx") == 0.1);
  CHECK(p.at("by") == 0.35);
  CHECK(default_resolution({"flat-graph", {}}) == 32);
  CHECK(default_resolution({"flat-graph", {{"dim", 2}, {"by", 0}, {"amp_y", 0}}}) == 64);
  CHECK(default_resolution({"sphere-latitudes", {}}) == 256);
}

TEST_CASE("invalid example parameters are rejected") {
  CHECK_THROWS_AS(build_example({"flat-parallel", {{"bx", 0.9}, {"bz", 0.9}}}, 16), ValidationError);
  CHECK_THROWS_AS(build_example({"flat-graph", {{"dim", 4}}}, 16), ValidationError);
  CHECK_THROWS_AS(build_example({"sphere-latitudes", {{"r0", 2.0}}}, 16), ValidationError);
  CHECK_THROWS_AS(build_example({"conformal-torus", {{"beta_mode", 2}}}, 16), ValidationError);
  CHECK_THROWS_AS(build_example({"flat-graph", {}}, 4), ConfigError);
}

TEST_CASE("every catalog example builds and validates") {
  for (const auto& e : catalog()) {
    const int res = e.name == "sphere-latitudes" ? 64 : 16;
    const FoliatedRandersManifold M = build_example({e.name, {}}, res);
    CHECK_NOTHROW(M.validate());
    CHECK(M.quadrature_fraction.size() == M.grid->node_count());
  }
}

TEST_CASE("flat examples have the flat-torus volume and the F-volume density") {
  const FoliatedRandersManifold M = build_example({"flat-parallel", {}}, 16);
  const double L = 2.0 * std::numbers::pi;
  std::vector<double> one(M.grid->node_count(), 1.0);
  CHECK(integrate(one, M, Volume::a) == doctest::Approx(L * L * L).epsilon(1e-12));
  const double b2 = 0.3 * 0.3 + 0.4 * 0.4;
  CHECK(integrate(one, M, Volume::F) == doctest::Approx(std::pow(1.0 - b2, 2.0) * L * L * L).epsilon(1e-12));
}

TEST_CASE("sphere excision removes caps around the poles") {
  const FoliatedRandersManifold M = build_example({"sphere-latitudes", {{"r0", 0.2}}}, 64);
  CHECK(M.excision.size() == 2);
  std::size_t inactive = 0;
  for (double f : M.quadrature_fraction) inactive += f == 0.0;
  CHECK(inactive > 0);
  CHECK(M.profile.singular);
}

TEST_CASE("leaf frame is a-orthonormal and orthogonal to N") {
  Mat a(3, 3);
  a << 2.0, 0.3, 0.1, 0.3, 1.5, -0.2, 0.1, -0.2, 1.0;
  Vec N(3);
  N << 0.2, -0.4, 0.9;
  N /= std::sqrt(N.dot(a * N));
  const Mat E = leaf_frame(a, N);
  CHECK(E.cols() == 2);
  CHECK((E.transpose() * a * E - Mat::Identity(2, 2)).norm() < 1e-13);
  CHECK((E.transpose() * a * N).norm() < 1e-13);
}

TEST_CASE("flat examples have vanishing Riemann tensor and the conformal torus does not") {
  const Geometry flat = build_geometry({"flat-graph", {}}, 16, Scheme::spectral);
  CHECK(sup(flat.curv.riemann) < 1e-12);
  const Geometry conf = build_geometry({"conformal-torus", {}}, 16, Scheme::spectral);
  CHECK(sup(conf.curv.riemann) > 1e-2);
}

TEST_CASE("Riccati and Codazzi residuals are small on the conformal torus") {
  const Geometry G = build_geometry({"conformal-torus", {}}, 32, Scheme::spectral);
  CHECK(sup(riccati_residual(G.M, G.bar, G.curv)) < 1e-6);
  CHECK(sup(codazzi_residual_bar(G.M, G.bar)) < 1e-10);
  CHECK(sup(codazzi_residual_g(G.M, G.bar, G.X)) < 1e-6);
  const Geometry S = build_geometry({"sphere-latitudes", {}}, 64, Scheme::spectral);
  CHECK_THROWS_AS(riccati_residual(S.M, S.bar, S.curv), PreconditionError);
}

TEST_CASE("Berwald examples have parallel β") {
  for (const char* name : {"flat-graph", "flat-parallel"}) {
    const Geometry G = build_geometry({name, {}}, 16, Scheme::spectral);
    CHECK(G.M.profile.berwald);
    CHECK(sup(G.bar.grad_beta) < 1e-12);
  }
}
