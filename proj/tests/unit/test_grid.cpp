#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include "../support/oracles.hpp"
#include "randers_foliate/error.hpp"
#include "randers_foliate/grid.hpp"
#include "randers_foliate/kernels.hpp"

using namespace rf;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

GridPtr torus(std::vector<int> sizes) {
  return std::make_shared<PeriodicGrid>(sizes, std::vector<double>(sizes.size(), kTwoPi));
}

template <class Fn>
Field sample(const GridPtr& g, Fn fn) {
  Field f = scalar_field(g);
  for (std::size_t i = 0; i < g->node_count(); ++i) f.at(0, i) = fn(g->point(i));
  return f;
}

double max_err(const Field& f, const Field& ref) {
  double e = 0.0;
  for (std::size_t i = 0; i < f.data().size(); ++i) e = std::max(e, std::abs(f.data()[i] - ref.data()[i]));
  return e;
}

// Restores the dispatch chosen at startup.
struct IsaGuard {
  kernels::Isa saved = kernels::active_isa();
  ~IsaGuard() { kernels::force_isa(saved); }
};

}  // namespace

TEST_CASE("grid indexing and coordinates") {
  const PeriodicGrid g({8, 10, 12}, {1.0, 2.0, 3.0});
  CHECK(g.node_count() == 960);
  CHECK(g.stride(0) == 1);
  CHECK(g.stride(1) == 8);
  CHECK(g.stride(2) == 80);
  CHECK(g.cell_volume() == doctest::Approx(1.0 / 8 * 0.2 * 0.25));
  const std::size_t node = 3 + 8 * 4 + 80 * 5;
  CHECK(g.index(node) == std::array<int, 3>{3, 4, 5});
  CHECK(g.coordinate(node, 1) == doctest::Approx(0.8));
  CHECK_THROWS_AS(PeriodicGrid({4}, {1.0}), ShapeError);
  CHECK_THROWS_AS(PeriodicGrid({8, 8}, {1.0}), ShapeError);
  CHECK_THROWS_AS(PeriodicGrid({8}, {-1.0}), ShapeError);
  CHECK_THROWS_AS(parse_scheme("upwind"), ConfigError);
  CHECK(parse_scheme("central4") == Scheme::central4);
}

TEST_CASE("spectral derivatives are exact on trigonometric polynomials") {
  const auto g = torus({16, 12});
  const Field f = sample(g, [](const Vec& p) { return std::sin(3 * p(0)) * std::cos(2 * p(1)) + std::cos(p(0) - p(1)); });
  const Field fx = sample(g, [](const Vec& p) { return 3 * std::cos(3 * p(0)) * std::cos(2 * p(1)) - std::sin(p(0) - p(1)); });
  const Field fxy =
      sample(g, [](const Vec& p) { return -6 * std::cos(3 * p(0)) * std::sin(2 * p(1)) + std::cos(p(0) - p(1)); });
  CHECK(max_err(derivative(f, 0, Scheme::spectral), fx) < 1e-12);
  CHECK(max_err(second_derivative(f, 0, 1, Scheme::spectral), fxy) < 1e-11);
  const Field H = hessian(f, Scheme::spectral);
  CHECK(H.shape() == std::vector<int>{2, 2});
  for (std::size_t i = 0; i < g->node_count(); ++i) CHECK(std::abs(H.at(1, i) - H.at(2, i)) < 1e-11);
}

TEST_CASE("central4 converges at fourth order") {
  auto err = [](int n) {
    const auto g = torus({n, 8});
    const Field f = sample(g, [](const Vec& p) { return std::exp(std::sin(p(0))); });
    const Field ref = sample(g, [](const Vec& p) { return std::cos(p(0)) * std::exp(std::sin(p(0))); });
    return max_err(derivative(f, 0, Scheme::central4), ref);
  };
  const double e1 = err(32), e2 = err(64), e3 = err(128);
  CHECK(e1 / e2 > 12.0);
  CHECK(e2 / e3 > 14.0);
}

TEST_CASE("gradient appends a trailing index") {
  const auto g = torus({8, 8, 8});
  Field v(g, {3}, {1, 0});
  for (std::size_t i = 0; i < g->node_count(); ++i) {
    const Vec p = g->point(i);
    v.at(0, i) = std::sin(p(2));
    v.at(1, i) = std::cos(p(0));
    v.at(2, i) = 0.0;
  }
  const Field dv = gradient(v, Scheme::spectral);
  CHECK(dv.shape() == std::vector<int>{3, 3});
  CHECK(dv.valence() == Valence{1, 1});
  for (std::size_t i = 0; i < g->node_count(); ++i) {
    const Vec p = g->point(i);
    CHECK(dv.mat(i)(0, 2) == doctest::Approx(std::cos(p(2))).epsilon(1e-12).scale(1.0));
    CHECK(dv.mat(i)(1, 0) == doctest::Approx(-std::sin(p(0))).epsilon(1e-12).scale(1.0));
  }
}

TEST_CASE("scalar and AVX2 kernels agree") {
  if (!kernels::avx2_available()) return;
  IsaGuard guard;
  rf::testing::Rng rng(31);
  for (std::size_t n : {1u, 3u, 4u, 7u, 64u, 1001u}) {
    std::vector<double> a(2 * n), b(2 * n), c(2 * n), d(2 * n), k(n);
    for (auto* v : {&a, &b, &c, &d})
      for (double& x : *v) x = rng.normal();
    for (double& x : k) x = rng.normal();
    std::vector<double> s(2 * n), v(2 * n);
    kernels::scalar::stencil4(a.data(), b.data(), c.data(), d.data(), s.data(), n, 0.7);
    kernels::avx2::stencil4(a.data(), b.data(), c.data(), d.data(), v.data(), n, 0.7);
    for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(s[i] - v[i]) <= 1e-15 * (1.0 + std::abs(s[i])));
    kernels::scalar::multiply(a.data(), b.data(), s.data(), n);
    kernels::avx2::multiply(a.data(), b.data(), v.data(), n);
    for (std::size_t i = 0; i < n; ++i) CHECK(s[i] == v[i]);
    kernels::scalar::mul_i_wavenumber(a.data(), k.data(), s.data(), n);
    kernels::avx2::mul_i_wavenumber(a.data(), k.data(), v.data(), n);
    for (std::size_t i = 0; i < 2 * n; ++i) CHECK(s[i] == v[i]);
    kernels::scalar::mul_real(a.data(), k.data(), s.data(), n);
    kernels::avx2::mul_real(a.data(), k.data(), v.data(), n);
    for (std::size_t i = 0; i < 2 * n; ++i) CHECK(s[i] == v[i]);
  }
}

TEST_CASE("derivatives agree under both dispatch targets") {
  if (!kernels::avx2_available()) return;
  IsaGuard guard;
  const auto g = torus({24, 16});
  const Field f = sample(g, [](const Vec& p) { return std::exp(std::cos(p(0)) * std::sin(p(1))); });
  for (Scheme s : {Scheme::spectral, Scheme::central4}) {
    kernels::force_isa(kernels::Isa::scalar);
    const Field a = hessian(f, s);
    kernels::force_isa(kernels::Isa::avx2);
    const Field b = hessian(f, s);
    CHECK(max_err(a, b) < 1e-13);
  }
}

TEST_CASE("pairwise_sum is deterministic and accurate") {
  std::vector<double> x(10001);
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = 1.0 / static_cast<double>(i + 1);
  double ref = 0.0;
  for (std::size_t i = x.size(); i-- > 0;) ref += x[i];
  CHECK(kernels::pairwise_sum(x.data(), x.size()) == doctest::Approx(ref).epsilon(1e-14));
  CHECK(kernels::pairwise_sum(x.data(), x.size()) == kernels::pairwise_sum(x.data(), x.size()));
  CHECK(kernels::pairwise_sum(x.data(), 0) == 0.0);
}

TEST_CASE("field CSV dump has a header and one row per node") {
  const auto g = torus({8, 8});
  Field f = sample(g, [](const Vec& p) { return p(0); });
  f.set_name("x");
  const auto path = std::filesystem::temp_directory_path() / "rf_field_test.csv";
  write_field_csv(f, path.string());
  std::ifstream is(path);
  std::string line;
  int comments = 0, rows = 0;
  while (std::getline(is, line)) {
    if (line.rfind("#", 0) == 0) ++comments;
    else ++rows;
  }
  CHECK(comments >= 1);
  CHECK(rows == 64 + 1);  // column header plus nodes
  std::filesystem::remove(path);
  CHECK_THROWS_AS(write_field_csv(f, "/nonexistent-dir/x.csv"), ConfigError);
}

TEST_CASE("field accessors reject wrong ranks") {
  const auto g = torus({8});
  Field s = scalar_field(g);
  CHECK_THROWS_AS(s.vec(0), ShapeError);
  Field v(g, {2}, {1, 0});
  CHECK_THROWS_AS(v.mat(0), ShapeError);
  CHECK_THROWS_AS(v.set_vec(0, Vec::Zero(3)), ShapeError);
  CHECK_THROWS_AS(derivative(s, 1, Scheme::spectral), ShapeError);
}
