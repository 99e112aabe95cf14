#pragma once

#include <map>
#include <string>
#include <vector>

#include "randers_foliate/grid.hpp"
#include "randers_foliate/randers_point.hpp"

namespace rf {

using Params = std::map<std::string, double>;

struct ExampleSpec {
  std::string name;
  Params params;  // overrides of the catalog defaults
};

struct ParamSpec {
  std::string name;
  double default_value = 0.0;
  std::string help;
};

struct CatalogEntry {
  std::string name;
  std::string profile;  // one-line hypothesis profile, "name: ... → ..."
  std::string description;
  std::vector<ParamSpec> params;
};

// Stable, alphabetical.
const std::vector<CatalogEntry>& catalog();
const CatalogEntry& catalog_entry(const std::string& name);  // ConfigError if unknown

// Hypotheses known analytically for an instance (after parameters are applied).
struct HypothesisProfile {
  bool berwald = false;              // ∇̄β = 0
  bool flat = false;                 // K̄ = 0
  bool locally_symmetric = false;    // F-locally symmetric (flat Berwald or Riemannian space form)
  bool constant_curvature = false;   // R̄_N = K I
  double curvature = 0.0;            // K when constant_curvature
  bool riemannian = false;           // β = 0
  bool singular = false;             // excised singular set
  bool negative_ricci = false;       // Ric_ν <= -r < 0 certificate
};

struct Excision {
  Vec center;     // chart coordinates
  double radius;  // geodesic radius
};

// Closed foliated Randers manifold sampled on one periodic chart.
struct FoliatedRandersManifold {
  std::string example;
  Params params;
  GridPtr grid;
  Field metric;  // a_ij, {D, D}
  Field beta;    // β_i, {D}
  Field beta_sharp;  // β♯^i, {D}, sampled analytically so it stays finite where a degenerates
  Field normal;  // N^i, {D}, α-unit
  Field test_function;  // f for the weighted Reeb identity
  std::vector<Excision> excision;
  // Share of each node's cell that is integrated: 1 inside, 0 on excised or
  // duplicated chart regions, fractional on the excision boundary.
  std::vector<double> quadrature_fraction;
  HypothesisProfile profile;

  int dim() const { return grid->dim(); }
  int leaf_dim() const { return grid->dim() - 1; }
  bool active(std::size_t node) const { return quadrature_fraction[node] > 0.0; }
  RandersPoint point(std::size_t node) const { return RandersPoint(metric.mat(node), beta.vec(node)); }

  // Checks the manifold invariants at active nodes; throws ValidationError.
  void validate() const;
};

int default_resolution(const ExampleSpec& spec);

// Per-axis sizes: axes along which the example's fields are constant get the minimum of 8 points.
std::vector<int> example_sizes(const ExampleSpec& spec, int resolution);

FoliatedRandersManifold build_example(const ExampleSpec& spec, int resolution);

// Resolved parameter map (defaults merged with overrides); ConfigError on unknown names.
Params resolve_params(const ExampleSpec& spec);

// Christoffel symbols Γ^i_{jk} (shape {D, D, D}) of a metric field, numeric derivatives of `metric`.
// Nodes with fraction 0 in `active` are skipped (left zero). NumericError at non-SPD active nodes.
Field levi_civita(const Field& metric, Scheme scheme, const std::vector<double>& active);

// Frame of the leaf tangent space at a node: a-orthonormal columns, Gram–Schmidt of
// the coordinate vectors projected off N, in axis order.
Mat leaf_frame(const Mat& a, const Vec& N);

// Riemannian extrinsic data of the foliation with respect to a.
struct BarGeometry {
  Scheme scheme = Scheme::spectral;
  Field christoffel;    // Γ̄^i_{jk}
  Field frame;          // {D, m}
  Field grad_normal;    // (∇̄N)^i_k = (∇̄_{∂k} N)^i
  Field shape_coord;    // Ā as a coordinate (1,1) tensor, vanishing on N
  Field shape;          // Ā in the leaf frame, {m, m}
  Field curvature_vector;  // Z̄ = ∇̄_N N, {D}
  Field grad_beta;         // (∇̄β♯)^i_k
  Field deformation;       // Def_{β♯} = ½(∇̄β♯ + (∇̄β♯)^t), coordinate (1,1)
  Field beta_tan;          // β♯⊤ = β♯ - β(N) N
  Field grad_beta_tan;     // (∇̄β♯⊤)^i_k
  Field c;                 // c = sqrt(1 - ‖β♯⊤‖²)
  Field c_hat;             // ĉ = c + β(N)
  Field grad_c;            // dc, {D}
  Field grad_c_hat;        // dĉ, {D}
};

BarGeometry extrinsic_bar(const FoliatedRandersManifold& M, Scheme scheme);

// Riemann tensor of a, R̄_N on the leaf frame and Ric̄_N. Pointwise from ∂a and ∂²a,
// so it is valid on excised manifolds as well.
struct CurvatureBar {
  Field riemann;   // R^i_{jkl}, R(∂k, ∂l)∂j = R^i_{jkl} ∂i
  Field r_normal;  // R̄_N(u) = R̄(u, N)N in the leaf frame, {m, m}
  Field ricci_normal;
};

CurvatureBar curvature_bar(const FoliatedRandersManifold& M, const BarGeometry& bar);

// Riccati residual R̄_N - (Def_Z̄^⊤ + ∇̄_N Ā - Ā² - Z̄♭⊗Z̄) in the leaf frame. Needs a manifold without excision.
Field riccati_residual(const FoliatedRandersManifold& M, const BarGeometry& bar, const CurvatureBar& curv);

// Antisymmetric part of ⟨∇̄_u Z̄, v⟩ in the leaf frame. Needs a manifold without excision.
Field codazzi_residual_bar(const FoliatedRandersManifold& M, const BarGeometry& bar);

// Divergence of a vector field with respect to dV_a.
Field divergence_a(const FoliatedRandersManifold& M, const Field& X, Scheme scheme);

enum class Volume { a, g, F };
std::string volume_name(Volume v);

// Pointwise quadrature weight per node, including the cell volume and excision fraction.
std::vector<double> volume_weights(const FoliatedRandersManifold& M, Volume volume);

// Trapezoid rule with pairwise summation; NumericError on a non-finite value at an integrated node.
double integrate(const Field& f, const FoliatedRandersManifold& M, Volume volume);
double integrate(const std::vector<double>& f, const FoliatedRandersManifold& M, Volume volume);

}  // namespace rf
