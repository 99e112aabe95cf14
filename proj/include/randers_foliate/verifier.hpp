#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "randers_foliate/extrinsic.hpp"

namespace rf {

enum class Verdict { pass, fail, not_applicable };
std::string verdict_name(Verdict v);

// equal: pass iff |value - expected| <= tolerance.
// at_least: an inequality LHS >= RHS stored as value = LHS, expected = RHS; pass iff value >= expected - tolerance.
enum class Relation { equal, at_least };
std::string relation_name(Relation r);

struct HypothesisCheck {
  std::string name;
  double measured = 0.0;
  double threshold = 0.0;
  bool holds = false;
  bool analytic = false;  // known from the construction, not measured
};

struct ConvergencePoint {
  int resolution = 0;
  double h = 0.0;
  double value = 0.0;
};

struct ResidualReport {
  std::string formula_id;
  std::string example;
  Params params;
  std::vector<int> resolution;  // grid sizes of the finest run
  std::string scheme;
  Relation relation = Relation::equal;
  double value = 0.0;
  double expected = 0.0;
  double tolerance = 0.0;
  double scale = 0.0;  // ∫|integrand| or the magnitude the value is measured against
  Verdict verdict = Verdict::not_applicable;
  std::vector<ConvergencePoint> convergence;
  std::vector<HypothesisCheck> hypotheses;
  std::string note;

  double residual() const { return value - expected; }
};

struct FormulaInfo {
  std::string id;     // base id; series formulas expand to id.k1, id.k2, ...
  std::string group;  // reeb, second-order, series, randers-gen, inequality, vanishing, matinv
  bool series = false;
  bool example_free = false;
  double base_tolerance = 1e-6;
  std::string description;
};

// Stable order; this is also the report order within an example.
const std::vector<FormulaInfo>& formula_registry();

// Expands selectors (ids, base ids of series, group names, "all") into concrete ids for leaf dimension m.
// ConfigError on an unknown selector.
std::vector<std::string> expand_formulas(const std::vector<std::string>& selectors, int m);

// Throws ConfigError unless every selector names a registry id, a series member, a group or "all".
void check_formula_selectors(const std::vector<std::string>& selectors);

// All fields needed by the formulas at one resolution.
struct Geometry {
  FoliatedRandersManifold M;
  BarGeometry bar;
  CurvatureBar curv;
  ExtrinsicBundle X;
  Field N_f;  // N(f) for the weighted Reeb formula
  Field div_beta;
};

Geometry build_geometry(const ExampleSpec& spec, int resolution, Scheme scheme);
// Same for a manifold assembled by hand (tests, counterexamples outside the catalog).
Geometry build_geometry(FoliatedRandersManifold M, Scheme scheme);

// One formula at one resolution; verdict left for the sweep to decide.
struct Sample {
  double value = 0.0;
  double expected = 0.0;
  double scale = 0.0;
  Relation relation = Relation::equal;
  bool applicable = true;
  std::vector<HypothesisCheck> hypotheses;
  std::string note;
};

Sample evaluate_formula(const std::string& id, const Geometry& G);

// Pointwise integrands exposed for tests; masked nodes are zero.
std::vector<double> randers_k_integrand(const Geometry& G, int k);
std::vector<double> reeb_type_integrand(const Geometry& G);

// Σ_{‖λ‖=k} σ_λ(B_1, ..., B_k), ‖λ‖ = Σ i λ_i, with B_{2j} = (-1)^j/(2j)! R^j and B_{2j+1} = (-1)^j/(2j+1)! R^j A.
double series_invariant(const Mat& A, const Mat& R, int k);

// Tolerance from a convergence table: max(base, 10 × discretization error estimate of the finest value).
// The estimate is |r_f - r_c| for spectral and |r_f - r_c| / (2^4 - 1) for central4 (Richardson, doubling).
double tolerance_from_table(const std::vector<ConvergencePoint>& table, Scheme scheme, double base);

struct VerifyRequest {
  ExampleSpec example;
  std::vector<int> resolutions;  // ascending after normalization
  std::vector<std::string> formulas;  // selectors
  Scheme scheme = Scheme::spectral;
  std::uint64_t seed = 1;
  int jobs = 1;
};

// Builds every resolution (in parallel, bounded by jobs), evaluates the formulas and assembles
// reports in registry order. Deterministic for a fixed request.
std::vector<ResidualReport> verify(const VerifyRequest& req);

bool all_applicable_pass(const std::vector<ResidualReport>& reports);

}  // namespace rf
