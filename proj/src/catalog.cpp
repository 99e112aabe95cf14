#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>

#include "randers_foliate/error.hpp"
#include "randers_foliate/foliated.hpp"

namespace rf {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::vector<CatalogEntry> make_catalog() {
  return {
      {"conformal-torus",
       "conformal-torus: non-Berwald, generic β, coordinate foliation → shape operator and curvature vector "
       "comparison, general-beta, second-order-init (β = 0), Riccati",
       "a = e^{2φ}δ on the flat torus, leaves z = const, β♯ = e^{-φ} b with a smooth Euclidean field b",
       {{"dim", 3, "manifold dimension (2 or 3)"},
        {"amp", 0.3, "φ coefficient of sin(x + 0.4) cos(z - 0.9)"},
        {"amp_z", 0.2, "φ coefficient of sin(z + 0.3)"},
        {"amp_y", 0.0, "φ coefficient of sin(y + 1.1) cos(x - 0.5) (dim 3)"},
        {"beta_mode", 0, "0 generic b, 1 β♯ = f N, 2 β♯ = ε′X + εN with X = e^{-φ}∂x (needs amp = amp_y = 0)"},
        {"beta_scale", 1.0, "scale of the generic and normal β fields"},
        {"eps", 0.3, "ε for beta_mode 2"},
        {"eps_prime", 0.4, "ε′ for beta_mode 2"}}},
      {"flat-graph",
       "flat-graph: Berwald, K̄=0 → randers-k, space-form, sigma2-berwald",
       "flat torus, leaves are level sets of z - φ(x, y), constant β",
       {{"dim", 3, "manifold dimension (2 or 3)"},
        {"amp_x", 0.4, "φ coefficient of sin(x) + 0.35 cos(2x + 0.6)"},
        {"amp_y", 0.25, "φ coefficient of cos(y) (dim 3)"},
        {"slope", 0.0, "linear part of φ along x"},
        {"bx", 0.2, "β♯ component along x"},
        {"by", 0.35, "β♯ component along y (dim 3)"},
        {"bz", 0.15, "β♯ component along z"}}},
      {"flat-parallel",
       "flat-parallel: Berwald, K̄=0, Ā=Z̄=0 → reeb, sigma2-berwald, riemannian-vanishing, energy equality",
       "flat torus, leaves z = const, constant β",
       {{"dim", 3, "manifold dimension (2 or 3)"},
        {"bx", 0.3, "β♯ component along x"},
        {"by", 0.0, "β♯ component along y (dim 3)"},
        {"bz", 0.4, "β♯ component along z"}}},
      {"sphere-latitudes",
       "sphere-latitudes: singular Σ = 2 points → reeb with excised poles",
       "round S² in the longitude/latitude chart (latitude doubled to stay periodic), leaves are latitude "
       "circles, poles excised",
       {{"r0", 0.05, "excision radius around each pole"},
        {"eps_n", 0.3, "β♯ normal part ε_n cosθ sin²θ ∂θ"},
        {"eps_rot", 0.2, "β♯ rotational part ε_rot ∂φ"}}},
  };
}

double get(const Params& p, const std::string& k) { return p.at(k); }

int dim_param(const Params& p) {
  const double d = get(p, "dim");
  if (d != 2.0 && d != 3.0) throw ValidationError("dim must be 2 or 3");
  return static_cast<int>(d);
}

struct Builder {
  FoliatedRandersManifold M;
  int D = 0;

  Builder(const std::string& name, const Params& params, std::vector<int> sizes, std::vector<double> periods) {
    M.example = name;
    M.params = params;
    M.grid = std::make_shared<PeriodicGrid>(std::move(sizes), std::move(periods));
    D = M.grid->dim();
    M.metric = Field(M.grid, {D, D}, {0, 2}, "a");
    M.beta = Field(M.grid, {D}, {0, 1}, "beta");
    M.beta_sharp = Field(M.grid, {D}, {1, 0}, "beta_sharp");
    M.normal = Field(M.grid, {D}, {1, 0}, "N");
    M.test_function = scalar_field(M.grid, "f");
    M.quadrature_fraction.assign(M.grid->node_count(), 1.0);
  }

  // sample(x) -> (a, β♯, N, f); β is lowered here.
  void fill(const std::function<void(const Vec&, Mat&, Vec&, Vec&, double&)>& sample) {
    for (std::size_t node = 0; node < M.grid->node_count(); ++node) {
      const Vec x = M.grid->point(node);
      Mat a = Mat::Identity(D, D);
      Vec bs = Vec::Zero(D), N = Vec::Zero(D);
      double f = 1.0;
      sample(x, a, bs, N, f);
      M.metric.set_mat(node, a);
      M.beta_sharp.set_vec(node, bs);
      M.beta.set_vec(node, a * bs);
      M.normal.set_vec(node, N);
      M.test_function.at(0, node) = f;
    }
  }
};

std::vector<double> torus_periods(int D) { return std::vector<double>(D, kTwoPi); }

FoliatedRandersManifold flat_parallel(const Params& p, const std::vector<int>& sizes) {
  const int D = dim_param(p);
  if (D == 2 && get(p, "by") != 0.0) throw ValidationError("flat-parallel: by must be 0 when dim = 2");
  Builder b("flat-parallel", p, sizes, torus_periods(D));
  Vec bs(D);
  if (D == 2)
    bs << get(p, "bx"), get(p, "bz");
  else
    bs << get(p, "bx"), get(p, "by"), get(p, "bz");
  if (bs.norm() >= 1.0) throw ValidationError("flat-parallel: ‖β‖ must be below 1");
  b.fill([&](const Vec& x, Mat&, Vec& beta, Vec& N, double& f) {
    beta = bs;
    N(D - 1) = 1.0;
    f = std::exp(std::cos(x(0)) + 0.3 * std::sin(2.0 * x(0) + 0.5));
  });
  b.M.profile.berwald = true;
  b.M.profile.flat = true;
  b.M.profile.locally_symmetric = true;
  b.M.profile.constant_curvature = true;
  b.M.profile.riemannian = bs.norm() == 0.0;
  return b.M;
}

FoliatedRandersManifold flat_graph(const Params& p, const std::vector<int>& sizes) {
  const int D = dim_param(p);
  if (D == 2 && (get(p, "by") != 0.0 || get(p, "amp_y") != 0.0))
    throw ValidationError("flat-graph: by and amp_y must be 0 when dim = 2");
  Builder b("flat-graph", p, sizes, torus_periods(D));
  Vec bs(D);
  if (D == 2)
    bs << get(p, "bx"), get(p, "bz");
  else
    bs << get(p, "bx"), get(p, "by"), get(p, "bz");
  if (bs.norm() >= 1.0) throw ValidationError("flat-graph: ‖β‖ must be below 1");
  const double ax = get(p, "amp_x"), ay = get(p, "amp_y"), slope = get(p, "slope");
  b.fill([&](const Vec& x, Mat&, Vec& beta, Vec& N, double& f) {
    beta = bs;
    Vec grad = Vec::Zero(D);
    grad(0) = ax * (std::cos(x(0)) - 0.7 * std::sin(2.0 * x(0) + 0.6)) + slope;
    if (D == 3) grad(1) = -ay * std::sin(x(1));
    N = -grad;
    N(D - 1) = 1.0;
    N /= N.norm();
    f = std::exp(std::cos(x(0)) + 0.3 * std::sin(2.0 * x(0) + 0.5));
  });
  b.M.profile.berwald = true;
  b.M.profile.flat = true;
  b.M.profile.locally_symmetric = true;
  b.M.profile.constant_curvature = true;
  b.M.profile.riemannian = bs.norm() == 0.0;
  return b.M;
}

FoliatedRandersManifold conformal_torus(const Params& p, const std::vector<int>& sizes) {
  const int D = dim_param(p);
  const double amp = get(p, "amp"), amp_z = get(p, "amp_z"), amp_y = get(p, "amp_y");
  const int mode = static_cast<int>(get(p, "beta_mode"));
  const double s = get(p, "beta_scale"), eps = get(p, "eps"), eps_p = get(p, "eps_prime");
  if (D == 2 && amp_y != 0.0) throw ValidationError("conformal-torus: amp_y must be 0 when dim = 2");
  if (mode < 0 || mode > 2 || get(p, "beta_mode") != mode) throw ValidationError("conformal-torus: beta_mode must be 0, 1 or 2");
  if (mode == 2 && (amp != 0.0 || amp_y != 0.0))
    throw ValidationError("conformal-torus: beta_mode 2 needs φ = φ(z), i.e. amp = amp_y = 0");
  if (mode == 2 && std::hypot(eps, eps_p) >= 1.0) throw ValidationError("conformal-torus: ε² + ε′² must be below 1");
  if (mode != 2 && std::abs(s) >= 1.6) throw ValidationError("conformal-torus: |beta_scale| must be below 1.6");
  Builder b("conformal-torus", p, sizes, torus_periods(D));
  b.fill([&](const Vec& x, Mat& a, Vec& beta, Vec& N, double& f) {
    const double X = x(0), Z = x(D - 1), Y = D == 3 ? x(1) : 0.0;
    const double phi = amp * std::sin(X + 0.4) * std::cos(Z - 0.9) + amp_z * std::sin(Z + 0.3) +
                       amp_y * std::sin(Y + 1.1) * std::cos(X - 0.5);
    const double e = std::exp(phi);
    a = e * e * Mat::Identity(D, D);
    Vec euclid = Vec::Zero(D);
    if (mode == 0) {
      euclid(0) = s * (0.3 + 0.15 * std::sin(Z + 0.6) * std::cos(X - 0.2));
      if (D == 3) euclid(1) = s * 0.2 * std::cos(X - Z + 0.5);
      euclid(D - 1) = s * (0.1 + 0.25 * std::sin(X + Z + 0.8));
    } else if (mode == 1) {
      euclid(D - 1) = s * (0.1 + 0.3 * std::sin(X + 0.4) * std::cos(Z - 0.9));
    } else {
      euclid(0) = eps_p;
      euclid(D - 1) = eps;
    }
    beta = euclid / e;
    N(D - 1) = 1.0 / e;
    f = std::exp(std::cos(X) + 0.3 * std::sin(Z + 0.5));
  });
  b.M.profile.riemannian = (mode != 2 && s == 0.0);
  b.M.profile.berwald = b.M.profile.riemannian;
  const bool flat = amp == 0.0 && amp_z == 0.0 && amp_y == 0.0;
  b.M.profile.flat = flat;
  b.M.profile.locally_symmetric = b.M.profile.riemannian && flat;
  b.M.profile.constant_curvature = flat;
  return b.M;
}

FoliatedRandersManifold sphere_latitudes(const Params& p, const std::vector<int>& sizes) {
  const double r0 = get(p, "r0"), en = get(p, "eps_n"), er = get(p, "eps_rot");
  if (!(r0 > 0.0) || r0 >= 0.5 * std::numbers::pi) throw ValidationError("sphere-latitudes: r0 must be in (0, π/2)");
  if (std::abs(en) * 0.3849 + std::abs(er) >= 0.99) throw ValidationError("sphere-latitudes: β too large");
  Builder b("sphere-latitudes", p, sizes, {kTwoPi, kTwoPi});
  // axis 0 = longitude φ, axis 1 = latitude θ (doubled chart, only θ ∈ (0, π) is integrated)
  b.fill([&](const Vec& x, Mat& a, Vec& beta, Vec& N, double& f) {
    const double th = x(1), st = std::sin(th), ct = std::cos(th);
    a(0, 0) = st * st;
    beta(0) = er;
    beta(1) = en * ct * st * st;
    N(1) = 1.0;
    f = 1.0 + 0.5 * ct * st * st;
  });
  const auto& g = *b.M.grid;
  const double h = g.spacing(1);
  const double lo = r0, hi = std::numbers::pi - r0;
  for (std::size_t node = 0; node < g.node_count(); ++node) {
    const double th = g.coordinate(node, 1);
    const double left = std::max(th - 0.5 * h, lo), right = std::min(th + 0.5 * h, hi);
    b.M.quadrature_fraction[node] = right > left ? (right - left) / h : 0.0;
  }
  // A pole node is never integrated: the part of its cell beyond r0 goes to the neighbour
  // on the interior side, whose fraction then exceeds 1.
  const int n1 = g.size(1);
  for (std::size_t node = 0; node < g.node_count(); ++node) {
    const int j = g.index(node)[1];
    if (j != 0 && 2 * j != n1) continue;
    const std::size_t inner = j == 0 ? node + g.stride(1) : node - g.stride(1);
    b.M.quadrature_fraction[inner] += b.M.quadrature_fraction[node];
    b.M.quadrature_fraction[node] = 0.0;
  }
  Vec north(2), south(2);
  north << 0.0, 0.0;
  south << 0.0, std::numbers::pi;
  b.M.excision = {{north, r0}, {south, r0}};
  b.M.profile.singular = true;
  b.M.profile.riemannian = en == 0.0 && er == 0.0;
  b.M.profile.berwald = b.M.profile.riemannian;
  b.M.profile.constant_curvature = true;
  b.M.profile.curvature = 1.0;
  b.M.profile.locally_symmetric = b.M.profile.riemannian;
  return b.M;
}

}  // namespace

const std::vector<CatalogEntry>& catalog() {
  static const std::vector<CatalogEntry> entries = make_catalog();
  return entries;
}

const CatalogEntry& catalog_entry(const std::string& name) {
  for (const auto& e : catalog())
    if (e.name == name) return e;
  throw ConfigError("unknown example '" + name + "'");
}

Params resolve_params(const ExampleSpec& spec) {
  const auto& entry = catalog_entry(spec.name);
  Params p;
  for (const auto& ps : entry.params) p[ps.name] = ps.default_value;
  for (const auto& [k, v] : spec.params) {
    if (!p.count(k)) throw ConfigError("example '" + spec.name + "' has no parameter '" + k + "'");
    if (!std::isfinite(v)) throw ConfigError("parameter '" + k + "' is not finite");
    p[k] = v;
  }
  return p;
}

int default_resolution(const ExampleSpec& spec) {
  if (spec.name == "sphere-latitudes") return 256;
  const Params p = resolve_params(spec);
  return p.at("dim") == 2.0 ? 64 : 32;
}

std::vector<int> example_sizes(const ExampleSpec& spec, int resolution) {
  if (resolution < 8) throw ConfigError("resolution must be at least 8");
  const Params p = resolve_params(spec);
  const int n = resolution;
  if (spec.name == "sphere-latitudes") return {8, n};
  const int D = dim_param(p);
  std::vector<int> sizes(D, 8);
  if (spec.name == "flat-parallel") return sizes;
  if (spec.name == "flat-graph") {
    sizes[0] = n;
    if (D == 3 && p.at("amp_y") != 0.0) sizes[1] = n;
    return sizes;
  }
  // conformal-torus
  const bool z_only = p.at("amp") == 0.0 && p.at("amp_y") == 0.0 && p.at("beta_mode") == 2.0;
  sizes[D - 1] = n;
  if (!z_only) sizes[0] = n;
  if (D == 3 && p.at("amp_y") != 0.0) sizes[1] = n;
  return sizes;
}

FoliatedRandersManifold build_example(const ExampleSpec& spec, int resolution) {
  const Params p = resolve_params(spec);
  const auto sizes = example_sizes(spec, resolution);
  FoliatedRandersManifold M;
  if (spec.name == "flat-parallel")
    M = flat_parallel(p, sizes);
  else if (spec.name == "flat-graph")
    M = flat_graph(p, sizes);
  else if (spec.name == "conformal-torus")
    M = conformal_torus(p, sizes);
  else
    M = sphere_latitudes(p, sizes);
  M.validate();
  return M;
}

void FoliatedRandersManifold::validate() const {
  const std::size_t n = grid->node_count();
  if (quadrature_fraction.size() != n) throw ValidationError("manifold: quadrature fraction has wrong size");
  for (std::size_t node = 0; node < n; ++node) {
    if (!active(node)) continue;
    const Mat a = metric.mat(node);
    const Vec b = beta.vec(node), bs = beta_sharp.vec(node), N = normal.vec(node);
    if (!a.allFinite() || !b.allFinite() || !bs.allFinite() || !N.allFinite())
      throw ValidationError("manifold: non-finite value at node " + std::to_string(node));
    Eigen::LLT<Mat> llt(a);
    if (llt.info() != Eigen::Success) throw ValidationError("manifold: a not SPD at node " + std::to_string(node));
    if ((a * bs - b).norm() > 1e-12 * (1.0 + b.norm()))
      throw ValidationError("manifold: β and β♯ disagree at node " + std::to_string(node));
    if (b.dot(bs) >= 1.0) throw ValidationError("manifold: ‖β‖_α >= 1 at node " + std::to_string(node));
    if (std::abs(N.dot(a * N) - 1.0) > 1e-12) throw ValidationError("manifold: N not α-unit at node " + std::to_string(node));
  }
}

}  // namespace rf
