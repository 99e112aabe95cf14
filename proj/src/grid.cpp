#include "randers_foliate/grid.hpp"

#include <cmath>
#include <fstream>
#include <numbers>

#include "randers_foliate/error.hpp"
#include "randers_foliate/kernels.hpp"

namespace rf {

PeriodicGrid::PeriodicGrid(std::vector<int> sizes, std::vector<double> periods)
    : sizes_(std::move(sizes)), periods_(std::move(periods)) {
  if (sizes_.empty() || sizes_.size() > 3) throw ShapeError("PeriodicGrid: dimension must be 1, 2 or 3");
  if (sizes_.size() != periods_.size()) throw ShapeError("PeriodicGrid: sizes and periods differ in length");
  strides_.resize(sizes_.size());
  for (std::size_t a = 0; a < sizes_.size(); ++a) {
    if (sizes_[a] < 8) throw ShapeError("PeriodicGrid: every axis needs at least 8 points");
    if (!(periods_[a] > 0.0) || !std::isfinite(periods_[a])) throw ShapeError("PeriodicGrid: periods must be positive");
    strides_[a] = count_;
    count_ *= static_cast<std::size_t>(sizes_[a]);
  }
}

double PeriodicGrid::cell_volume() const {
  double v = 1.0;
  for (int a = 0; a < dim(); ++a) v *= spacing(a);
  return v;
}

std::array<int, 3> PeriodicGrid::index(std::size_t node) const {
  std::array<int, 3> idx{0, 0, 0};
  for (int a = 0; a < dim(); ++a) {
    idx[a] = static_cast<int>(node % static_cast<std::size_t>(sizes_[a]));
    node /= static_cast<std::size_t>(sizes_[a]);
  }
  return idx;
}

double PeriodicGrid::coordinate(std::size_t node, int axis) const {
  return spacing(axis) * index(node)[axis];
}

Vec PeriodicGrid::point(std::size_t node) const {
  const auto idx = index(node);
  Vec x(dim());
  for (int a = 0; a < dim(); ++a) x(a) = spacing(a) * idx[a];
  return x;
}

std::string scheme_name(Scheme s) { return s == Scheme::spectral ? "spectral" : "central4"; }

Scheme parse_scheme(const std::string& s) {
  if (s == "spectral") return Scheme::spectral;
  if (s == "central4") return Scheme::central4;
  throw ConfigError("unknown derivative scheme '" + s + "' (expected spectral or central4)");
}

Field::Field(GridPtr grid, std::vector<int> shape, Valence valence, std::string name)
    : grid_(std::move(grid)), shape_(std::move(shape)), valence_(valence), name_(std::move(name)) {
  if (!grid_) throw ShapeError("Field: null grid");
  for (int s : shape_) {
    if (s <= 0) throw ShapeError("Field: non-positive extent");
    components_ *= s;
  }
  data_.assign(static_cast<std::size_t>(components_) * grid_->node_count(), 0.0);
}

Vec Field::vec(std::size_t node) const {
  if (shape_.size() != 1) throw ShapeError("Field::vec on a field of rank " + std::to_string(shape_.size()));
  Vec v(shape_[0]);
  for (int i = 0; i < shape_[0]; ++i) v(i) = at(i, node);
  return v;
}

Mat Field::mat(std::size_t node) const {
  if (shape_.size() != 2) throw ShapeError("Field::mat on a field of rank " + std::to_string(shape_.size()));
  Mat m(shape_[0], shape_[1]);
  for (int i = 0; i < shape_[0]; ++i)
    for (int j = 0; j < shape_[1]; ++j) m(i, j) = at(i * shape_[1] + j, node);
  return m;
}

void Field::set_vec(std::size_t node, const Vec& v) {
  if (shape_.size() != 1 || v.size() != shape_[0]) throw ShapeError("Field::set_vec shape mismatch");
  for (int i = 0; i < shape_[0]; ++i) at(i, node) = v(i);
}

void Field::set_mat(std::size_t node, const Mat& m) {
  if (shape_.size() != 2 || m.rows() != shape_[0] || m.cols() != shape_[1])
    throw ShapeError("Field::set_mat shape mismatch");
  for (int i = 0; i < shape_[0]; ++i)
    for (int j = 0; j < shape_[1]; ++j) at(i * shape_[1] + j, node) = m(i, j);
}

Field scalar_field(GridPtr grid, std::string name) { return Field(std::move(grid), {}, {0, 0}, std::move(name)); }

namespace detail {
void spectral_derivative(const PeriodicGrid& g, std::span<const double> in, std::span<double> out, int axis1,
                         int axis2);
void spectral_gradient(const PeriodicGrid& g, std::span<const double> in, std::vector<std::span<double>> out);
}  // namespace detail

namespace {

void central4_line(const PeriodicGrid& g, const double* in, double* out, int axis) {
  const std::size_t n = static_cast<std::size_t>(g.size(axis));
  const double scale = 1.0 / (12.0 * g.spacing(axis));
  if (axis == 0) {
    const std::size_t lines = g.node_count() / n;
    for (std::size_t l = 0; l < lines; ++l) {
      const double* f = in + l * n;
      double* o = out + l * n;
      kernels::stencil4(f, f + 1, f + 3, f + 4, o + 2, n - 4, scale);
      for (std::size_t i : {std::size_t{0}, std::size_t{1}, n - 2, n - 1}) {
        const double m2 = f[(i + n - 2) % n], m1 = f[(i + n - 1) % n], p1 = f[(i + 1) % n], p2 = f[(i + 2) % n];
        kernels::scalar::stencil4(&m2, &m1, &p1, &p2, o + i, 1, scale);
      }
    }
    return;
  }
  // Other axes: whole slabs below the axis are contiguous, so vectorise across them.
  const std::size_t inner = g.stride(axis);
  const std::size_t outer = g.node_count() / (inner * n);
  for (std::size_t q = 0; q < outer; ++q) {
    const double* base = in + q * inner * n;
    double* obase = out + q * inner * n;
    for (std::size_t i = 0; i < n; ++i) {
      auto row = [&](std::size_t j) { return base + ((j + n) % n) * inner; };
      kernels::stencil4(row(i + n - 2), row(i + n - 1), row(i + 1), row(i + 2), obase + i * inner, inner, scale);
    }
  }
}

void check_axis(const Field& f, int axis) {
  if (axis < 0 || axis >= f.grid()->dim()) throw ShapeError("derivative: axis out of range");
}

}  // namespace

Field derivative(const Field& f, int axis, Scheme scheme) {
  check_axis(f, axis);
  Field out(f.grid(), f.shape(), f.valence(), f.name().empty() ? "" : "d" + std::to_string(axis) + "(" + f.name() + ")");
  for (int c = 0; c < f.components(); ++c) {
    if (scheme == Scheme::central4)
      central4_line(*f.grid(), f.component(c).data(), out.component(c).data(), axis);
    else
      detail::spectral_derivative(*f.grid(), f.component(c), out.component(c), axis, -1);
  }
  return out;
}

Field second_derivative(const Field& f, int axis1, int axis2, Scheme scheme) {
  check_axis(f, axis1);
  check_axis(f, axis2);
  if (scheme == Scheme::central4) return derivative(derivative(f, axis1, scheme), axis2, scheme);
  Field out(f.grid(), f.shape(), f.valence());
  for (int c = 0; c < f.components(); ++c)
    detail::spectral_derivative(*f.grid(), f.component(c), out.component(c), axis1, axis2);
  return out;
}

Field gradient(const Field& f, Scheme scheme) {
  const int D = f.grid()->dim();
  auto shape = f.shape();
  shape.push_back(D);
  Field out(f.grid(), shape, {f.valence().up, f.valence().down + 1}, f.name().empty() ? "" : "grad(" + f.name() + ")");
  for (int c = 0; c < f.components(); ++c) {
    if (scheme == Scheme::central4) {
      for (int k = 0; k < D; ++k) central4_line(*f.grid(), f.component(c).data(), out.component(c * D + k).data(), k);
    } else {
      std::vector<std::span<double>> outs;
      for (int k = 0; k < D; ++k) outs.push_back(out.component(c * D + k));
      detail::spectral_gradient(*f.grid(), f.component(c), outs);
    }
  }
  return out;
}

Field hessian(const Field& f, Scheme scheme) {
  const int D = f.grid()->dim();
  auto shape = f.shape();
  shape.push_back(D);
  shape.push_back(D);
  Field out(f.grid(), shape, {f.valence().up, f.valence().down + 2});
  for (int k = 0; k < D; ++k)
    for (int l = k; l < D; ++l) {
      const Field d2 = second_derivative(f, k, l, scheme);
      for (int c = 0; c < f.components(); ++c) {
        auto src = d2.component(c);
        auto a = out.component((c * D + k) * D + l);
        auto b = out.component((c * D + l) * D + k);
        std::copy(src.begin(), src.end(), a.begin());
        std::copy(src.begin(), src.end(), b.begin());
      }
    }
  return out;
}

void write_field_csv(const Field& f, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw ConfigError("cannot open '" + path + "' for writing");
  const auto& g = *f.grid();
  os << "# field=" << (f.name().empty() ? "unnamed" : f.name()) << " valence=(" << f.valence().up << ","
     << f.valence().down << ") shape=[";
  for (std::size_t i = 0; i < f.shape().size(); ++i) os << (i ? "," : "") << f.shape()[i];
  os << "] grid=[";
  for (int a = 0; a < g.dim(); ++a) os << (a ? "," : "") << g.size(a);
  os << "] periods=[";
  os.precision(17);
  for (int a = 0; a < g.dim(); ++a) os << (a ? "," : "") << g.period(a);
  os << "]\n";
  for (int a = 0; a < g.dim(); ++a) os << (a ? "," : "") << "x" << a;
  for (int c = 0; c < f.components(); ++c) os << ",c" << c;
  os << "\n";
  for (std::size_t node = 0; node < g.node_count(); ++node) {
    for (int a = 0; a < g.dim(); ++a) os << (a ? "," : "") << g.coordinate(node, a);
    for (int c = 0; c < f.components(); ++c) os << "," << f.at(c, node);
    os << "\n";
  }
}

}  // namespace rf
