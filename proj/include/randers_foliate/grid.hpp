#pragma once

#include <array>
#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "randers_foliate/linalg.hpp"

namespace rf {

// Uniform periodic grid on a box; axis 0 varies fastest in memory.
class PeriodicGrid {
 public:
  PeriodicGrid(std::vector<int> sizes, std::vector<double> periods);

  int dim() const { return static_cast<int>(sizes_.size()); }
  int size(int axis) const { return sizes_[axis]; }
  const std::vector<int>& sizes() const { return sizes_; }
  double period(int axis) const { return periods_[axis]; }
  double spacing(int axis) const { return periods_[axis] / sizes_[axis]; }
  std::size_t stride(int axis) const { return strides_[axis]; }
  std::size_t node_count() const { return count_; }
  double cell_volume() const;

  std::array<int, 3> index(std::size_t node) const;
  double coordinate(std::size_t node, int axis) const;
  Vec point(std::size_t node) const;

  bool operator==(const PeriodicGrid& o) const { return sizes_ == o.sizes_ && periods_ == o.periods_; }

 private:
  std::vector<int> sizes_;
  std::vector<double> periods_;
  std::vector<std::size_t> strides_;
  std::size_t count_ = 1;
};

using GridPtr = std::shared_ptr<const PeriodicGrid>;

enum class Scheme { spectral, central4 };

std::string scheme_name(Scheme s);
Scheme parse_scheme(const std::string& s);

// (contravariant, covariant) rank of a tensor field.
struct Valence {
  int up = 0;
  int down = 0;
  bool operator==(const Valence&) const = default;
};

// Component-major storage: every component is a contiguous array over the nodes.
// `shape` lists the index ranges, e.g. {} for scalars, {D} for vectors, {D, D} for (1,1) tensors.
class Field {
 public:
  Field() = default;
  Field(GridPtr grid, std::vector<int> shape, Valence valence, std::string name = {});

  const GridPtr& grid() const { return grid_; }
  const std::vector<int>& shape() const { return shape_; }
  Valence valence() const { return valence_; }
  const std::string& name() const { return name_; }
  void set_name(std::string n) { name_ = std::move(n); }

  int components() const { return components_; }
  std::size_t nodes() const { return grid_->node_count(); }

  std::span<double> component(int c) { return {data_.data() + c * nodes(), nodes()}; }
  std::span<const double> component(int c) const { return {data_.data() + c * nodes(), nodes()}; }

  double& at(int c, std::size_t node) { return data_[c * nodes() + node]; }
  double at(int c, std::size_t node) const { return data_[c * nodes() + node]; }

  // Rank-1 and rank-2 accessors (row-major component order).
  Vec vec(std::size_t node) const;
  Mat mat(std::size_t node) const;
  void set_vec(std::size_t node, const Vec& v);
  void set_mat(std::size_t node, const Mat& m);

  const std::vector<double>& data() const { return data_; }

 private:
  GridPtr grid_;
  std::vector<int> shape_;
  Valence valence_;
  std::string name_;
  int components_ = 1;
  std::vector<double> data_;
};

Field scalar_field(GridPtr grid, std::string name = {});

// ∂_axis of every component.
Field derivative(const Field& f, int axis, Scheme scheme);

// ∂_axis1 ∂_axis2 of every component; the spectral route multiplies both wavenumbers at once.
Field second_derivative(const Field& f, int axis1, int axis2, Scheme scheme);

// Appends a trailing index for ∂_k: shape {...} -> {..., D}.
Field gradient(const Field& f, Scheme scheme);

// Appends two trailing indices for ∂_k ∂_l: shape {...} -> {..., D, D}.
Field hessian(const Field& f, Scheme scheme);

// Self-describing CSV: a comment header, then node coordinates and components per row.
void write_field_csv(const Field& f, const std::string& path);

}  // namespace rf
