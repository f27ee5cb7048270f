#pragma once
#include <array>
#include <vector>

#include "shrinker/chart.hpp"
#include "shrinker/geometry.hpp"

namespace shrinker {

// Gaussian-measure bookkeeping for charts with truncated unbounded axes.
struct TailModel {
  int truncated_axes = 0;
  double radius = 0.0;
  double compact_mass = 0.0;    // weighted measure of the compact factor (1 if none)
  double compact_radius = 0.0;  // max |X| over the compact factor
};

struct GridOptions {
  int fd_order = 4;  // 2 or 4
  double rank_tol = 1e-8;
};

// Structured tensor-product grid over a chart, with per-node geometry, quadrature weights
// and finite-difference stencils. Node index is row-major in the axis order (last axis fastest).
class Grid {
 public:
  static constexpr int kStencil = 5;

  Grid(Chart chart, std::vector<int> shape, GridOptions options = {});

  const Chart& chart() const { return chart_; }
  int dim() const { return chart_.dim(); }
  int ambient() const { return chart_.ambient(); }
  int size() const { return size_; }
  const std::vector<int>& shape() const { return shape_; }
  int fd_order() const { return options_.fd_order; }
  const GridOptions& options() const { return options_; }

  std::vector<int> multi_index(int node) const;
  int flat_index(const std::vector<int>& index) const;
  double axis_coordinate(int axis, int i) const { return coords_[static_cast<size_t>(axis)][static_cast<size_t>(i)]; }
  double spacing(int axis) const { return spacing_[static_cast<size_t>(axis)]; }
  Vec coordinates(int node) const;

  const PointGeometry<double>& geometry(int node) const { return geometry_[static_cast<size_t>(node)]; }

  // dmu weight of each node (parameter weight times area element).
  const Vec& measure() const { return measure_; }
  // dmu weight times exp(-|X|^2/4).
  const Vec& gaussian_measure() const { return gaussian_; }
  // Nested coarse rule on a subset of the nodes; zero weight elsewhere.
  const Vec& coarse_measure() const { return coarse_; }
  bool has_error_estimate() const { return nested_; }

  double integrate(const Vec& f) const { return measure_.dot(f); }
  double integrate_gaussian(const Vec& f) const { return gaussian_.dot(f); }
  // |fine - coarse| for the measure-weighted integral of f.
  double quadrature_error(const Vec& f) const;

  double area() const { return measure_.sum(); }
  double weighted_area() const { return gaussian_.sum(); }

  // d/du_axis of node-sampled data; columns are nodes.
  Mat derivative(const Mat& values, int axis) const;
  Vec derivative(const Vec& values, int axis) const;

  const TailModel& tail() const { return tail_; }
  void set_tail(const TailModel& tail) { tail_ = tail; }
  bool truncated() const { return tail_.truncated_axes > 0; }
  // Bound on the integral of (1 + |X|)^degree exp(-|X|^2/4) over the discarded region.
  double tail_bound(int degree = 0) const;

  Mat positions() const;
  Mat mean_curvature() const;
  double max_residual() const;

 private:
  void build_axes();
  void build_stencils();
  void build_geometry();
  // Neighbour of `index` at offset d along `axis`, following pole reflections.
  // Returns false when the neighbour leaves a bounded axis.
  bool neighbour(std::vector<int> index, int axis, int d, int& out) const;

  Chart chart_;
  std::vector<int> shape_;
  GridOptions options_;
  int size_ = 0;
  std::vector<int> strides_;
  std::vector<std::vector<double>> coords_;
  std::vector<std::vector<double>> weights_;
  std::vector<std::vector<double>> coarse_weights_;
  std::vector<double> spacing_;
  bool nested_ = true;
  // stencil_index_[axis][node * kStencil + k], stencil_coeff_ likewise (already divided by h).
  std::vector<std::vector<int>> stencil_index_;
  std::vector<std::vector<double>> stencil_coeff_;
  std::vector<PointGeometry<double>> geometry_;
  Vec measure_, gaussian_, coarse_;
  TailModel tail_;
};

// Fejer first-rule weights on nodes (k + 1/2) pi / N for integrals of g(theta) sin(theta).
std::vector<double> fejer_weights(int count);

}  // namespace shrinker
