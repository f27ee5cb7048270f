#include "shrinker/grid.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <utility>

#include "shrinker/errors.hpp"

namespace shrinker {

namespace {

constexpr double kPi = std::numbers::pi;

// One-sided and central first-derivative stencils, numerators over h (order 2) or 12h (order 4).
struct Stencil {
  std::array<int, Grid::kStencil> offsets{};
  std::array<double, Grid::kStencil> coeffs{};
  int count = 0;
};

Stencil central_stencil(int order, double h) {
  Stencil s;
  if (order == 2) {
    s.offsets = {-1, 1, 0, 0, 0};
    s.coeffs = {-0.5 / h, 0.5 / h, 0, 0, 0};
    s.count = 2;
  } else {
    s.offsets = {-2, -1, 1, 2, 0};
    const double d = 12.0 * h;
    s.coeffs = {1.0 / d, -8.0 / d, 8.0 / d, -1.0 / d, 0};
    s.count = 4;
  }
  return s;
}

// Stencil at distance `from_end` (0 or 1) from the left end; mirrored for the right end.
Stencil boundary_stencil(int order, double h, int from_end, bool right) {
  Stencil s;
  if (order == 2) {
    s.offsets = {0, 1, 2, 0, 0};
    s.coeffs = {-1.5 / h, 2.0 / h, -0.5 / h, 0, 0};
    s.count = 3;
  } else {
    const double d = 12.0 * h;
    if (from_end == 0) {
      s.offsets = {0, 1, 2, 3, 4};
      s.coeffs = {-25.0 / d, 48.0 / d, -36.0 / d, 16.0 / d, -3.0 / d};
    } else {
      s.offsets = {-1, 0, 1, 2, 3};
      s.coeffs = {-3.0 / d, -10.0 / d, 18.0 / d, -6.0 / d, 1.0 / d};
    }
    s.count = 5;
  }
  if (right) {
    for (int k = 0; k < s.count; ++k) {
      s.offsets[static_cast<size_t>(k)] = -s.offsets[static_cast<size_t>(k)];
      s.coeffs[static_cast<size_t>(k)] = -s.coeffs[static_cast<size_t>(k)];
    }
  }
  return s;
}

// Integral over R of (1 + |x|)^d exp(-x^2/4).
double full_line_moment(int degree) {
  double total = 0.0;
  double binom = 1.0;
  for (int k = 0; k <= degree; ++k) {
    total += binom * std::pow(2.0, k) * std::tgamma((k + 1) / 2.0);
    binom = binom * (degree - k) / (k + 1);
  }
  return 2.0 * total;
}

// Bound on the integral over |x| > R of (1 + |x|)^d exp(-x^2/4), using the tangent-line
// bound log(1 + x) <= log(1 + R) + (x - R)/(1 + R).
double line_tail(int degree, double radius) {
  const double a = degree / (1.0 + radius);
  return 2.0 * std::pow(1.0 + radius, degree) * std::exp(a * a - a * radius) * std::sqrt(kPi) *
         std::erfc((radius - 2.0 * a) / 2.0);
}

}  // namespace

std::vector<double> fejer_weights(int count) {
  std::vector<double> w(static_cast<size_t>(count));
  for (int k = 0; k < count; ++k) {
    const double theta = (k + 0.5) * kPi / count;
    double sum = 0.0;
    for (int j = 1; j <= count / 2; ++j) sum += std::cos(2.0 * j * theta) / (4.0 * j * j - 1.0);
    w[static_cast<size_t>(k)] = 2.0 / count * (1.0 - 2.0 * sum);
  }
  return w;
}

Grid::Grid(Chart chart, std::vector<int> shape, GridOptions options)
    : chart_(std::move(chart)), shape_(std::move(shape)), options_(options) {
  if (static_cast<int>(shape_.size()) != chart_.dim()) {
    throw Error(ErrorCode::GridMismatch, "grid shape does not match chart dimension");
  }
  if (options_.fd_order != 2 && options_.fd_order != 4) {
    throw Error(ErrorCode::InvalidSpec, "difference order must be 2 or 4");
  }
  for (int n : shape_) {
    if (n < 4) throw Error(ErrorCode::GridTooCoarse, "fewer than 4 nodes along an axis");
  }
  strides_.assign(shape_.size(), 1);
  for (int k = static_cast<int>(shape_.size()) - 2; k >= 0; --k) {
    strides_[static_cast<size_t>(k)] = strides_[static_cast<size_t>(k) + 1] * shape_[static_cast<size_t>(k) + 1];
  }
  size_ = strides_[0] * shape_[0];
  build_axes();
  build_stencils();
  build_geometry();
}

std::vector<int> Grid::multi_index(int node) const {
  std::vector<int> index(shape_.size());
  for (size_t k = 0; k < shape_.size(); ++k) {
    index[k] = node / strides_[k];
    node %= strides_[k];
  }
  return index;
}

int Grid::flat_index(const std::vector<int>& index) const {
  int flat = 0;
  for (size_t k = 0; k < shape_.size(); ++k) flat += index[k] * strides_[k];
  return flat;
}

Vec Grid::coordinates(int node) const {
  const auto index = multi_index(node);
  Vec u(dim());
  for (int k = 0; k < dim(); ++k) u(k) = axis_coordinate(k, index[static_cast<size_t>(k)]);
  return u;
}

void Grid::build_axes() {
  const auto& axes = chart_.axes();
  for (size_t k = 0; k < axes.size(); ++k) {
    const Axis& axis = axes[k];
    const int n = shape_[k];
    std::vector<double> x(static_cast<size_t>(n)), w(static_cast<size_t>(n)), wc(static_cast<size_t>(n), 0.0);
    double h = 0.0;
    switch (axis.kind) {
      case AxisKind::periodic: {
        h = axis.extent() / n;
        for (int i = 0; i < n; ++i) {
          x[static_cast<size_t>(i)] = axis.lo + i * h;
          w[static_cast<size_t>(i)] = h;
        }
        if (n % 2 == 0) {
          for (int i = 0; i < n; i += 2) wc[static_cast<size_t>(i)] = 2.0 * h;
        } else {
          nested_ = false;
        }
        break;
      }
      case AxisKind::polar: {
        h = kPi / n;
        const bool odd = axis.sin_power % 2 == 1;
        const auto fejer = fejer_weights(n);
        for (int i = 0; i < n; ++i) {
          x[static_cast<size_t>(i)] = (i + 0.5) * h;
          w[static_cast<size_t>(i)] = odd ? fejer[static_cast<size_t>(i)] / std::sin(x[static_cast<size_t>(i)]) : h;
        }
        if (n % 3 == 0) {
          const auto coarse = fejer_weights(n / 3);
          for (int j = 0; j < n / 3; ++j) {
            const int i = 3 * j + 1;
            wc[static_cast<size_t>(i)] = odd ? coarse[static_cast<size_t>(j)] / std::sin(x[static_cast<size_t>(i)]) : 3.0 * h;
          }
        } else {
          nested_ = false;
        }
        bool has_longitude = false;
        for (size_t q = k + 1; q < axes.size(); ++q) {
          if (axes[q].group == axis.group && axes[q].kind == AxisKind::periodic) {
            has_longitude = true;
            if (shape_[q] % 2 != 0) throw Error(ErrorCode::InvalidSpec, "longitude axis needs an even node count");
          }
        }
        if (!has_longitude) throw Error(ErrorCode::InvalidSpec, "polar axis without a longitude axis in its group");
        break;
      }
      case AxisKind::bounded: {
        h = axis.extent() / (n - 1);
        for (int i = 0; i < n; ++i) {
          x[static_cast<size_t>(i)] = axis.lo + i * h;
          w[static_cast<size_t>(i)] = (i == 0 || i == n - 1) ? 0.5 * h : h;
        }
        if (n % 2 == 1) {
          for (int i = 0; i < n; i += 2) wc[static_cast<size_t>(i)] = (i == 0 || i == n - 1) ? h : 2.0 * h;
        } else {
          nested_ = false;
        }
        if (options_.fd_order == 4 && n < 5) throw Error(ErrorCode::GridTooCoarse, "bounded axis needs 5 nodes");
        break;
      }
    }
    coords_.push_back(std::move(x));
    weights_.push_back(std::move(w));
    coarse_weights_.push_back(std::move(wc));
    spacing_.push_back(h);
  }
}

bool Grid::neighbour(std::vector<int> index, int axis, int d, int& out) const {
  const auto& axes = chart_.axes();
  const Axis& ax = axes[static_cast<size_t>(axis)];
  const int n = shape_[static_cast<size_t>(axis)];
  int j = index[static_cast<size_t>(axis)] + d;
  switch (ax.kind) {
    case AxisKind::periodic:
      j = ((j % n) + n) % n;
      break;
    case AxisKind::bounded:
      if (j < 0 || j >= n) return false;
      break;
    case AxisKind::polar: {
      bool crossed = false;
      if (j < 0) {
        j = -1 - j;
        crossed = true;
      } else if (j >= n) {
        j = 2 * n - 1 - j;
        crossed = true;
      }
      if (crossed) {
        // Crossing a pole negates the remaining sub-sphere point: reflect later colatitudes,
        // rotate the longitude by half a turn.
        for (size_t q = static_cast<size_t>(axis) + 1; q < axes.size(); ++q) {
          if (axes[q].group != ax.group) continue;
          if (axes[q].kind == AxisKind::polar) index[q] = shape_[q] - 1 - index[q];
          if (axes[q].kind == AxisKind::periodic) index[q] = (index[q] + shape_[q] / 2) % shape_[q];
        }
      }
      break;
    }
  }
  index[static_cast<size_t>(axis)] = j;
  out = flat_index(index);
  return true;
}

void Grid::build_stencils() {
  const auto& axes = chart_.axes();
  const int order = options_.fd_order;
  stencil_index_.assign(axes.size(), std::vector<int>(static_cast<size_t>(size_) * kStencil, 0));
  stencil_coeff_.assign(axes.size(), std::vector<double>(static_cast<size_t>(size_) * kStencil, 0.0));
  for (size_t k = 0; k < axes.size(); ++k) {
    const int n = shape_[k];
    const double h = spacing_[k];
    for (int node = 0; node < size_; ++node) {
      const auto index = multi_index(node);
      const int i = index[k];
      Stencil s = central_stencil(order, h);
      if (axes[k].kind == AxisKind::bounded) {
        const int reach = order / 2;
        if (i < reach) s = boundary_stencil(order, h, i, false);
        if (i >= n - reach) s = boundary_stencil(order, h, n - 1 - i, true);
      }
      for (int c = 0; c < kStencil; ++c) {
        const size_t slot = static_cast<size_t>(node) * kStencil + static_cast<size_t>(c);
        stencil_index_[k][slot] = node;
        if (c >= s.count) continue;
        int target = node;
        if (!neighbour(index, static_cast<int>(k), s.offsets[static_cast<size_t>(c)], target)) {
          throw Error(ErrorCode::GridTooCoarse, "stencil leaves the grid");
        }
        stencil_index_[k][slot] = target;
        stencil_coeff_[k][slot] = s.coeffs[static_cast<size_t>(c)];
      }
    }
  }
}

void Grid::build_geometry() {
  const auto& axes = chart_.axes();
  for (size_t k = 0; k < axes.size(); ++k) {
    if (axes[k].kind != AxisKind::periodic) continue;
    Vec u = coordinates(0);
    const Vec x0 = chart_.position(u);
    u(static_cast<Eigen::Index>(k)) += axes[k].extent();
    const Vec x1 = chart_.position(u);
    if ((x1 - x0).lpNorm<Eigen::Infinity>() > 1e-12 * (1.0 + x0.lpNorm<Eigen::Infinity>())) {
      throw Error(ErrorCode::InvalidSpec, "periodic axis does not wrap");
    }
  }
  geometry_.reserve(static_cast<size_t>(size_));
  measure_.resize(size_);
  gaussian_.resize(size_);
  coarse_.resize(size_);
  for (int node = 0; node < size_; ++node) {
    const auto index = multi_index(node);
    Vec u(dim());
    double w = 1.0, wc = 1.0;
    for (size_t k = 0; k < axes.size(); ++k) {
      u(static_cast<Eigen::Index>(k)) = coords_[k][static_cast<size_t>(index[k])];
      w *= weights_[k][static_cast<size_t>(index[k])];
      wc *= coarse_weights_[k][static_cast<size_t>(index[k])];
    }
    geometry_.push_back(point_geometry(chart_.jet(u), options_.rank_tol));
    const auto& geo = geometry_.back();
    measure_(node) = w * geo.area_element;
    coarse_(node) = wc * geo.area_element;
    gaussian_(node) = measure_(node) * std::exp(-geo.x.squaredNorm() / 4.0);
  }
}

double Grid::quadrature_error(const Vec& f) const {
  if (!nested_) return std::numeric_limits<double>::quiet_NaN();
  return std::abs(measure_.dot(f) - coarse_.dot(f));
}

Mat Grid::derivative(const Mat& values, int axis) const {
  if (values.cols() != size_) throw Error(ErrorCode::GridMismatch, "field size differs from grid size");
  const auto& idx = stencil_index_[static_cast<size_t>(axis)];
  const auto& coeff = stencil_coeff_[static_cast<size_t>(axis)];
  Mat out = Mat::Zero(values.rows(), values.cols());
  for (int node = 0; node < size_; ++node) {
    const size_t base = static_cast<size_t>(node) * kStencil;
    for (size_t c = 0; c < kStencil; ++c) {
      if (coeff[base + c] != 0.0) out.col(node) += coeff[base + c] * values.col(idx[base + c]);
    }
  }
  return out;
}

Vec Grid::derivative(const Vec& values, int axis) const {
  const Mat row = values.transpose();
  return derivative(row, axis).transpose();
}

double Grid::tail_bound(int degree) const {
  if (tail_.truncated_axes == 0) return 0.0;
  const int nb = tail_.truncated_axes;
  return tail_.compact_mass * std::pow(1.0 + tail_.compact_radius, degree) * nb * line_tail(degree, tail_.radius) *
         std::pow(full_line_moment(degree), nb - 1);
}

Mat Grid::positions() const {
  Mat out(ambient(), size_);
  for (int node = 0; node < size_; ++node) out.col(node) = geometry_[static_cast<size_t>(node)].x;
  return out;
}

Mat Grid::mean_curvature() const {
  Mat out(ambient(), size_);
  for (int node = 0; node < size_; ++node) out.col(node) = geometry_[static_cast<size_t>(node)].mean_curvature;
  return out;
}

double Grid::max_residual() const {
  double worst = 0.0;
  for (const auto& geo : geometry_) worst = std::max(worst, shrinker_residual(geo).norm());
  return worst;
}

}  // namespace shrinker
