#include "shrinker/fields.hpp"

#include <algorithm>

#include "shrinker/errors.hpp"

namespace shrinker {

namespace {

void require_size(const Grid& grid, const Mat& values) {
  if (values.cols() != grid.size() || values.rows() != grid.ambient()) {
    throw Error(ErrorCode::GridMismatch, "field layout differs from grid");
  }
}

// U g^{-1}: column i is the ambient vector g^ij u_j.
Mat dual_frame(const PointGeometry<double>& geo) { return geo.tangent * geo.inv_metric; }

// Matrix S_ij = <A_ij, v>.
Mat form_coefficients(const PointGeometry<double>& geo, const Vec& v) {
  const int n = geo.dim();
  Mat s(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) s(i, j) = geo.A(i, j).dot(v);
  return s;
}

}  // namespace

Vec column_dot(const Mat& a, const Mat& b) { return a.cwiseProduct(b).colwise().sum().transpose(); }

Mat normal_projection(const Grid& grid, const Mat& values) {
  require_size(grid, values);
  Mat out(values.rows(), values.cols());
  for (int node = 0; node < grid.size(); ++node) out.col(node) = grid.geometry(node).normal_part(values.col(node));
  return out;
}

double max_tangential_defect(const Grid& grid, const Mat& values, double floor) {
  require_size(grid, values);
  double worst = 0.0;
  for (int node = 0; node < grid.size(); ++node) {
    const Vec v = values.col(node);
    const double t = grid.geometry(node).tangent_part(v).norm();
    worst = std::max(worst, t / (v.norm() + floor));
  }
  return worst;
}

NormalField normal_covariant_derivative(const Grid& grid, const Mat& values) {
  require_size(grid, values);
  NormalField field;
  field.values = values;
  for (int axis = 0; axis < grid.dim(); ++axis) {
    field.derivative.push_back(normal_projection(grid, grid.derivative(values, axis)));
  }
  return field;
}

NormalField make_normal_field(const Grid& grid, const Mat& ambient_values) {
  return normal_covariant_derivative(grid, normal_projection(grid, ambient_values));
}

NormalField mean_curvature_field(const Grid& grid) { return normal_covariant_derivative(grid, grid.mean_curvature()); }

NormalField translation_field(const Grid& grid, const Vec& direction) {
  const Mat ambient = direction.replicate(1, grid.size());
  return make_normal_field(grid, ambient);
}

NormalField zero_field(const Grid& grid) {
  NormalField field;
  field.values = Mat::Zero(grid.ambient(), grid.size());
  field.derivative.assign(static_cast<size_t>(grid.dim()), field.values);
  return field;
}

NormalField scaled(const NormalField& field, double factor) { return combine(field, factor, field, 0.0); }

NormalField combine(const NormalField& a, double ca, const NormalField& b, double cb) {
  if (a.values.cols() != b.values.cols() || a.derivative.size() != b.derivative.size()) {
    throw Error(ErrorCode::GridMismatch, "fields sampled on different grids");
  }
  NormalField out;
  out.values = ca * a.values + cb * b.values;
  for (size_t i = 0; i < a.derivative.size(); ++i) out.derivative.push_back(ca * a.derivative[i] + cb * b.derivative[i]);
  return out;
}

std::vector<Mat> translation_derivative_exact(const Grid& grid, const Vec& direction) {
  const int n = grid.dim();
  std::vector<Mat> out(static_cast<size_t>(n), Mat::Zero(grid.ambient(), grid.size()));
  for (int node = 0; node < grid.size(); ++node) {
    const auto& geo = grid.geometry(node);
    const Vec c = geo.tangent_coordinates(direction);
    for (int i = 0; i < n; ++i) {
      Vec d = Vec::Zero(grid.ambient());
      for (int k = 0; k < n; ++k) d -= c(k) * geo.A(i, k);
      out[static_cast<size_t>(i)].col(node) = d;
    }
  }
  return out;
}

Mat connection_laplacian(const Grid& grid, const NormalField& field) {
  require_size(grid, field.values);
  const int n = grid.dim();
  const int m = grid.ambient();
  // T = sum_j (grad_j V) (g^jk u_k)^T, stored column-major as m*m rows per node.
  Mat tensor(m * m, grid.size());
  for (int node = 0; node < grid.size(); ++node) {
    const auto& geo = grid.geometry(node);
    Mat w(m, n);
    for (int j = 0; j < n; ++j) w.col(j) = field.derivative[static_cast<size_t>(j)].col(node);
    const Mat t = w * dual_frame(geo).transpose();
    tensor.col(node) = Eigen::Map<const Vec>(t.data(), m * m);
  }
  Mat out = Mat::Zero(m, grid.size());
  for (int i = 0; i < n; ++i) {
    const Mat dt = grid.derivative(tensor, i);
    for (int node = 0; node < grid.size(); ++node) {
      const Eigen::Map<const Mat> d(dt.col(node).data(), m, m);
      out.col(node) += d * dual_frame(grid.geometry(node)).col(i);
    }
  }
  return normal_projection(grid, out);
}

Mat second_form_action(const Grid& grid, const Mat& values) {
  require_size(grid, values);
  const int n = grid.dim();
  Mat out = Mat::Zero(grid.ambient(), grid.size());
  for (int node = 0; node < grid.size(); ++node) {
    const auto& geo = grid.geometry(node);
    const Mat s = geo.inv_metric * form_coefficients(geo, values.col(node)) * geo.inv_metric;
    for (int k = 0; k < n; ++k)
      for (int l = 0; l < n; ++l) out.col(node) += s(k, l) * geo.A(k, l);
  }
  return out;
}

Mat derivative_along_position(const Grid& grid, const NormalField& field) {
  const int n = grid.dim();
  Mat out = Mat::Zero(grid.ambient(), grid.size());
  for (int node = 0; node < grid.size(); ++node) {
    const auto& geo = grid.geometry(node);
    const Vec c = geo.tangent_coordinates(geo.x);
    for (int i = 0; i < n; ++i) out.col(node) += c(i) * field.derivative[static_cast<size_t>(i)].col(node);
  }
  return out;
}

Vec gradient_pairing(const Grid& grid, const NormalField& v, const NormalField& w) {
  const int n = grid.dim();
  Vec out = Vec::Zero(grid.size());
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const Vec dots = column_dot(v.derivative[static_cast<size_t>(i)], w.derivative[static_cast<size_t>(j)]);
      for (int node = 0; node < grid.size(); ++node) out(node) += grid.geometry(node).inv_metric(i, j) * dots(node);
    }
  }
  return out;
}

Vec second_form_pairing(const Grid& grid, const Mat& v, const Mat& w) {
  require_size(grid, v);
  require_size(grid, w);
  Vec out(grid.size());
  for (int node = 0; node < grid.size(); ++node) {
    const auto& geo = grid.geometry(node);
    const Mat sv = geo.inv_metric * form_coefficients(geo, v.col(node));
    const Mat sw = geo.inv_metric * form_coefficients(geo, w.col(node));
    out(node) = (sv * sw).trace();
  }
  return out;
}

namespace {

// Ambient gradient G = g^ij (d_j f) u_i per node.
Mat ambient_gradient(const Grid& grid, const Vec& f) {
  const int n = grid.dim();
  Mat partials(n, grid.size());
  for (int i = 0; i < n; ++i) partials.row(i) = grid.derivative(f, i).transpose();
  Mat out(grid.ambient(), grid.size());
  for (int node = 0; node < grid.size(); ++node) out.col(node) = dual_frame(grid.geometry(node)) * partials.col(node);
  return out;
}

Vec divergence_of_gradient(const Grid& grid, const Mat& gradient) {
  Vec out = Vec::Zero(grid.size());
  for (int i = 0; i < grid.dim(); ++i) {
    const Mat d = grid.derivative(gradient, i);
    for (int node = 0; node < grid.size(); ++node) out(node) += d.col(node).dot(dual_frame(grid.geometry(node)).col(i));
  }
  return out;
}

}  // namespace

Vec scalar_laplacian(const Grid& grid, const Vec& f) {
  if (f.size() != grid.size()) throw Error(ErrorCode::GridMismatch, "scalar size differs from grid size");
  return divergence_of_gradient(grid, ambient_gradient(grid, f));
}

Vec scalar_script_L(const Grid& grid, const Vec& f) {
  if (f.size() != grid.size()) throw Error(ErrorCode::GridMismatch, "scalar size differs from grid size");
  const Mat gradient = ambient_gradient(grid, f);
  Vec out = divergence_of_gradient(grid, gradient);
  for (int node = 0; node < grid.size(); ++node) out(node) -= 0.5 * grid.geometry(node).x.dot(gradient.col(node));
  return out;
}

}  // namespace shrinker
