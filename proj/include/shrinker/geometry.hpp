#pragma once
#include <cmath>
#include <vector>

#include "shrinker/chart.hpp"
#include "shrinker/errors.hpp"

namespace shrinker {

// Extrinsic geometry of an immersion at a single point.
template <typename T>
struct PointGeometry {
  VecX<T> x;
  MatX<T> tangent;      // m x n, columns u_i = d_i X
  MatX<T> metric;       // g_ij
  MatX<T> inv_metric;   // g^ij
  MatX<T> normal_basis; // m x (m - n), orthonormal
  std::vector<VecX<T>> second_form;  // A_ij, row-major n x n
  VecX<T> mean_curvature;            // H = g^ij A_ij
  T area_element = T(0);             // sqrt(det g)

  int dim() const { return static_cast<int>(tangent.cols()); }
  int ambient() const { return static_cast<int>(x.size()); }
  const VecX<T>& A(int i, int j) const { return second_form[static_cast<size_t>(i * dim() + j)]; }

  VecX<T> normal_part(const VecX<T>& v) const { return normal_basis * (normal_basis.transpose() * v); }
  VecX<T> tangent_part(const VecX<T>& v) const { return v - normal_part(v); }
  MatX<T> normal_projector() const { return normal_basis * normal_basis.transpose(); }

  // Coordinates c^i of the tangential part of v, v^T = c^i u_i.
  VecX<T> tangent_coordinates(const VecX<T>& v) const { return inv_metric * (tangent.transpose() * v); }
};

template <typename T>
PointGeometry<T> point_geometry(const Jet<T>& jet, double rank_tol = 1e-8) {
  const int n = jet.dim();
  const int m = jet.ambient();
  PointGeometry<T> geo;
  geo.x = jet.x;
  geo.tangent = jet.d1;

  Eigen::JacobiSVD<MatX<T>> svd(jet.d1);
  const auto& sv = svd.singularValues();
  if (n > 0 && (!(sv(0) > T(0)) || sv(n - 1) < T(rank_tol) * sv(0))) {
    throw Error(ErrorCode::DegenerateMetric, "Jacobian rank below dimension");
  }

  geo.metric = jet.d1.transpose() * jet.d1;
  geo.metric = (geo.metric + geo.metric.transpose()) / T(2);
  Eigen::LLT<MatX<T>> llt(geo.metric);
  geo.inv_metric = llt.solve(MatX<T>::Identity(n, n));
  geo.inv_metric = (geo.inv_metric + geo.inv_metric.transpose()) / T(2);
  const MatX<T> L = llt.matrixL();
  geo.area_element = L.diagonal().prod();

  Eigen::HouseholderQR<MatX<T>> qr(jet.d1);
  const MatX<T> q = qr.householderQ() * MatX<T>::Identity(m, m);
  geo.normal_basis = q.rightCols(m - n);

  geo.second_form.resize(static_cast<size_t>(n * n));
  geo.mean_curvature = VecX<T>::Zero(m);
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      const VecX<T> sym = (jet.second(i, j) + jet.second(j, i)) / T(2);
      const VecX<T> a = geo.normal_part(sym);
      geo.second_form[static_cast<size_t>(i * n + j)] = a;
      geo.second_form[static_cast<size_t>(j * n + i)] = a;
    }
  }
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) geo.mean_curvature += geo.inv_metric(i, j) * geo.A(i, j);
  return geo;
}

inline PointGeometry<double> point_geometry(const Chart& chart, const Vec& u, double rank_tol = 1e-8) {
  return point_geometry(chart.jet(u), rank_tol);
}

// H + X^perp / 2; vanishes exactly where the self-shrinker equation holds.
template <typename T>
VecX<T> shrinker_residual(const PointGeometry<T>& geo) {
  return geo.mean_curvature + geo.normal_part(geo.x) / T(2);
}

inline Vec shrinker_residual(const Chart& chart, const Vec& u) {
  return shrinker_residual(point_geometry(chart, u));
}

}  // namespace shrinker
