#include "shrinker/functional.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "shrinker/errors.hpp"

namespace shrinker {

namespace {

constexpr double kPi = std::numbers::pi;

Vec or_zero(const Vec& v, int m) {
  if (v.size() == 0) return Vec::Zero(m);
  if (v.size() != m) throw Error(ErrorCode::GridMismatch, "vector length differs from the ambient dimension");
  return v;
}

void require_field(const Grid& grid, const NormalField& field) {
  if (field.values.cols() != grid.size() || field.values.rows() != grid.ambient() ||
      static_cast<int>(field.derivative.size()) != grid.dim()) {
    throw Error(ErrorCode::GridMismatch, "normal field is not sampled on this grid");
  }
}

void require_scale(double t) {
  if (!(t > 0.0)) throw Error(ErrorCode::NonpositiveScale, "scale t must be positive");
}

// Per-node Gaussian kernel (4 pi t)^{-n/2} exp(-|X - x|^2/(4t)) times the node measure.
Vec kernel_measure(const Grid& grid, const Vec& x, double t) {
  const double prefactor = std::pow(4.0 * kPi * t, -0.5 * grid.dim());
  Vec out(grid.size());
  for (int node = 0; node < grid.size(); ++node) {
    out(node) = grid.measure()(node) * prefactor * std::exp(-(grid.geometry(node).x - x).squaredNorm() / (4.0 * t));
  }
  return out;
}

// Logarithmic s-derivative of the F integrand (first-variation integrand) per node.
Vec log_rate(const Grid& grid, const Mat& v, const Vec& y, double tau, const Vec& x0, double t0) {
  const int n = grid.dim();
  Vec out(grid.size());
  for (int node = 0; node < grid.size(); ++node) {
    const auto& geo = grid.geometry(node);
    const Vec d = geo.x - x0;
    out(node) = -v.col(node).dot(geo.mean_curvature + d / (2.0 * t0)) +
                tau * (d.squaredNorm() / (4.0 * t0 * t0) - n / (2.0 * t0)) + d.dot(y) / (2.0 * t0);
  }
  return out;
}

}  // namespace

VariationData VariationData::normal(const NormalField& field) {
  VariationData var;
  var.V = field;
  return var;
}

FEvaluation evaluate_F(const Grid& grid, const Vec& center, double scale) {
  require_scale(scale);
  const Vec x = or_zero(center, grid.ambient());
  const double prefactor = std::pow(4.0 * kPi * scale, -0.5 * grid.dim());
  Vec kernel(grid.size());
  for (int node = 0; node < grid.size(); ++node) {
    kernel(node) = std::exp(-(grid.geometry(node).x - x).squaredNorm() / (4.0 * scale));
  }
  FEvaluation eval;
  eval.center = x;
  eval.scale = scale;
  eval.value = prefactor * grid.integrate(kernel);
  eval.quadrature_error = prefactor * grid.quadrature_error(kernel);
  // The tail bound is stated for the standard Gaussian; shifted/scaled kernels inherit it
  // only at (0, 1), so other arguments report the bound of the truncated box at (0, 1).
  eval.truncation_bound = grid.truncated() ? prefactor * grid.tail_bound(0) : 0.0;
  return eval;
}

double weighted_inner(const Grid& grid, const Mat& v, const Mat& w) {
  if (v.cols() != grid.size() || w.cols() != grid.size() || v.rows() != w.rows()) {
    throw Error(ErrorCode::GridMismatch, "fields sampled on different grids");
  }
  return grid.integrate_gaussian(column_dot(v, w));
}

double weighted_inner(const Grid& grid, const NormalField& v, const NormalField& w) {
  return weighted_inner(grid, v.values, w.values);
}

double first_variation(const Grid& grid, const VariationData& var, const Vec& x0, double t0) {
  require_scale(t0);
  require_field(grid, var.V);
  const int m = grid.ambient();
  const Vec x = or_zero(x0, m);
  return kernel_measure(grid, x, t0).dot(log_rate(grid, var.V.values, or_zero(var.y, m), var.tau, x, t0));
}

Mat apply_L_perp(const Grid& grid, const NormalField& field) {
  require_field(grid, field);
  return connection_laplacian(grid, field) + second_form_action(grid, field.values) + 0.5 * field.values -
         0.5 * derivative_along_position(grid, field);
}

Vec stability_density(const Grid& grid, const NormalField& field) {
  require_field(grid, field);
  return gradient_pairing(grid, field, field) - second_form_pairing(grid, field.values, field.values) -
         0.5 * column_dot(field.values, field.values);
}

double second_variation_at_critical(const Grid& grid, const VariationData& var, double residual_tol) {
  require_field(grid, var.V);
  const double residual = grid.max_residual();
  if (residual > residual_tol) {
    throw Error(ErrorCode::NotCritical, "self-shrinker residual " + std::to_string(residual) + " exceeds tolerance");
  }
  const Vec y = or_zero(var.y, grid.ambient());
  const double tau = var.tau;
  Vec density = stability_density(grid, var.V);
  for (int node = 0; node < grid.size(); ++node) {
    const auto& geo = grid.geometry(node);
    const Vec v = var.V.values.col(node);
    const Vec& h = geo.mean_curvature;
    density(node) += -2.0 * tau * h.dot(v) - tau * tau * h.squaredNorm() + v.dot(y) - 0.5 * geo.normal_part(y).squaredNorm();
  }
  return std::pow(4.0 * kPi, -0.5 * grid.dim()) * grid.integrate_gaussian(density);
}

double second_variation_general(const Grid& grid, const VariationData& var, const Vec& x0, double t0) {
  require_scale(t0);
  require_field(grid, var.V);
  const int n = grid.dim();
  const int m = grid.ambient();
  const Vec x = or_zero(x0, m);
  const Vec y = or_zero(var.y, m);
  const Vec y2 = or_zero(var.y_prime, m);
  const double tau = var.tau;
  const double tau2 = var.tau_prime;
  const Vec rate = log_rate(grid, var.V.values, y, tau, x, t0);
  // The area element contributes |grad^perp V|^2 - |<A, V>|^2 to the second log-derivative;
  // the acceleration term of a general family vanishes on straight lines.
  Vec curvature = gradient_pairing(grid, var.V, var.V) - second_form_pairing(grid, var.V.values, var.V.values);
  for (int node = 0; node < grid.size(); ++node) {
    const Vec d = grid.geometry(node).x - x;
    const Vec dv = var.V.values.col(node) - y;
    const double q = d.squaredNorm();
    const double t2 = t0 * t0;
    const double log_kernel = 0.5 * n * tau * tau / t2 - 0.5 * n * tau2 / t0 - dv.squaredNorm() / (2.0 * t0) +
                              d.dot(y2) / (2.0 * t0) + d.dot(dv) * tau / t2 + q * tau2 / (4.0 * t2) -
                              q * tau * tau / (2.0 * t2 * t0);
    curvature(node) += log_kernel + rate(node) * rate(node);
  }
  return kernel_measure(grid, x, t0).dot(curvature);
}

std::vector<IdentityCheck> integral_identities(const Grid& grid, const IdentityOptions& options) {
  const int n = grid.dim();
  const int m = grid.ambient();
  const Mat positions = grid.positions();
  const Vec radius2 = column_dot(positions, positions);
  const auto tail = [&grid](int degree) { return grid.truncated() ? grid.tail_bound(degree) : 0.0; };

  std::vector<IdentityCheck> checks;
  Vec first(m), third(m), curvature(m);
  for (int a = 0; a < m; ++a) {
    const Vec xa = positions.row(a).transpose();
    first(a) = grid.integrate_gaussian(xa);
    third(a) = grid.integrate_gaussian(xa.cwiseProduct(radius2));
  }
  const Mat h = grid.mean_curvature();
  for (int a = 0; a < m; ++a) curvature(a) = grid.integrate_gaussian(h.row(a).transpose());
  checks.push_back({"int X e", first.norm(), options.center_tolerance + tail(1)});
  checks.push_back({"int X |X|^2 e", third.norm(), options.tolerance + tail(3)});
  checks.push_back({"int (|X|^2 - 2n) e", std::abs(grid.integrate_gaussian(radius2.array() - 2.0 * n)),
                    options.center_tolerance + tail(2) + 2.0 * n * tail(0)});
  checks.push_back({"int H e", curvature.norm(), options.center_tolerance + tail(1)});

  std::mt19937_64 rng(options.seed);
  std::normal_distribution<double> normal;
  for (int k = 0; k < options.random_vectors; ++k) {
    Vec w(m);
    for (int a = 0; a < m; ++a) w(a) = normal(rng);
    Vec lhs(grid.size()), rhs(grid.size());
    for (int node = 0; node < grid.size(); ++node) {
      const auto& geo = grid.geometry(node);
      lhs(node) = std::pow(geo.x.dot(w), 2);
      rhs(node) = 2.0 * geo.tangent_part(w).squaredNorm();
    }
    const double scale = w.squaredNorm();
    checks.push_back({"int <X,W>^2 e = 2 int |W^T|^2 e (W #" + std::to_string(k) + ")",
                      std::abs(grid.integrate_gaussian(lhs - rhs)), options.tolerance * scale + scale * (tail(2) + 2.0 * tail(0))});
  }
  return checks;
}

}  // namespace shrinker
