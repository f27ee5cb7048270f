#pragma once
// Independent reference computations for the test suites. Nothing here calls the library's
// curvature, variation or stability code: oracles work from chart jets, grid weights and
// closed forms only.
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numbers>
#include <random>
#include <vector>

#include "shrinker/catalog.hpp"
#include "shrinker/fields.hpp"
#include "shrinker/functional.hpp"
#include "shrinker/grid.hpp"

namespace oracle {

using shrinker::Grid;
using shrinker::Mat;
using shrinker::Vec;

inline constexpr double kPi = std::numbers::pi;
inline const double kE = std::exp(1.0);

// Closed forms on the standard shrinkers.
inline double circle_F() { return std::sqrt(2.0 * kPi / kE); }
inline double sphere2_F() { return 4.0 / kE; }
inline double circle_H_norm2() { return kPi * std::sqrt(2.0) / std::sqrt(kE); }
inline double circle_weighted_length() { return 2.0 * kPi * std::sqrt(2.0) / std::sqrt(kE); }
inline double product_certificate_Q() { return -8.0 * kPi * kPi / kE; }

// Observed convergence order between two errors at spacings h and h / ratio.
inline double observed_order(double coarse, double fine, double ratio = 2.0) { return std::log(coarse / fine) / std::log(ratio); }

inline Vec random_vector(std::mt19937_64& rng, int m) {
  std::normal_distribution<double> normal;
  Vec v(m);
  for (int a = 0; a < m; ++a) v(a) = normal(rng);
  return v;
}

// Ambient polynomial field Y(X) = c + B X + (X^T C_a X) e_a / 4 with its Jacobian.
struct AmbientField {
  Vec c;
  Mat b;
  std::vector<Mat> quad;

  static AmbientField random(std::mt19937_64& rng, int m, bool quadratic = true) {
    AmbientField f;
    f.c = random_vector(rng, m);
    f.b = Mat(m, m);
    for (int a = 0; a < m; ++a) f.b.col(a) = random_vector(rng, m) / std::sqrt(static_cast<double>(m));
    f.quad.assign(static_cast<size_t>(m), Mat::Zero(m, m));
    if (quadratic) {
      for (int a = 0; a < m; ++a) {
        Mat q(m, m);
        for (int k = 0; k < m; ++k) q.col(k) = random_vector(rng, m) / m;
        f.quad[static_cast<size_t>(a)] = 0.5 * (q + q.transpose());
      }
    }
    return f;
  }
  Vec value(const Vec& x) const {
    Vec out = c + b * x;
    for (size_t a = 0; a < quad.size(); ++a) out(static_cast<Eigen::Index>(a)) += 0.25 * x.dot(quad[a] * x);
    return out;
  }
  Mat jacobian(const Vec& x) const {
    Mat out = b;
    for (size_t a = 0; a < quad.size(); ++a) out.row(static_cast<Eigen::Index>(a)) += 0.5 * (quad[a] * x).transpose();
    return out;
  }
  Mat sample(const Grid& grid) const {
    Mat out(grid.ambient(), grid.size());
    for (int node = 0; node < grid.size(); ++node) out.col(node) = value(grid.geometry(node).x);
    return out;
  }
};

// Normal field V = P^perp Y(X) and its full ambient partial derivatives, from the chart 2-jet.
struct JetNormalField {
  Mat values;                  // m x N
  std::vector<Mat> partials;   // n entries of m x N: d_i V (not projected)
};

inline JetNormalField project_with_jets(const Grid& grid, const AmbientField& field) {
  const int n = grid.dim();
  const int m = grid.ambient();
  JetNormalField out;
  out.values = Mat(m, grid.size());
  out.partials.assign(static_cast<size_t>(n), Mat(m, grid.size()));
  for (int node = 0; node < grid.size(); ++node) {
    const auto jet = grid.chart().jet(grid.coordinates(node));
    const Mat& u = jet.d1;
    const Mat ginv = (u.transpose() * u).inverse();
    const Mat tangent = u * ginv * u.transpose();
    const Mat normal = Mat::Identity(m, m) - tangent;
    const Vec y = field.value(jet.x);
    const Mat dy = field.jacobian(jet.x);
    out.values.col(node) = normal * y;
    for (int i = 0; i < n; ++i) {
      Mat ui(m, n);
      for (int j = 0; j < n; ++j) ui.col(j) = jet.second(i, j);
      const Mat dg = ui.transpose() * u + u.transpose() * ui;
      const Mat dtangent = ui * ginv * u.transpose() + u * ginv * ui.transpose() - u * ginv * dg * ginv * u.transpose();
      out.partials[static_cast<size_t>(i)].col(node) = -dtangent * y + normal * (dy * u.col(i));
    }
  }
  return out;
}

// F of the deformed immersion X + sV at center x and scale t, reusing the grid's parameter
// weights and recomputing the area element from the deformed tangent vectors.
inline double deformed_F(const Grid& grid, const JetNormalField& v, double s, const Vec& x, double t) {
  const int n = grid.dim();
  double total = 0.0;
  for (int node = 0; node < grid.size(); ++node) {
    const auto& geo = grid.geometry(node);
    const double parameter_weight = grid.measure()(node) / geo.area_element;
    Mat u = geo.tangent;
    for (int i = 0; i < n; ++i) u.col(i) += s * v.partials[static_cast<size_t>(i)].col(node);
    const double area = std::sqrt((u.transpose() * u).determinant());
    const Vec p = geo.x + s * v.values.col(node) - x;
    total += parameter_weight * area * std::exp(-p.squaredNorm() / (4.0 * t));
  }
  return std::pow(4.0 * kPi * t, -0.5 * n) * total;
}

// Second derivative at s = 0 of a scalar function by central differences with one Richardson step.
struct Richardson {
  double value = 0.0;
  double mismatch = 0.0;  // |D(h) - D(h/2)|
};

inline Richardson second_derivative(const std::function<double(double)>& f, double h) {
  const double f0 = f(0.0);
  const auto d2 = [&](double step) { return (f(step) - 2.0 * f0 + f(-step)) / (step * step); };
  const double coarse = d2(h);
  const double fine = d2(0.5 * h);
  return {(4.0 * fine - coarse) / 3.0, std::abs(fine - coarse)};
}

inline Richardson first_derivative(const std::function<double(double)>& f, double h) {
  const auto d1 = [&](double step) { return (f(step) - f(-step)) / (2.0 * step); };
  const double coarse = d1(h);
  const double fine = d1(0.5 * h);
  return {(4.0 * fine - coarse) / 3.0, std::abs(fine - coarse)};
}

// Round-off level of the discrete stability operator: 100 eps times the largest nodewise
// response to a unit normal field with random signs, which tracks the stencil weight sum.
inline double roundoff_floor(const Grid& grid, std::uint64_t seed = 0) {
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution coin;
  Mat values(grid.ambient(), grid.size());
  for (int node = 0; node < grid.size(); ++node)
    values.col(node) = (coin(rng) ? 1.0 : -1.0) * grid.geometry(node).normal_basis.col(0);
  const shrinker::NormalField field = shrinker::normal_covariant_derivative(grid, values);
  const Mat response = shrinker::apply_L_perp(grid, field);
  return 100.0 * std::numeric_limits<double>::epsilon() * response.colwise().norm().maxCoeff();
}

// Planar distance between gamma(0) and gamma(length) for the profile system, fixed-step RK4
// in (r, delta, phi) with r' = cos delta, delta' = (r/2 - n/r) sin delta, phi' = sin delta / r.
inline double rk4_loop_gap(double r, double delta, double phi, int n, double length, int steps) {
  using State = std::array<double, 3>;
  const auto rhs = [n](const State& s) {
    return State{std::cos(s[1]), (s[0] / 2.0 - n / s[0]) * std::sin(s[1]), std::sin(s[1]) / s[0]};
  };
  const auto axpy = [](const State& s, double h, const State& k) { return State{s[0] + h * k[0], s[1] + h * k[1], s[2] + h * k[2]}; };
  State s{r, delta, phi};
  const double h = length / steps;
  for (int k = 0; k < steps; ++k) {
    const State k1 = rhs(s);
    const State k2 = rhs(axpy(s, h / 2, k1));
    const State k3 = rhs(axpy(s, h / 2, k2));
    const State k4 = rhs(axpy(s, h, k3));
    for (int c = 0; c < 3; ++c) s[c] += h / 6 * (k1[c] + 2 * k2[c] + 2 * k3[c] + k4[c]);
  }
  return std::hypot(s[0] * std::cos(s[2]) - r * std::cos(phi), s[0] * std::sin(s[2]) - r * std::sin(phi));
}

}  // namespace oracle
