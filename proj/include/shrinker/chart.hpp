#pragma once
#include <functional>
#include <vector>

#include "shrinker/types.hpp"

namespace shrinker {

// Position and first/second partial derivatives of an immersion at one point.
// d1 is m x n; d2 holds n*n ambient vectors, d2[i*n + j] = d_i d_j X.
template <typename T>
struct Jet {
  VecX<T> x;
  MatX<T> d1;
  std::vector<VecX<T>> d2;

  int dim() const { return static_cast<int>(d1.cols()); }
  int ambient() const { return static_cast<int>(x.size()); }
  const VecX<T>& second(int i, int j) const { return d2[static_cast<size_t>(i * dim() + j)]; }
  VecX<T>& second(int i, int j) { return d2[static_cast<size_t>(i * dim() + j)]; }

  static Jet zero(int n, int m) {
    Jet jet;
    jet.x = VecX<T>::Zero(m);
    jet.d1 = MatX<T>::Zero(m, n);
    jet.d2.assign(static_cast<size_t>(n * n), VecX<T>::Zero(m));
    return jet;
  }
};

enum class AxisKind {
  periodic,  // [lo, hi) with wrap-around
  polar,     // colatitude in (0, pi) of a lat-long sphere chart; nodes avoid the poles
  bounded,   // closed interval [lo, hi], endpoints included
};

struct Axis {
  AxisKind kind = AxisKind::periodic;
  double lo = 0.0;
  double hi = 0.0;
  // Polar axes: power of sin(u) in the area element, and the lat-long chain they belong to.
  // The chain's periodic longitude axis carries the same group id.
  int sin_power = 0;
  int group = -1;
  // Bounded axes cut from an unbounded direction.
  bool truncated = false;

  double extent() const { return hi - lo; }
};

// Parametric patch u -> X(u) in R^m over a box of axes.
class Chart {
 public:
  using MapFn = std::function<Vec(const Vec&)>;
  using JetFn = std::function<Jet<double>(const Vec&)>;

  // Without a jet function, derivatives come from central differences of the map.
  Chart(int ambient, std::vector<Axis> axes, MapFn map, JetFn jet = {});

  int dim() const { return static_cast<int>(axes_.size()); }
  int ambient() const { return ambient_; }
  const std::vector<Axis>& axes() const { return axes_; }
  bool analytic() const { return static_cast<bool>(jet_); }

  Vec position(const Vec& u) const { return map_(u); }
  Jet<double> jet(const Vec& u) const;

  // Finite-difference step is step_scale times the axis extent.
  double step_scale() const { return step_scale_; }
  void set_step_scale(double scale) { step_scale_ = scale; }

 private:
  int ambient_;
  std::vector<Axis> axes_;
  MapFn map_;
  JetFn jet_;
  double step_scale_ = 1e-4;
};

// Cartesian product chart (u, v) -> (X(u), Y(v)) in R^{m1 + m2}.
Chart product(const Chart& first, const Chart& second);

// Central-difference 2-jet of an arbitrary map, steps given per axis.
Jet<double> difference_jet(const Chart::MapFn& map, const Vec& u, const Vec& steps);

}  // namespace shrinker
