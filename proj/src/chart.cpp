#include "shrinker/chart.hpp"

#include <algorithm>
#include <utility>

#include "shrinker/errors.hpp"

namespace shrinker {

Chart::Chart(int ambient, std::vector<Axis> axes, MapFn map, JetFn jet)
    : ambient_(ambient), axes_(std::move(axes)), map_(std::move(map)), jet_(std::move(jet)) {
  if (axes_.empty() || ambient_ < dim()) {
    throw Error(ErrorCode::InvalidDimension, "chart needs 1 <= n <= m");
  }
  for (const auto& axis : axes_) {
    if (!(axis.hi > axis.lo)) throw Error(ErrorCode::InvalidSpec, "empty chart axis");
  }
}

Jet<double> Chart::jet(const Vec& u) const {
  if (jet_) return jet_(u);
  Vec steps(dim());
  for (int i = 0; i < dim(); ++i) steps(i) = step_scale_ * axes_[static_cast<size_t>(i)].extent();
  return difference_jet(map_, u, steps);
}

Jet<double> difference_jet(const Chart::MapFn& map, const Vec& u, const Vec& steps) {
  const int n = static_cast<int>(u.size());
  Jet<double> jet;
  jet.x = map(u);
  const int m = static_cast<int>(jet.x.size());
  jet.d1 = Mat::Zero(m, n);
  jet.d2.assign(static_cast<size_t>(n * n), Vec::Zero(m));
  auto shifted = [&](int i, double si, int j, double sj) {
    Vec v = u;
    v(i) += si;
    if (j >= 0) v(j) += sj;
    return map(v);
  };
  for (int i = 0; i < n; ++i) {
    const double h = steps(i);
    const Vec plus = shifted(i, h, -1, 0.0);
    const Vec minus = shifted(i, -h, -1, 0.0);
    jet.d1.col(i) = (plus - minus) / (2.0 * h);
    jet.second(i, i) = (plus - 2.0 * jet.x + minus) / (h * h);
  }
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const double hi = steps(i), hj = steps(j);
      const Vec mixed = (shifted(i, hi, j, hj) - shifted(i, hi, j, -hj) - shifted(i, -hi, j, hj) +
                         shifted(i, -hi, j, -hj)) /
                        (4.0 * hi * hj);
      jet.second(i, j) = mixed;
      jet.second(j, i) = mixed;
    }
  }
  return jet;
}

Chart product(const Chart& first, const Chart& second) {
  const int n1 = first.dim(), n2 = second.dim();
  const int m1 = first.ambient(), m2 = second.ambient();
  std::vector<Axis> axes = first.axes();
  int group_offset = 0;
  for (const auto& axis : first.axes()) group_offset = std::max(group_offset, axis.group + 1);
  for (Axis axis : second.axes()) {
    if (axis.group >= 0) axis.group += group_offset;
    axes.push_back(axis);
  }
  auto map = [first, second, n1, n2, m1, m2](const Vec& u) {
    Vec x(m1 + m2);
    x << first.position(u.head(n1)), second.position(u.tail(n2));
    return x;
  };
  auto jet = [first, second, n1, n2, m1, m2](const Vec& u) {
    const Jet<double> a = first.jet(u.head(n1));
    const Jet<double> b = second.jet(u.tail(n2));
    Jet<double> out = Jet<double>::zero(n1 + n2, m1 + m2);
    out.x << a.x, b.x;
    out.d1.block(0, 0, m1, n1) = a.d1;
    out.d1.block(m1, n1, m2, n2) = b.d1;
    for (int i = 0; i < n1; ++i)
      for (int j = 0; j < n1; ++j) out.second(i, j).head(m1) = a.second(i, j);
    for (int i = 0; i < n2; ++i)
      for (int j = 0; j < n2; ++j) out.second(n1 + i, n1 + j).tail(m2) = b.second(i, j);
    return out;
  };
  Chart result(m1 + m2, std::move(axes), map, jet);
  return result;
}

}  // namespace shrinker
