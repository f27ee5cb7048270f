#pragma once
#include <Eigen/Dense>

namespace shrinker {

template <typename T>
using VecX = Eigen::Matrix<T, Eigen::Dynamic, 1>;

template <typename T>
using MatX = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>;

using Vec = VecX<double>;
using Mat = MatX<double>;

}  // namespace shrinker
