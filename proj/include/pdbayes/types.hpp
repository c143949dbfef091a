#pragma once

#include <Eigen/Core>

namespace pdbayes {

template <typename Scalar>
using Point2 = Eigen::Matrix<Scalar, 2, 1>;

using Eigen::Vector2d;

// Rows are points, columns are ambient coordinates.
using PointCloud = Eigen::MatrixXd;

// Closed first quadrant: the tilted wedge {(b, p) : b >= 0, p >= 0}.
template <typename Derived>
bool in_wedge(const Eigen::MatrixBase<Derived>& x) {
  return x(0) >= 0 && x(1) >= 0;
}

}  // namespace pdbayes
