#pragma once

#include <Eigen/Core>

namespace surplus {

template <class Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <class Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

/// Per-node boolean flags (index i-1 holds node i's flag).
using BoolVector = Eigen::Array<bool, Eigen::Dynamic, 1>;

}  // namespace surplus
