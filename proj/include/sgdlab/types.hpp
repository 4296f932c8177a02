#pragma once

#include <Eigen/Core>
#include <stdexcept>

namespace sgdlab {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Evaluation requested outside a landscape's declared validity region.
class RegionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An SGD step produced a non-finite gradient or state.
class TrajectoryError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace sgdlab
