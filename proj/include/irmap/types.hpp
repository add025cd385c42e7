#pragma once

#include <Eigen/Dense>

#include <stdexcept>

namespace irmap {

template <class Scalar>
using MatrixT = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

template <class Scalar>
using VectorT = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using Matrix = MatrixT<double>;
using Vector = VectorT<double>;
using Vec2 = Eigen::Vector2d;

// Error categories aligned with the CLI exit-code scheme:
// ConfigError -> 2, DataError -> 3, FitError -> 4.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct FitError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace irmap
