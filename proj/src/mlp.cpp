#include "irmap/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

#include "irmap/rng.hpp"

namespace irmap {
namespace {

Matrix sigmoid(Matrix x) {
  return x.unaryExpr([](double v) { return 1.0 / (1.0 + std::exp(-v)); });
}

// Activations for a standardized batch; activations[0] is the input itself,
// the last entry is the linear output layer. All row-per-sample.
std::vector<Matrix> forward_std(const std::vector<Matrix>& weights,
                                const std::vector<Vector>& biases,
                                const Matrix& z) {
  const std::size_t n_layers = weights.size();
  std::vector<Matrix> activations(n_layers + 1);
  activations[0] = z;
  for (std::size_t l = 0; l < n_layers; ++l) {
    Matrix pre = activations[l] * weights[l].transpose();
    pre.rowwise() += biases[l].transpose();
    activations[l + 1] = l + 1 < n_layers ? sigmoid(std::move(pre)) : pre;
  }
  return activations;
}

MlpGradient backward_std(const std::vector<Matrix>& weights,
                         const std::vector<Matrix>& activations,
                         const Matrix& targets_std) {
  const std::size_t n_layers = weights.size();
  const double n = static_cast<double>(targets_std.rows());

  MlpGradient grad;
  grad.weight_grads.resize(n_layers);
  grad.bias_grads.resize(n_layers);

  Matrix delta = (2.0 / n) * (activations[n_layers] - targets_std);
  for (std::size_t l = n_layers; l-- > 0;) {
    grad.weight_grads[l] = delta.transpose() * activations[l];
    grad.bias_grads[l] = delta.colwise().sum().transpose();
    if (l == 0) break;
    const Matrix& act = activations[l];
    delta = (delta * weights[l]).cwiseProduct(
        act.cwiseProduct(Matrix::Ones(act.rows(), act.cols()) - act));
  }
  return grad;
}

Matrix standardize_rows(const Standardizer& s, const Matrix& raw) {
  Matrix z = raw;
  z.rowwise() -= s.mean.transpose();
  z.array().rowwise() /= s.stddev.transpose().array();
  return z;
}

}  // namespace

void MlpConfig::validate() const {
  for (const int units : hidden_layers) {
    if (units < 1) throw ConfigError("mlp hidden layer width must be >= 1");
  }
  if (!(learning_rate > 0.0)) throw ConfigError("mlp learning rate must be > 0");
  if (!(momentum >= 0.0 && momentum < 1.0)) {
    throw ConfigError("mlp momentum must be in [0, 1)");
  }
  if (max_epochs < 1) throw ConfigError("mlp epoch budget must be >= 1");
  if (patience < 1) throw ConfigError("mlp patience must be >= 1");
}

Standardizer Standardizer::fit(const Matrix& columns_are_dims) {
  const Eigen::Index n = columns_are_dims.rows();
  if (n == 0) throw DataError("standardizer needs data");
  Standardizer s;
  s.mean = columns_are_dims.colwise().mean();
  s.stddev = Vector::Ones(columns_are_dims.cols());
  if (n > 1) {
    for (Eigen::Index d = 0; d < columns_are_dims.cols(); ++d) {
      const double var =
          (columns_are_dims.col(d).array() - s.mean(d)).square().sum() /
          static_cast<double>(n);
      const double sd = std::sqrt(var);
      if (sd > 1e-12) s.stddev(d) = sd;
    }
  }
  return s;
}

Standardizer Standardizer::identity(int dims) {
  Standardizer s;
  s.mean = Vector::Zero(dims);
  s.stddev = Vector::Ones(dims);
  return s;
}

Vector Standardizer::apply(const Vector& x) const {
  return (x - mean).cwiseQuotient(stddev);
}

Vector Standardizer::invert(const Vector& z) const {
  return z.cwiseProduct(stddev) + mean;
}

MlpModel::MlpModel(std::vector<Matrix> weights, std::vector<Vector> biases,
                   Standardizer input, Standardizer target)
    : weights_(std::move(weights)),
      biases_(std::move(biases)),
      input_(std::move(input)),
      target_(std::move(target)) {
  if (weights_.empty() || weights_.size() != biases_.size()) {
    throw ConfigError("mlp needs matching weight and bias layers");
  }
  for (std::size_t l = 0; l < weights_.size(); ++l) {
    if (weights_[l].rows() != biases_[l].size()) {
      throw ConfigError("mlp layer weight/bias shape mismatch");
    }
    if (l > 0 && weights_[l].cols() != weights_[l - 1].rows()) {
      throw ConfigError("mlp consecutive layer shape mismatch");
    }
  }
  if (input_.mean.size() != weights_.front().cols() ||
      target_.mean.size() != weights_.back().rows()) {
    throw ConfigError("mlp standardizer dimension mismatch");
  }
}

MlpModel MlpModel::initialized(const std::vector<int>& layer_sizes,
                               std::uint64_t seed, Standardizer input,
                               Standardizer target) {
  if (layer_sizes.size() < 2) {
    throw ConfigError("mlp needs input and output layers");
  }
  Rng rng(seed);
  std::vector<Matrix> weights;
  std::vector<Vector> biases;
  for (std::size_t l = 0; l + 1 < layer_sizes.size(); ++l) {
    const int fan_in = layer_sizes[l];
    const int fan_out = layer_sizes[l + 1];
    if (fan_in < 1 || fan_out < 1) {
      throw ConfigError("mlp layer sizes must be >= 1");
    }
    const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
    Matrix w(fan_out, fan_in);
    for (Eigen::Index r = 0; r < w.rows(); ++r) {
      for (Eigen::Index c = 0; c < w.cols(); ++c) {
        w(r, c) = bound * (2.0 * rng.uniform() - 1.0);
      }
    }
    weights.push_back(std::move(w));
    biases.push_back(Vector::Zero(fan_out));
  }
  return MlpModel(std::move(weights), std::move(biases), std::move(input),
                  std::move(target));
}

std::vector<int> MlpModel::layer_sizes() const {
  std::vector<int> sizes;
  sizes.push_back(static_cast<int>(weights_.front().cols()));
  for (const auto& w : weights_) sizes.push_back(static_cast<int>(w.rows()));
  return sizes;
}

double MlpModel::predict(const Vec2& query) const {
  Vector raw(2);
  raw << query(0), query(1);
  return forward(raw)(0);
}

Vector MlpModel::forward(const Vector& raw_input) const {
  Vector a = input_.apply(raw_input);
  for (std::size_t l = 0; l < weights_.size(); ++l) {
    Vector pre = weights_[l] * a + biases_[l];
    a = l + 1 < weights_.size()
            ? pre.unaryExpr(
                  [](double v) { return 1.0 / (1.0 + std::exp(-v)); })
            : pre;
  }
  return target_.invert(a);
}

Matrix MlpModel::forward_batch(const Matrix& raw_inputs_rowwise) const {
  const Matrix z = standardize_rows(input_, raw_inputs_rowwise);
  Matrix out = forward_std(weights_, biases_, z).back();
  out.array().rowwise() *= target_.stddev.transpose().array();
  out.rowwise() += target_.mean.transpose();
  return out;
}

double mlp_loss(const MlpModel& model, const Matrix& inputs_rowwise,
                const Vector& targets) {
  if (inputs_rowwise.rows() != targets.size() || targets.size() == 0) {
    throw DataError("mlp loss inputs/targets size mismatch");
  }
  const Matrix z = standardize_rows(model.input_standardizer(), inputs_rowwise);
  const Matrix t = standardize_rows(model.target_standardizer(), targets);
  const Matrix out = forward_std(model.weights(), model.biases(), z).back();
  return (out - t).squaredNorm() / static_cast<double>(targets.size());
}

MlpGradient mlp_gradient(const MlpModel& model, const Matrix& inputs_rowwise,
                         const Vector& targets) {
  if (inputs_rowwise.rows() != targets.size() || targets.size() == 0) {
    throw DataError("mlp gradient inputs/targets size mismatch");
  }
  const Matrix z = standardize_rows(model.input_standardizer(), inputs_rowwise);
  const Matrix t = standardize_rows(model.target_standardizer(), targets);
  const auto activations = forward_std(model.weights(), model.biases(), z);
  return backward_std(model.weights(), activations, t);
}

MlpTrainResult mlp_train(const MlpConfig& config, const Matrix& train_inputs,
                         const Vector& train_targets,
                         const Matrix& test_inputs,
                         const Vector& test_targets) {
  config.validate();
  const Eigen::Index n_train = train_inputs.rows();
  if (n_train == 0) throw DataError("mlp training set is empty");
  if (train_targets.size() != n_train ||
      test_targets.size() != test_inputs.rows()) {
    throw DataError("mlp inputs/targets size mismatch");
  }
  const bool has_test = test_inputs.rows() > 0;

  const Standardizer input_std = Standardizer::fit(train_inputs);
  const Standardizer target_std = Standardizer::fit(train_targets);
  const double target_scale = target_std.stddev(0);

  std::vector<int> sizes;
  sizes.push_back(static_cast<int>(train_inputs.cols()));
  for (const int units : config.hidden_layers) sizes.push_back(units);
  sizes.push_back(1);

  const MlpModel initial =
      MlpModel::initialized(sizes, config.seed, input_std, target_std);

  const Matrix z_train = standardize_rows(input_std, train_inputs);
  const Matrix t_train = standardize_rows(target_std, train_targets);
  const Matrix z_test =
      has_test ? standardize_rows(input_std, test_inputs) : Matrix(0, 2);
  const Matrix t_test =
      has_test ? standardize_rows(target_std, test_targets) : Matrix(0, 1);

  // Standardized-space RMSE scales back to rate units by the target stddev.
  const auto rmse_of = [&](const std::vector<Matrix>& weights,
                           const std::vector<Vector>& biases, const Matrix& z,
                           const Matrix& t) {
    const Matrix out = forward_std(weights, biases, z).back();
    return target_scale *
           std::sqrt((out - t).squaredNorm() / static_cast<double>(t.rows()));
  };

  double learning_rate = config.learning_rate;
  MlpTrainResult result{initial, {}, 0, 0};

  for (int attempt = 0;; ++attempt) {
    std::vector<Matrix> weights = initial.weights();
    std::vector<Vector> biases = initial.biases();
    std::vector<Matrix> weight_velocity;
    std::vector<Vector> bias_velocity;
    for (std::size_t l = 0; l < weights.size(); ++l) {
      weight_velocity.push_back(
          Matrix::Zero(weights[l].rows(), weights[l].cols()));
      bias_velocity.push_back(Vector::Zero(biases[l].size()));
    }

    std::vector<TrainRecord> history;
    std::vector<Matrix> best_weights = weights;
    std::vector<Vector> best_biases = biases;
    int best_epoch = 0;
    int stall = 0;
    bool diverged = false;

    {
      TrainRecord record;
      record.epoch = 0;
      record.train_rmse = rmse_of(weights, biases, z_train, t_train);
      record.test_rmse = has_test ? rmse_of(weights, biases, z_test, t_test)
                                  : record.train_rmse;
      history.push_back(record);
    }
    double best_monitor = history.front().test_rmse;

    for (int epoch = 1; epoch <= config.max_epochs; ++epoch) {
      const auto activations = forward_std(weights, biases, z_train);
      const MlpGradient grad = backward_std(weights, activations, t_train);
      for (std::size_t l = 0; l < weights.size(); ++l) {
        weight_velocity[l] = config.momentum * weight_velocity[l] -
                             learning_rate * grad.weight_grads[l];
        bias_velocity[l] = config.momentum * bias_velocity[l] -
                           learning_rate * grad.bias_grads[l];
        weights[l] += weight_velocity[l];
        biases[l] += bias_velocity[l];
      }

      TrainRecord record;
      record.epoch = epoch;
      record.train_rmse = rmse_of(weights, biases, z_train, t_train);
      record.test_rmse = has_test ? rmse_of(weights, biases, z_test, t_test)
                                  : record.train_rmse;
      history.push_back(record);

      if (!std::isfinite(record.train_rmse) ||
          !std::isfinite(record.test_rmse)) {
        diverged = true;
        break;
      }

      if (record.test_rmse < best_monitor) {
        best_monitor = record.test_rmse;
        best_epoch = epoch;
        best_weights = weights;
        best_biases = biases;
        stall = 0;
      } else if (++stall >= config.patience) {
        break;
      }
    }

    if (!diverged) {
      result.model =
          MlpModel(std::move(best_weights), std::move(best_biases), input_std,
                   target_std);
      result.history = std::move(history);
      result.best_epoch = best_epoch;
      result.restarts = attempt;
      return result;
    }
    if (attempt >= 3) {
      throw FitError("mlp training diverged after 3 restarts");
    }
    learning_rate *= 0.5;
  }
}

}  // namespace irmap
