#pragma once

#include <cstdint>
#include <vector>

#include "irmap/types.hpp"

namespace irmap {

struct MlpConfig {
  std::vector<int> hidden_layers = {25, 25};
  double learning_rate = 0.1;
  double momentum = 0.95;
  int max_epochs = 20000;
  int patience = 200;  // early-stopping epochs without test improvement
  std::uint64_t seed = 0;

  void validate() const;
};

// Per-dimension affine standardization fitted on training data only.
struct Standardizer {
  Vector mean;
  Vector stddev;  // degenerate dimensions fall back to 1

  static Standardizer fit(const Matrix& columns_are_dims);
  static Standardizer identity(int dims);
  Vector apply(const Vector& x) const;
  Vector invert(const Vector& z) const;
};

// Feed-forward net with sigmoid hidden layers and a linear output, wrapped in
// input/target standardization. Immutable in normal use; tests may perturb
// weights through the mutable accessors.
class MlpModel {
 public:
  MlpModel(std::vector<Matrix> weights, std::vector<Vector> biases,
           Standardizer input, Standardizer target);

  // Weights uniform in +-1/sqrt(fan_in) from the seeded stream, biases zero.
  static MlpModel initialized(const std::vector<int>& layer_sizes,
                              std::uint64_t seed, Standardizer input,
                              Standardizer target);

  double predict(const Vec2& query) const;
  Vector forward(const Vector& raw_input) const;   // destandardized output
  Matrix forward_batch(const Matrix& raw_inputs_rowwise) const;

  int layer_count() const { return static_cast<int>(weights_.size()); }
  std::vector<int> layer_sizes() const;
  const std::vector<Matrix>& weights() const { return weights_; }
  const std::vector<Vector>& biases() const { return biases_; }
  Matrix& weight(int layer) { return weights_[layer]; }
  Vector& bias(int layer) { return biases_[layer]; }
  const Standardizer& input_standardizer() const { return input_; }
  const Standardizer& target_standardizer() const { return target_; }

 private:
  std::vector<Matrix> weights_;  // weights_[l] is (out x in)
  std::vector<Vector> biases_;
  Standardizer input_;
  Standardizer target_;
};

struct MlpGradient {
  std::vector<Matrix> weight_grads;
  std::vector<Vector> bias_grads;
};

// Mean squared error over the batch in standardized target space; the
// gradient below differentiates exactly this value.
double mlp_loss(const MlpModel& model, const Matrix& inputs_rowwise,
                const Vector& targets);
MlpGradient mlp_gradient(const MlpModel& model, const Matrix& inputs_rowwise,
                         const Vector& targets);

struct TrainRecord {
  int epoch = 0;
  double train_rmse = 0.0;  // rate units
  double test_rmse = 0.0;
};

struct MlpTrainResult {
  MlpModel model;  // weights from the best test-RMSE epoch
  std::vector<TrainRecord> history;
  int best_epoch = 0;
  int restarts = 0;
};

// Full-batch gradient descent with momentum and test-split early stopping.
// A non-finite loss halves the learning rate and restarts from the same
// initialization, at most 3 times, then fails.
MlpTrainResult mlp_train(const MlpConfig& config, const Matrix& train_inputs,
                         const Vector& train_targets,
                         const Matrix& test_inputs,
                         const Vector& test_targets);

}  // namespace irmap
