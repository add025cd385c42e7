#pragma once

#include <memory>

#include "irmap/types.hpp"
#include "irmap/variogram.hpp"

namespace irmap {

struct KrigingConfig {
  int neighbors = 0;  // 0 = one global system, k > 0 = k-nearest per query

  void validate() const;
};

struct KrigingPrediction {
  double rate = 0.0;
  double variance = 0.0;
};

// Bordered ordinary-kriging matrix [[Gamma, 1], [1^T, 0]] with zero diagonal
// semivariances, and the matching right-hand side (gamma(d_i0)..., 1).
Matrix kriging_matrix(const Matrix& points, const VariogramModel& model);
Vector kriging_rhs(const Matrix& points, const VariogramModel& model,
                   const Vec2& query);

// Ordinary kriging: weights solve the bordered system, sum to 1, and yield
// rate = sum w_i Z_i and variance = sum w_i gamma(d_i0) + mu. Immutable after
// construction; predict is pure and safe to call concurrently.
class KrigingSystem {
 public:
  // Coincident points (closer than 1e-12) are averaged before assembly.
  // In global mode the factorization is reused across queries; a singular
  // system gets one 1e-10 diagonal jitter retry before failing.
  KrigingSystem(Matrix points, Vector rates, VariogramModel model,
                KrigingConfig config = {});

  KrigingPrediction predict(const Vec2& query) const;

  // Full (weights..., multiplier) solution for a query, global mode only.
  Vector solve_weights(const Vec2& query) const;

  const Matrix& points() const { return points_; }
  const Vector& rates() const { return rates_; }
  const VariogramModel& model() const { return model_; }
  const KrigingConfig& config() const { return config_; }

 private:
  KrigingPrediction predict_local(const Vec2& query) const;

  Matrix points_;  // deduplicated, n x 2 scaled coordinates
  Vector rates_;
  VariogramModel model_;
  KrigingConfig config_;
  std::shared_ptr<Eigen::FullPivLU<Matrix>> lu_;  // global mode factorization
};

KrigingSystem krige_fit(const Matrix& points, const Vector& rates,
                        const VariogramModel& model, KrigingConfig config = {});

}  // namespace irmap
