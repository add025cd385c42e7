#pragma once

#include "irmap/types.hpp"

namespace irmap {

struct IdwConfig {
  double power = 2.0;
  int neighbors = 0;           // 0 = use all training points
  double tie_epsilon = 1e-12;  // scaled distance treated as coincident

  void validate() const;  // power > 0, neighbors >= 0, tie_epsilon > 0
};

// Inverse-distance weighting: rate = sum w_i Z_i / sum w_i, w_i = d_i^-power
// over the selected neighbor set. Queries within tie_epsilon of training
// points return the mean rate of the coincident points.
class IdwModel {
 public:
  IdwModel(IdwConfig config, Matrix points, Vector rates);

  double predict(const Vec2& query) const;

  const IdwConfig& config() const { return config_; }
  const Matrix& points() const { return points_; }
  const Vector& rates() const { return rates_; }

 private:
  IdwConfig config_;
  Matrix points_;  // n x 2, scaled coordinates
  Vector rates_;
};

double idw_predict(const IdwConfig& config, const Matrix& points,
                   const Vector& rates, const Vec2& query);

}  // namespace irmap
