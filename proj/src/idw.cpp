#include "irmap/idw.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

namespace irmap {

void IdwConfig::validate() const {
  if (!(power > 0.0)) throw ConfigError("idw: power must be positive");
  if (neighbors < 0) throw ConfigError("idw: neighbors must be >= 0");
  if (!(tie_epsilon > 0.0)) throw ConfigError("idw: tie_epsilon must be positive");
}

IdwModel::IdwModel(IdwConfig config, Matrix points, Vector rates)
    : config_(config), points_(std::move(points)), rates_(std::move(rates)) {
  config_.validate();
  if (points_.rows() == 0) throw DataError("idw: empty training set");
  if (points_.rows() != rates_.size()) {
    throw DataError("idw: points/rates size mismatch");
  }
}

double IdwModel::predict(const Vec2& query) const {
  return idw_predict(config_, points_, rates_, query);
}

double idw_predict(const IdwConfig& config, const Matrix& points,
                   const Vector& rates, const Vec2& query) {
  const Eigen::Index n = points.rows();
  if (n == 0) throw DataError("idw: empty training set");

  Vector d2 = (points.rowwise() - query.transpose()).rowwise().squaredNorm();

  // Coincident points take over: mean rate within tie_epsilon.
  const double tie2 = config.tie_epsilon * config.tie_epsilon;
  double tie_sum = 0.0;
  int tie_count = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (d2(i) <= tie2) {
      tie_sum += rates(i);
      ++tie_count;
    }
  }
  if (tie_count > 0) return tie_sum / tie_count;

  std::vector<Eigen::Index> selected(n);
  std::iota(selected.begin(), selected.end(), 0);
  if (config.neighbors > 0 && config.neighbors < n) {
    std::nth_element(selected.begin(), selected.begin() + config.neighbors - 1,
                     selected.end(),
                     [&](Eigen::Index a, Eigen::Index b) { return d2(a) < d2(b); });
    selected.resize(config.neighbors);
  }

  double weight_sum = 0.0;
  double value_sum = 0.0;
  for (Eigen::Index i : selected) {
    const double w = std::pow(d2(i), -0.5 * config.power);
    weight_sum += w;
    value_sum += w * rates(i);
  }
  if (!std::isfinite(weight_sum) || !std::isfinite(value_sum)) {
    // Weight overflow at near-coincident distance: fall back to the nearest
    // selected point.
    Eigen::Index best = selected.front();
    for (Eigen::Index i : selected) {
      if (d2(i) < d2(best)) best = i;
    }
    return rates(best);
  }
  return value_sum / weight_sum;
}

}  // namespace irmap
