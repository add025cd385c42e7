#include "irmap/kriging.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <utility>
#include <vector>

namespace irmap {
namespace {

constexpr double kCoincidenceEps = 1e-12;
constexpr double kJitter = 1e-10;

// Average rates of points closer than kCoincidenceEps; kriging matrices are
// singular under exact duplicates, so collapse them up front.
void deduplicate(Matrix& points, Vector& rates) {
  const Eigen::Index n = points.rows();
  std::vector<Eigen::Index> group(static_cast<std::size_t>(n), -1);
  Eigen::Index n_groups = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (group[static_cast<std::size_t>(i)] >= 0) continue;
    group[static_cast<std::size_t>(i)] = n_groups;
    for (Eigen::Index j = i + 1; j < n; ++j) {
      if (group[static_cast<std::size_t>(j)] >= 0) continue;
      if ((points.row(i) - points.row(j)).norm() < kCoincidenceEps) {
        group[static_cast<std::size_t>(j)] = n_groups;
      }
    }
    ++n_groups;
  }
  if (n_groups == n) return;

  Matrix merged_points = Matrix::Zero(n_groups, 2);
  Vector merged_rates = Vector::Zero(n_groups);
  Vector counts = Vector::Zero(n_groups);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::Index g = group[static_cast<std::size_t>(i)];
    merged_points.row(g) += points.row(i);
    merged_rates(g) += rates(i);
    counts(g) += 1.0;
  }
  for (Eigen::Index g = 0; g < n_groups; ++g) {
    merged_points.row(g) /= counts(g);
    merged_rates(g) /= counts(g);
  }
  points = std::move(merged_points);
  rates = std::move(merged_rates);
}

std::shared_ptr<Eigen::FullPivLU<Matrix>> factorize(
    const Matrix& points, const VariogramModel& model) {
  Matrix system = kriging_matrix(points, model);
  auto lu = std::make_shared<Eigen::FullPivLU<Matrix>>(system);
  if (!lu->isInvertible()) {
    // One jitter rescue: lift the point-block diagonal off zero.
    const Eigen::Index n = points.rows();
    for (Eigen::Index i = 0; i < n; ++i) system(i, i) += kJitter;
    lu = std::make_shared<Eigen::FullPivLU<Matrix>>(system);
    if (!lu->isInvertible()) {
      throw FitError("kriging system is singular");
    }
  }
  return lu;
}

}  // namespace

void KrigingConfig::validate() const {
  if (neighbors < 0) {
    throw ConfigError("kriging neighbor count must be >= 0");
  }
}

Matrix kriging_matrix(const Matrix& points, const VariogramModel& model) {
  const Eigen::Index n = points.rows();
  Matrix system = Matrix::Zero(n + 1, n + 1);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double g = model((points.row(i) - points.row(j)).norm());
      system(i, j) = g;
      system(j, i) = g;
    }
    system(i, n) = 1.0;
    system(n, i) = 1.0;
  }
  return system;
}

Vector kriging_rhs(const Matrix& points, const VariogramModel& model,
                   const Vec2& query) {
  const Eigen::Index n = points.rows();
  Vector rhs(n + 1);
  for (Eigen::Index i = 0; i < n; ++i) {
    rhs(i) = model((points.row(i).transpose() - query).norm());
  }
  rhs(n) = 1.0;
  return rhs;
}

KrigingSystem::KrigingSystem(Matrix points, Vector rates, VariogramModel model,
                             KrigingConfig config)
    : points_(std::move(points)),
      rates_(std::move(rates)),
      model_(model),
      config_(config) {
  config_.validate();
  model_.validate();
  if (points_.rows() == 0) throw DataError("kriging needs training points");
  if (points_.rows() != rates_.size()) {
    throw DataError("kriging points/rates size mismatch");
  }
  deduplicate(points_, rates_);
  if (config_.neighbors == 0 || config_.neighbors >= points_.rows()) {
    config_.neighbors = 0;
    lu_ = factorize(points_, model_);
  }
}

Vector KrigingSystem::solve_weights(const Vec2& query) const {
  if (!lu_) {
    throw FitError("weight solve is only available in global mode");
  }
  return lu_->solve(kriging_rhs(points_, model_, query));
}

KrigingPrediction KrigingSystem::predict(const Vec2& query) const {
  if (!lu_) return predict_local(query);

  const Vector rhs = kriging_rhs(points_, model_, query);
  const Vector solution = lu_->solve(rhs);
  const Eigen::Index n = points_.rows();

  KrigingPrediction out;
  out.rate = solution.head(n).dot(rates_);
  out.variance =
      std::max(0.0, solution.head(n).dot(rhs.head(n)) + solution(n));
  return out;
}

KrigingPrediction KrigingSystem::predict_local(const Vec2& query) const {
  const Eigen::Index n = points_.rows();
  const Eigen::Index k =
      std::min<Eigen::Index>(config_.neighbors, n);

  std::vector<Eigen::Index> idx(static_cast<std::size_t>(n));
  std::iota(idx.begin(), idx.end(), Eigen::Index{0});
  std::nth_element(idx.begin(), idx.begin() + (k - 1), idx.end(),
                   [&](Eigen::Index a, Eigen::Index b) {
                     const double da =
                         (points_.row(a).transpose() - query).squaredNorm();
                     const double db =
                         (points_.row(b).transpose() - query).squaredNorm();
                     if (da != db) return da < db;
                     return a < b;  // deterministic tie order
                   });
  idx.resize(static_cast<std::size_t>(k));
  std::sort(idx.begin(), idx.end());

  Matrix local_points(k, 2);
  Vector local_rates(k);
  for (Eigen::Index r = 0; r < k; ++r) {
    local_points.row(r) = points_.row(idx[static_cast<std::size_t>(r)]);
    local_rates(r) = rates_(idx[static_cast<std::size_t>(r)]);
  }

  const auto lu = factorize(local_points, model_);
  const Vector rhs = kriging_rhs(local_points, model_, query);
  const Vector solution = lu->solve(rhs);

  KrigingPrediction out;
  out.rate = solution.head(k).dot(local_rates);
  out.variance =
      std::max(0.0, solution.head(k).dot(rhs.head(k)) + solution(k));
  return out;
}

KrigingSystem krige_fit(const Matrix& points, const Vector& rates,
                        const VariogramModel& model, KrigingConfig config) {
  return KrigingSystem(points, rates, model, config);
}

}  // namespace irmap
