#pragma once

#include <cstdint>
#include <vector>

#include "irmap/types.hpp"

namespace irmap {

struct SvrConfig {
  double c = 10.0;        // regularization bound on |beta_i|
  double epsilon = 0.01;  // insensitive tube half-width, rate units
  double sigma = 0.1;     // Gaussian kernel width, scaled coordinates
  double tol = 1e-3;      // KKT violation tolerance
  std::int64_t max_passes = 2000000;  // SMO pair-update budget
  bool record_objective = false;      // keep per-iteration dual objective

  void validate() const;
};

// exp(-|p-q|^2 / (2 sigma^2))
double rbf_kernel(double sigma, const Vec2& p, const Vec2& q);

struct SvrTrainStats {
  std::int64_t iterations = 0;
  bool converged = false;
  double final_violation = 0.0;
  double dual_objective = 0.0;  // minimized form of the dual
  std::vector<double> objective_history;
};

// Epsilon-insensitive SVR dual solution: f(q) = sum beta_i K(q, p_i) + b with
// |beta_i| <= C and sum beta_i = 0. Zero-coefficient points are dropped.
class SvrModel {
 public:
  SvrModel(SvrConfig config, Matrix support_points, Vector beta, double bias,
           SvrTrainStats stats = {});

  double predict(const Vec2& query) const;

  const SvrConfig& config() const { return config_; }
  const Matrix& support_points() const { return support_points_; }
  const Vector& beta() const { return beta_; }
  double bias() const { return bias_; }
  const SvrTrainStats& stats() const { return stats_; }

 private:
  SvrConfig config_;
  Matrix support_points_;  // m x 2 scaled coordinates
  Vector beta_;
  double bias_ = 0.0;
  SvrTrainStats stats_;
};

// Solves the dual by SMO with maximal-violating-pair selection until no KKT
// violation exceeds tol. Bias comes from free support vectors when any exist,
// else from the bound midpoint rule. On a blown iteration budget the best
// iterate is returned with stats().converged == false.
SvrModel svr_fit(const SvrConfig& config, const Matrix& points,
                 const Vector& targets);

struct KktViolation {
  int index = 0;
  double amount = 0.0;  // in rate units beyond the tolerance-free bound
};

// Residual-side KKT audit of a fitted model against its training set; returns
// every violation larger than config.tol.
std::vector<KktViolation> svr_kkt_violations(const SvrModel& model,
                                             const Matrix& points,
                                             const Vector& targets);

struct SvrGrid {
  std::vector<double> c_values;
  std::vector<double> epsilon_values;
  std::vector<double> sigma_values;
};

// Grid search scored by RMSE on the held-out split; ties keep the first.
SvrConfig svr_grid_search(const SvrConfig& base, const SvrGrid& grid,
                          const Matrix& train_points, const Vector& train_y,
                          const Matrix& test_points, const Vector& test_y);

}  // namespace irmap
