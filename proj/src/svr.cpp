#include "irmap/svr.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <list>
#include <unordered_map>
#include <utility>
#include <vector>

namespace irmap {
namespace {

// Row cache for the n x n kernel matrix. Small problems keep every row;
// large ones fall back to least-recently-used eviction so memory stays flat.
class KernelCache {
 public:
  KernelCache(const Matrix& points, double sigma)
      : points_(points),
        sigma_(sigma),
        n_(points.rows()),
        full_(n_ <= 4000),
        rows_(full_ ? static_cast<std::size_t>(n_) : 0) {}

  const Vector& row(Eigen::Index i) {
    if (full_) {
      auto& slot = rows_[static_cast<std::size_t>(i)];
      if (slot.size() == 0) slot = compute(i);
      return slot;
    }
    if (const auto it = lru_index_.find(i); it != lru_index_.end()) {
      lru_.splice(lru_.begin(), lru_, it->second);
      return it->second->second;
    }
    if (lru_.size() >= kLruCapacity) {
      lru_index_.erase(lru_.back().first);
      lru_.pop_back();
    }
    lru_.emplace_front(i, compute(i));
    lru_index_[i] = lru_.begin();
    return lru_.front().second;
  }

 private:
  static constexpr std::size_t kLruCapacity = 1024;

  Vector compute(Eigen::Index i) const {
    Vector out(n_);
    const Vec2 p = points_.row(i).transpose();
    for (Eigen::Index j = 0; j < n_; ++j) {
      out(j) = rbf_kernel(sigma_, p, points_.row(j).transpose());
    }
    return out;
  }

  const Matrix& points_;
  double sigma_;
  Eigen::Index n_;
  bool full_;
  std::vector<Vector> rows_;
  std::list<std::pair<Eigen::Index, Vector>> lru_;
  std::unordered_map<Eigen::Index, decltype(lru_)::iterator> lru_index_;
};

}  // namespace

void SvrConfig::validate() const {
  if (!(c > 0.0)) throw ConfigError("svr C must be > 0");
  if (!(epsilon >= 0.0)) throw ConfigError("svr epsilon must be >= 0");
  if (!(sigma > 0.0)) throw ConfigError("svr sigma must be > 0");
  if (!(tol > 0.0)) throw ConfigError("svr tolerance must be > 0");
  if (max_passes < 1) throw ConfigError("svr iteration budget must be >= 1");
}

double rbf_kernel(double sigma, const Vec2& p, const Vec2& q) {
  return std::exp(-(p - q).squaredNorm() / (2.0 * sigma * sigma));
}

SvrModel::SvrModel(SvrConfig config, Matrix support_points, Vector beta,
                   double bias, SvrTrainStats stats)
    : config_(config),
      support_points_(std::move(support_points)),
      beta_(std::move(beta)),
      bias_(bias),
      stats_(std::move(stats)) {
  config_.validate();
  if (support_points_.rows() != beta_.size()) {
    throw DataError("svr support point/coefficient size mismatch");
  }
}

double SvrModel::predict(const Vec2& query) const {
  double out = bias_;
  for (Eigen::Index i = 0; i < support_points_.rows(); ++i) {
    out += beta_(i) *
           rbf_kernel(config_.sigma, query, support_points_.row(i).transpose());
  }
  return out;
}

// Dual in 2n box variables z = (alpha, alpha*) with signs s = (+1, -1):
//   minimize  1/2 sum s_i s_j z_i z_j K_ij + sum p_i z_i,   p = (eps - y, eps + y)
//   subject to  sum s_i z_i = 0,  0 <= z_i <= C.
// SMO picks the maximal violating pair and solves the two-variable problem
// exactly; the gradient G = Qz + p is maintained incrementally.
SvrModel svr_fit(const SvrConfig& config, const Matrix& points,
                 const Vector& targets) {
  config.validate();
  const Eigen::Index n = points.rows();
  if (n == 0) throw DataError("svr needs training points");
  if (targets.size() != n) throw DataError("svr points/targets size mismatch");
  if (!points.allFinite() || !targets.allFinite()) {
    throw DataError("svr inputs must be finite");
  }

  const double c = config.c;
  const Eigen::Index m = 2 * n;
  const auto sign = [n](Eigen::Index t) { return t < n ? 1.0 : -1.0; };
  const auto base = [n](Eigen::Index t) { return t < n ? t : t - n; };

  Vector z = Vector::Zero(m);
  Vector grad(m);  // G_t = p_t while z = 0
  for (Eigen::Index t = 0; t < m; ++t) {
    grad(t) = config.epsilon - sign(t) * targets(base(t));
  }
  Vector p = grad;

  KernelCache cache(points, config.sigma);
  SvrTrainStats stats;
  if (config.record_objective) stats.objective_history.push_back(0.0);

  double lower = 0.0, upper = 0.0;  // feasible band for the multiplier
  while (true) {
    // Maximal violating pair: the tightest lower bound on the equality
    // multiplier against the tightest upper bound.
    Eigen::Index arg_lower = -1, arg_upper = -1;
    lower = -std::numeric_limits<double>::infinity();
    upper = std::numeric_limits<double>::infinity();
    for (Eigen::Index t = 0; t < m; ++t) {
      const double s = sign(t);
      const double sg = s * grad(t);
      const bool positive = s > 0.0;
      const bool in_up = positive ? z(t) < c : z(t) > 0.0;
      const bool in_low = positive ? z(t) > 0.0 : z(t) < c;
      if (in_low && sg > lower) {
        lower = sg;
        arg_lower = t;
      }
      if (in_up && sg < upper) {
        upper = sg;
        arg_upper = t;
      }
    }

    stats.final_violation = lower - upper;
    if (stats.final_violation <= config.tol) {
      stats.converged = true;
      break;
    }
    if (stats.iterations >= config.max_passes) break;

    const Eigen::Index i = arg_lower, j = arg_upper;
    const double si = sign(i), sj = sign(j);
    const Vector& ki = cache.row(base(i));
    const Vector& kj = cache.row(base(j));

    // Step z_i -= s_i t, z_j += s_j t preserves the equality constraint;
    // curvature along it is K_ii + K_jj - 2 K_ij.
    const double a =
        std::max(ki(base(i)) + kj(base(j)) - 2.0 * ki(base(j)), 1e-12);
    double t_step = (lower - upper) / a;
    const double cap_i = si > 0.0 ? z(i) : c - z(i);
    const double cap_j = sj > 0.0 ? c - z(j) : z(j);
    t_step = std::min(t_step, std::min(cap_i, cap_j));

    z(i) = std::clamp(z(i) - si * t_step, 0.0, c);
    z(j) = std::clamp(z(j) + sj * t_step, 0.0, c);
    for (Eigen::Index t = 0; t < m; ++t) {
      grad(t) += t_step * sign(t) * (kj(base(t)) - ki(base(t)));
    }

    ++stats.iterations;
    if (config.record_objective) {
      stats.objective_history.push_back(0.5 * (z.dot(grad) + z.dot(p)));
    }
  }
  stats.dual_objective = 0.5 * (z.dot(grad) + z.dot(p));

  // Bias: average the multiplier over free variables when any exist,
  // otherwise take the midpoint of the feasible band. b = -multiplier.
  double rho;
  {
    double acc = 0.0;
    int n_free = 0;
    for (Eigen::Index t = 0; t < m; ++t) {
      if (z(t) > 0.0 && z(t) < c) {
        acc += sign(t) * grad(t);
        ++n_free;
      }
    }
    rho = n_free > 0 ? acc / n_free : 0.5 * (lower + upper);
  }

  Vector beta_full = z.head(n) - z.tail(n);
  Eigen::Index n_support = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (beta_full(i) != 0.0) ++n_support;
  }
  Matrix support(n_support, 2);
  Vector beta(n_support);
  Eigen::Index r = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (beta_full(i) == 0.0) continue;
    support.row(r) = points.row(i);
    beta(r) = beta_full(i);
    ++r;
  }
  return SvrModel(config, std::move(support), std::move(beta), -rho,
                  std::move(stats));
}

std::vector<KktViolation> svr_kkt_violations(const SvrModel& model,
                                             const Matrix& points,
                                             const Vector& targets) {
  if (points.rows() != targets.size()) {
    throw DataError("kkt audit points/targets size mismatch");
  }
  const double c = model.config().c;
  const double eps = model.config().epsilon;
  const double bound_eps = 1e-8 * c;

  std::vector<KktViolation> out;
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    const Vec2 x = points.row(i).transpose();
    // Recover this point's coefficient from the support set by location.
    double beta = 0.0;
    for (Eigen::Index s = 0; s < model.support_points().rows(); ++s) {
      if ((model.support_points().row(s).transpose() - x).norm() < 1e-12) {
        beta = model.beta()(s);
        break;
      }
    }
    const double residual = model.predict(x) - targets(i);

    double amount = 0.0;
    if (std::abs(beta) <= bound_eps) {
      amount = std::max(0.0, std::abs(residual) - eps);
    } else if (beta >= c - bound_eps) {
      amount = std::max(0.0, residual + eps);
    } else if (beta <= -c + bound_eps) {
      amount = std::max(0.0, eps - residual);
    } else if (beta > 0.0) {
      amount = std::abs(residual + eps);
    } else {
      amount = std::abs(residual - eps);
    }
    if (amount > model.config().tol) {
      out.push_back({static_cast<int>(i), amount});
    }
  }
  return out;
}

SvrConfig svr_grid_search(const SvrConfig& base, const SvrGrid& grid,
                          const Matrix& train_points, const Vector& train_y,
                          const Matrix& test_points, const Vector& test_y) {
  const auto values_or = [](const std::vector<double>& values,
                            double fallback) {
    return values.empty() ? std::vector<double>{fallback} : values;
  };
  const auto c_values = values_or(grid.c_values, base.c);
  const auto epsilon_values = values_or(grid.epsilon_values, base.epsilon);
  const auto sigma_values = values_or(grid.sigma_values, base.sigma);

  SvrConfig best = base;
  double best_rmse = std::numeric_limits<double>::infinity();
  for (const double c : c_values) {
    for (const double epsilon : epsilon_values) {
      for (const double sigma : sigma_values) {
        SvrConfig candidate = base;
        candidate.c = c;
        candidate.epsilon = epsilon;
        candidate.sigma = sigma;
        const SvrModel model = svr_fit(candidate, train_points, train_y);
        double sse = 0.0;
        for (Eigen::Index i = 0; i < test_points.rows(); ++i) {
          const double err =
              model.predict(test_points.row(i).transpose()) - test_y(i);
          sse += err * err;
        }
        const double rmse =
            std::sqrt(sse / static_cast<double>(test_points.rows()));
        if (rmse < best_rmse) {
          best_rmse = rmse;
          best = candidate;
        }
      }
    }
  }
  return best;
}

}  // namespace irmap
