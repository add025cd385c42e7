#include "irmap/variogram.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "irmap/nelder_mead.hpp"

namespace irmap {
namespace {

// Unit-sill, zero-nugget shape value at lag h for range a.
double shape_basis(VariogramShape shape, double h, double a) {
  switch (shape) {
    case VariogramShape::Spherical: {
      if (h >= a) return 1.0;
      const double r = h / a;
      return 1.5 * r - 0.5 * r * r * r;
    }
    case VariogramShape::Exponential:
      return 1.0 - std::exp(-3.0 * h / a);
    case VariogramShape::Gaussian:
      return 1.0 - std::exp(-3.0 * h * h / (a * a));
    case VariogramShape::PureNugget:
      return 0.0;
  }
  return 0.0;
}

struct LagView {
  double h = 0.0;
  double gamma_hat = 0.0;
  double weight = 0.0;  // Cressie: N(h) / h^2
};

std::vector<LagView> nonempty_lags(const EmpiricalVariogram& emp) {
  std::vector<LagView> out;
  out.reserve(emp.lags.size());
  for (const auto& lag : emp.lags) {
    if (lag.pair_count <= 0) continue;
    const double h2 = lag.h_center * lag.h_center;
    LagView v;
    v.h = lag.h_center;
    v.gamma_hat = lag.gamma_hat;
    v.weight = h2 > 0.0 ? static_cast<double>(lag.pair_count) / h2
                        : static_cast<double>(lag.pair_count);
    out.push_back(v);
  }
  return out;
}

double wls(const std::vector<LagView>& lags, VariogramShape shape,
           double nugget, double sill, double range) {
  double total = 0.0;
  for (const auto& lag : lags) {
    const double model = nugget + sill * shape_basis(shape, lag.h, range);
    const double err = lag.gamma_hat - model;
    total += lag.weight * err * err;
  }
  return total;
}

struct LinearFit {
  double nugget = 0.0;
  double sill = 0.0;
  double value = 0.0;
};

// Exact weighted least squares for (nugget, sill) at a fixed range, subject
// to box bounds [0, ub] on both. The unconstrained optimum is checked first;
// otherwise each edge of the box is solved and the best feasible point wins.
LinearFit profile_linear(const std::vector<LagView>& lags,
                         VariogramShape shape, double range, double ub) {
  double sw = 0.0, swg = 0.0, swgg = 0.0, swy = 0.0, swgy = 0.0;
  for (const auto& lag : lags) {
    const double g = shape_basis(shape, lag.h, range);
    sw += lag.weight;
    swg += lag.weight * g;
    swgg += lag.weight * g * g;
    swy += lag.weight * lag.gamma_hat;
    swgy += lag.weight * g * lag.gamma_hat;
  }

  const auto clamp = [ub](double v) { return std::clamp(v, 0.0, ub); };
  std::vector<std::pair<double, double>> candidates;

  const double det = sw * swgg - swg * swg;
  if (std::abs(det) > 1e-14 * std::max(1.0, sw * swgg)) {
    const double nugget = (swy * swgg - swg * swgy) / det;
    const double sill = (sw * swgy - swg * swy) / det;
    candidates.emplace_back(nugget, sill);
  }
  // Edges: nugget fixed at 0 or ub, sill free; and the transpose.
  for (const double n_fixed : {0.0, ub}) {
    const double sill = swgg > 0.0 ? (swgy - n_fixed * swg) / swgg : 0.0;
    candidates.emplace_back(n_fixed, sill);
  }
  for (const double s_fixed : {0.0, ub}) {
    const double nugget = sw > 0.0 ? (swy - s_fixed * swg) / sw : 0.0;
    candidates.emplace_back(nugget, s_fixed);
  }

  LinearFit best;
  best.value = std::numeric_limits<double>::infinity();
  for (const auto& [n_raw, s_raw] : candidates) {
    const double nugget = clamp(n_raw);
    const double sill = clamp(s_raw);
    const double value = wls(lags, shape, nugget, sill, range);
    if (value < best.value) {
      best = {nugget, sill, value};
    }
  }
  return best;
}

// Golden-section minimization of f over [lo, hi].
double golden_section(const std::function<double(double)>& f, double lo,
                      double hi, int iterations = 80) {
  const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - phi * (b - a);
  double d = a + phi * (b - a);
  double fc = f(c), fd = f(d);
  for (int i = 0; i < iterations && (b - a) > 1e-12 * (hi - lo); ++i) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + phi * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

}  // namespace

std::string to_string(VariogramShape shape) {
  switch (shape) {
    case VariogramShape::Spherical:
      return "spherical";
    case VariogramShape::Exponential:
      return "exponential";
    case VariogramShape::Gaussian:
      return "gaussian";
    case VariogramShape::PureNugget:
      return "pure_nugget";
  }
  return "spherical";
}

VariogramShape variogram_shape_from_string(const std::string& name) {
  if (name == "spherical") return VariogramShape::Spherical;
  if (name == "exponential") return VariogramShape::Exponential;
  if (name == "gaussian") return VariogramShape::Gaussian;
  if (name == "pure_nugget") return VariogramShape::PureNugget;
  throw ConfigError("unknown variogram shape: " + name);
}

void VariogramModel::validate() const {
  if (!(nugget >= 0.0) || !std::isfinite(nugget)) {
    throw ConfigError("variogram nugget must be >= 0");
  }
  if (!(sill >= 0.0) || !std::isfinite(sill)) {
    throw ConfigError("variogram sill must be >= 0");
  }
  if (shape != VariogramShape::PureNugget &&
      (!(range > 0.0) || !std::isfinite(range))) {
    throw ConfigError("variogram range must be > 0");
  }
}

double VariogramModel::operator()(double h) const {
  if (h <= 0.0) return 0.0;
  return nugget + sill * shape_basis(shape, h, range);
}

double gamma(const VariogramModel& model, double h) { return model(h); }

double default_max_lag(const Matrix& points) {
  const Eigen::Index n = points.rows();
  double max_dist = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      max_dist = std::max(max_dist, (points.row(i) - points.row(j)).norm());
    }
  }
  return 0.5 * max_dist;
}

EmpiricalVariogram empirical_variogram(const Matrix& points,
                                       const Vector& values, int n_bins,
                                       double max_lag) {
  const Eigen::Index n = points.rows();
  if (n < 2) throw DataError("variography needs at least two points");
  if (values.size() != n) {
    throw DataError("variography points/values size mismatch");
  }
  if (n_bins < 1) throw ConfigError("variogram bin count must be >= 1");
  if (!(max_lag > 0.0)) throw ConfigError("variogram max lag must be > 0");

  const double width = max_lag / n_bins;
  std::vector<double> sums(static_cast<std::size_t>(n_bins), 0.0);
  std::vector<std::int64_t> counts(static_cast<std::size_t>(n_bins), 0);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double d = (points.row(i) - points.row(j)).norm();
      if (d > max_lag) continue;
      const int bin = std::min(static_cast<int>(d / width), n_bins - 1);
      const double diff = values(i) - values(j);
      sums[static_cast<std::size_t>(bin)] += diff * diff;
      ++counts[static_cast<std::size_t>(bin)];
    }
  }

  EmpiricalVariogram emp;
  emp.max_lag = max_lag;
  emp.n_bins = n_bins;
  emp.lags.resize(static_cast<std::size_t>(n_bins));
  for (int k = 0; k < n_bins; ++k) {
    auto& lag = emp.lags[static_cast<std::size_t>(k)];
    lag.h_center = (k + 0.5) * width;
    lag.pair_count = counts[static_cast<std::size_t>(k)];
    lag.gamma_hat = lag.pair_count > 0
                        ? sums[static_cast<std::size_t>(k)] /
                              (2.0 * static_cast<double>(lag.pair_count))
                        : 0.0;
  }
  return emp;
}

EmpiricalVariogram empirical_variogram(const Matrix& points,
                                       const Vector& values) {
  const double max_lag = default_max_lag(points);
  if (!(max_lag > 0.0)) {
    throw DataError("variography needs at least two distinct points");
  }
  return empirical_variogram(points, values, 15, max_lag);
}

double variogram_wls_objective(const EmpiricalVariogram& emp,
                               const VariogramModel& model) {
  return wls(nonempty_lags(emp), model.shape, model.nugget, model.sill,
             model.range);
}

VariogramModel fit_variogram(const EmpiricalVariogram& emp,
                             VariogramShape shape) {
  const auto lags = nonempty_lags(emp);

  double max_gamma = 0.0;
  for (const auto& lag : lags) max_gamma = std::max(max_gamma, lag.gamma_hat);

  const double range_lb = 1e-3 * emp.max_lag;
  const double range_ub = 2.0 * emp.max_lag;

  if (shape == VariogramShape::PureNugget) {
    if (lags.empty()) throw FitError("variogram fit has no populated lags");
    double sw = 0.0, swy = 0.0;
    for (const auto& lag : lags) {
      sw += lag.weight;
      swy += lag.weight * lag.gamma_hat;
    }
    VariogramModel model;
    model.shape = shape;
    model.nugget = std::clamp(sw > 0.0 ? swy / sw : 0.0, 0.0, 2.0 * max_gamma);
    model.sill = 0.0;
    model.range = emp.max_lag;
    return model;
  }

  if (lags.size() < 3) {
    throw FitError("variogram fit needs at least three populated lags");
  }

  if (max_gamma <= 0.0) {
    // Constant field: every empirical value is zero.
    VariogramModel model;
    model.shape = shape;
    model.nugget = 0.0;
    model.sill = 0.0;
    model.range = range_lb;
    return model;
  }

  const double param_ub = 2.0 * max_gamma;
  const auto profile = [&](double range) {
    const double a = std::clamp(range, range_lb, range_ub);
    return profile_linear(lags, shape, a, param_ub).value;
  };

  // Coarse scan over range, then golden-section polish in the best brackets.
  const int grid_n = 64;
  std::vector<std::pair<double, double>> scan;  // (objective, range)
  scan.reserve(static_cast<std::size_t>(grid_n));
  for (int i = 0; i < grid_n; ++i) {
    const double a =
        range_lb + (range_ub - range_lb) * (i + 0.5) / grid_n;
    scan.emplace_back(profile(a), a);
  }

  double best_range = range_lb;
  double best_value = std::numeric_limits<double>::infinity();
  std::vector<std::size_t> order(scan.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return scan[a].first < scan[b].first;
  });
  const double step = (range_ub - range_lb) / grid_n;
  for (std::size_t rank = 0; rank < std::min<std::size_t>(3, order.size());
       ++rank) {
    const double center = scan[order[rank]].second;
    const double lo = std::max(range_lb, center - step);
    const double hi = std::min(range_ub, center + step);
    const double polished = golden_section(profile, lo, hi);
    const double value = profile(polished);
    if (value < best_value) {
      best_value = value;
      best_range = polished;
    }
  }

  LinearFit linear = profile_linear(lags, shape, best_range, param_ub);
  VariogramModel best;
  best.shape = shape;
  best.nugget = linear.nugget;
  best.sill = linear.sill;
  best.range = best_range;
  best_value = linear.value;

  // Joint Nelder-Mead refinement from several seeds; out-of-bounds points
  // are clamped with a quadratic penalty so the simplex stays honest.
  const auto penalized = [&](const Vector& x) {
    const double nugget = std::clamp(x(0), 0.0, param_ub);
    const double sill = std::clamp(x(1), 0.0, param_ub);
    const double range = std::clamp(x(2), range_lb, range_ub);
    const double violation = (x(0) - nugget) * (x(0) - nugget) +
                             (x(1) - sill) * (x(1) - sill) +
                             (x(2) - range) * (x(2) - range);
    return wls(lags, shape, nugget, sill, range) +
           1e3 * (1.0 + max_gamma * max_gamma) * violation;
  };

  std::vector<Vector> seeds;
  {
    Vector s(3);
    s << best.nugget, best.sill, best.range;
    seeds.push_back(s);
    s << 0.0, max_gamma, 0.5 * emp.max_lag;
    seeds.push_back(s);
    s << 0.5 * max_gamma, 0.5 * max_gamma, emp.max_lag;
    seeds.push_back(s);
  }
  for (const auto& seed : seeds) {
    const auto result =
        nelder_mead(penalized, seed, 0.1 * std::max(max_gamma, emp.max_lag));
    const double nugget = std::clamp(result.x(0), 0.0, param_ub);
    const double sill = std::clamp(result.x(1), 0.0, param_ub);
    const double range = std::clamp(result.x(2), range_lb, range_ub);
    // Re-profile the linear pair at the proposed range before comparing.
    const LinearFit refit = profile_linear(lags, shape, range, param_ub);
    const double direct = wls(lags, shape, nugget, sill, range);
    if (refit.value < best_value) {
      best_value = refit.value;
      best.nugget = refit.nugget;
      best.sill = refit.sill;
      best.range = range;
    }
    if (direct < best_value) {
      best_value = direct;
      best.nugget = nugget;
      best.sill = sill;
      best.range = range;
    }
  }

  return best;
}

}  // namespace irmap
