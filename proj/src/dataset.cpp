#include "irmap/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "irmap/rng.hpp"

namespace irmap {

void ScalingSpec::validate() const {
  if (!(x_max > x_min)) throw ConfigError("scaling: x_max must exceed x_min");
  if (!(y_max > y_min)) throw ConfigError("scaling: y_max must exceed y_min");
  if (!(anisotropy > 0.0)) throw ConfigError("scaling: anisotropy must be positive");
}

Vec2 ScalingSpec::embed(double maturity_months, double day_index) const {
  const double u = (maturity_months - x_min) / (x_max - x_min);
  const double v = anisotropy * (day_index - y_min) / (y_max - y_min);
  return Vec2(u, v);
}

Vec2 ScalingSpec::embed(const Observation& obs) const {
  return embed(obs.maturity_months, static_cast<double>(obs.day_index));
}

bool scaling_close(const ScalingSpec& a, const ScalingSpec& b, double tol) {
  return std::abs(a.x_min - b.x_min) <= tol &&
         std::abs(a.x_max - b.x_max) <= tol &&
         std::abs(a.y_min - b.y_min) <= tol &&
         std::abs(a.y_max - b.y_max) <= tol &&
         std::abs(a.anisotropy - b.anisotropy) <= tol;
}

int Dataset::span_days() const {
  int last = -1;
  for (const auto& obs : observations) last = std::max(last, obs.day_index);
  return last + 1;
}

Matrix Dataset::embedded_points() const {
  Matrix pts(observations.size(), 2);
  for (std::size_t i = 0; i < observations.size(); ++i) {
    pts.row(i) = scaling.embed(observations[i]).transpose();
  }
  return pts;
}

Matrix Dataset::embedded_points(const std::vector<int>& indices) const {
  Matrix pts(indices.size(), 2);
  for (std::size_t i = 0; i < indices.size(); ++i) {
    pts.row(i) = scaling.embed(observations[indices[i]]).transpose();
  }
  return pts;
}

Vector Dataset::rate_vector() const {
  Vector r(observations.size());
  for (std::size_t i = 0; i < observations.size(); ++i) r(i) = observations[i].rate;
  return r;
}

Vector Dataset::rate_vector(const std::vector<int>& indices) const {
  Vector r(indices.size());
  for (std::size_t i = 0; i < indices.size(); ++i) {
    r(i) = observations[indices[i]].rate;
  }
  return r;
}

Dataset Dataset::subset_by_days(int begin_day, int end_day) const {
  Dataset view;
  view.tenors = tenors;
  view.scaling.anisotropy = scaling.anisotropy;
  for (std::size_t i = 0; i < dates.size(); ++i) {
    if (date_days[i] >= begin_day && date_days[i] < end_day) {
      view.dates.push_back(dates[i]);
      view.date_days.push_back(date_days[i]);
    }
  }
  for (const auto& obs : observations) {
    if (obs.day_index >= begin_day && obs.day_index < end_day) {
      view.observations.push_back(obs);
    }
  }
  if (!view.observations.empty()) {
    view.scaling = compute_scaling(view.observations, scaling.anisotropy);
  }
  return view;
}

ScalingSpec compute_scaling(const std::vector<Observation>& obs,
                            double anisotropy) {
  if (obs.empty()) throw DataError("cannot compute scaling of an empty panel");
  ScalingSpec spec;
  spec.anisotropy = anisotropy;
  spec.x_min = spec.x_max = obs.front().maturity_months;
  spec.y_min = spec.y_max = static_cast<double>(obs.front().day_index);
  for (const auto& o : obs) {
    spec.x_min = std::min(spec.x_min, o.maturity_months);
    spec.x_max = std::max(spec.x_max, o.maturity_months);
    spec.y_min = std::min(spec.y_min, static_cast<double>(o.day_index));
    spec.y_max = std::max(spec.y_max, static_cast<double>(o.day_index));
  }
  // A degenerate axis (single tenor or date) widens to unit span so the
  // embedding stays defined.
  if (spec.x_max <= spec.x_min) spec.x_max = spec.x_min + 1.0;
  if (spec.y_max <= spec.y_min) spec.y_max = spec.y_min + 1.0;
  spec.validate();
  return spec;
}

SplitIndices split_80_20(std::size_t n, std::uint64_t seed) {
  if (n < 5) throw DataError("split_80_20 needs at least 5 observations");
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  Rng rng(seed);
  rng.shuffle(order);

  // round(0.8 n) without floating point; 0.8 n is never an exact half.
  const std::size_t n_train = (4 * n + 2) / 5;

  SplitIndices split;
  split.seed = seed;
  split.train.assign(order.begin(), order.begin() + n_train);
  split.test.assign(order.begin() + n_train, order.end());
  std::sort(split.train.begin(), split.train.end());
  std::sort(split.test.begin(), split.test.end());
  return split;
}

std::vector<Dataset> moving_windows(const Dataset& data, int window_days,
                                    int step_days) {
  if (window_days < 30) throw ConfigError("window must be at least 30 days");
  if (step_days < 1) throw ConfigError("step must be at least 1 day");
  if (data.observations.empty()) throw DataError("empty panel");

  const int span = data.span_days();
  std::vector<Dataset> windows;
  if (window_days >= span) {
    windows.push_back(data.subset_by_days(0, span));
    return windows;
  }
  for (int start = 0; start + window_days <= span; start += step_days) {
    Dataset view = data.subset_by_days(start, start + window_days);
    if (!view.observations.empty()) windows.push_back(std::move(view));
  }
  return windows;
}

}  // namespace irmap
