#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "irmap/tenor.hpp"
#include "irmap/types.hpp"

namespace irmap {

// One rate sample in the {maturity, time} feature space.
struct Observation {
  double maturity_months = 0.0;
  int day_index = 0;   // calendar days since the panel start
  double rate = 0.0;   // percent per annum
};

// Min-max scaling of both axes to [0,1] before any distance computation;
// anisotropy multiplies the scaled time axis. Every model downstream measures
// Euclidean distance in the scaled (u, v) plane. Points outside the fitted
// box extrapolate linearly.
struct ScalingSpec {
  double x_min = 0.0, x_max = 1.0;
  double y_min = 0.0, y_max = 1.0;
  double anisotropy = 1.0;

  void validate() const;  // throws ConfigError
  Vec2 embed(double maturity_months, double day_index) const;
  Vec2 embed(const Observation& obs) const;
};

bool scaling_close(const ScalingSpec& a, const ScalingSpec& b, double tol = 1e-9);

// Ordered observation collection plus its tenor/date axes and scaling.
// Immutable after construction; all operations on it are pure.
struct Dataset {
  std::vector<Observation> observations;
  std::vector<Tenor> tenors;
  std::vector<std::string> dates;  // ISO-8601, ascending
  std::vector<int> date_days;      // day_index of each date
  ScalingSpec scaling;

  int span_days() const;  // last day_index + 1, 0 when empty
  Matrix embedded_points() const;
  Matrix embedded_points(const std::vector<int>& indices) const;
  Vector rate_vector() const;
  Vector rate_vector(const std::vector<int>& indices) const;

  // Observations with day_index in [begin_day, end_day); the view recomputes
  // its own min-max scaling, keeping the parent anisotropy.
  Dataset subset_by_days(int begin_day, int end_day) const;
};

// Min-max over the observations; a degenerate axis widens to unit span.
ScalingSpec compute_scaling(const std::vector<Observation>& obs,
                            double anisotropy = 1.0);

struct SplitIndices {
  std::vector<int> train;
  std::vector<int> test;
  std::uint64_t seed = 0;
};

// Random partition with |train| = round(0.8 n); requires n >= 5.
SplitIndices split_80_20(std::size_t n, std::uint64_t seed);

// Half-open day windows [k*step, k*step + window) that fit inside the panel
// span. A window longer than the span yields the whole panel as one window.
std::vector<Dataset> moving_windows(const Dataset& data, int window_days,
                                    int step_days);

}  // namespace irmap
