#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "irmap/dataset.hpp"
#include "irmap/surface.hpp"
#include "irmap/types.hpp"

namespace irmap {

// Regular grid of predicted rates: values(i, j) is the rate at
// (days[i], maturities[j]); row 0 carries the smallest day index.
struct SurfaceGrid {
  Vector maturities;  // strictly increasing
  Vector days;        // strictly increasing
  Matrix values;      // days.size() x maturities.size()
  std::string model_tag;
};

// Evaluates the model at every grid node; no resampling or smoothing.
SurfaceGrid map_surface(const SurfaceModel& model, const Vector& maturities,
                        const Vector& days);

// In-sample curve at a fixed date; day must lie within the training span.
std::vector<std::pair<double, double>> reconstruct_curve(
    const SurfaceModel& model, double day_index,
    const std::vector<Tenor>& tenors);

struct ForecastSpec {
  int horizon_days = 31;
  double target_day = 0.0;  // must exceed the model's last training day
  std::vector<Tenor> tenors;
};

struct TenorForecast {
  std::string label;
  double months = 0.0;
  double rate = 0.0;
  std::optional<double> truth;
  std::optional<double> abs_error;
};

struct ForecastResult {
  double target_day = 0.0;
  std::vector<TenorForecast> rows;
  std::optional<double> mae;  // over rows with truth
};

// Out-of-sample curve at target_day (time-axis extrapolation). Truth cells
// are matched exactly by (day, tenor); no interpolation of truth.
ForecastResult forecast_curve(const SurfaceModel& model,
                              const ForecastSpec& spec,
                              const Dataset* truth = nullptr);

struct WalkForwardResult {
  int window_start = 0;
  int window_end = 0;      // exclusive
  double target_day = 0.0;  // window_end - 1 + horizon
  double max_train_day = 0.0;
  int n_scored = 0;  // tenors with truth at the target day
  double mae = 0.0;
  double rmse = 0.0;
};

// Train on each moving window, forecast horizon days past its end, score
// against the held-out truth. Windows whose target day has no observations
// are dropped. Per-window model seeds are spec.seed + window index.
std::vector<WalkForwardResult> walk_forward(const Dataset& data,
                                            const ModelSpec& spec,
                                            int window_days, int step_days,
                                            int horizon_days);

}  // namespace irmap
