#include "irmap/forecast.hpp"

#include <cmath>

#include "irmap/io_util.hpp"

namespace irmap {
namespace {

constexpr double kMatchTol = 1e-9;

void require_increasing(const Vector& axis, const char* name) {
  if (axis.size() == 0) {
    throw ConfigError(std::string(name) + " axis is empty");
  }
  for (Eigen::Index i = 1; i < axis.size(); ++i) {
    if (!(axis(i) > axis(i - 1))) {
      throw ConfigError(std::string(name) +
                        " axis must be strictly increasing");
    }
  }
}

}  // namespace

SurfaceGrid map_surface(const SurfaceModel& model, const Vector& maturities,
                        const Vector& days) {
  require_increasing(maturities, "maturity");
  require_increasing(days, "day");

  SurfaceGrid grid;
  grid.maturities = maturities;
  grid.days = days;
  grid.model_tag = model.tag();
  grid.values = Matrix(days.size(), maturities.size());
  for (Eigen::Index i = 0; i < days.size(); ++i) {
    for (Eigen::Index j = 0; j < maturities.size(); ++j) {
      grid.values(i, j) = model.predict(maturities(j), days(i));
    }
  }
  return grid;
}

std::vector<std::pair<double, double>> reconstruct_curve(
    const SurfaceModel& model, double day_index,
    const std::vector<Tenor>& tenors) {
  if (tenors.empty()) throw ConfigError("curve reconstruction needs tenors");
  if (day_index < 0.0 || day_index > model.max_training_day()) {
    throw ConfigError("curve day lies outside the training span");
  }
  std::vector<std::pair<double, double>> curve;
  curve.reserve(tenors.size());
  for (const auto& tenor : tenors) {
    curve.emplace_back(tenor.months, model.predict(tenor.months, day_index));
  }
  return curve;
}

ForecastResult forecast_curve(const SurfaceModel& model,
                              const ForecastSpec& spec, const Dataset* truth) {
  if (spec.tenors.empty()) throw ConfigError("forecast needs tenors");
  if (spec.horizon_days < 1) throw ConfigError("forecast horizon must be >= 1");
  if (!(spec.target_day > model.max_training_day())) {
    throw ConfigError("forecast day must lie beyond the training span");
  }

  ForecastResult result;
  result.target_day = spec.target_day;

  double abs_sum = 0.0;
  int n_scored = 0;
  for (const auto& tenor : spec.tenors) {
    TenorForecast row;
    row.label = tenor.label;
    row.months = tenor.months;
    row.rate = model.predict(tenor.months, spec.target_day);
    if (truth != nullptr) {
      for (const auto& obs : truth->observations) {
        if (std::abs(static_cast<double>(obs.day_index) - spec.target_day) <
                kMatchTol &&
            std::abs(obs.maturity_months - tenor.months) < kMatchTol) {
          row.truth = obs.rate;
          row.abs_error = std::abs(row.rate - obs.rate);
          abs_sum += *row.abs_error;
          ++n_scored;
          break;
        }
      }
    }
    result.rows.push_back(std::move(row));
  }
  if (n_scored > 0) result.mae = abs_sum / n_scored;
  return result;
}

std::vector<WalkForwardResult> walk_forward(const Dataset& data,
                                            const ModelSpec& spec,
                                            int window_days, int step_days,
                                            int horizon_days) {
  if (window_days < 30) throw ConfigError("window must be at least 30 days");
  if (step_days < 1) throw ConfigError("step must be at least 1 day");
  if (horizon_days < 1) throw ConfigError("horizon must be at least 1 day");
  if (data.observations.empty()) throw DataError("empty panel");

  // Same window bounds as moving_windows, kept here because scoring needs
  // the nominal [start, end) of each window, not just its observations.
  const int span = data.span_days();
  std::vector<std::pair<int, int>> bounds;
  if (window_days >= span) {
    bounds.emplace_back(0, span);
  } else {
    for (int start = 0; start + window_days <= span; start += step_days) {
      bounds.emplace_back(start, start + window_days);
    }
  }

  std::vector<WalkForwardResult> results;
  for (std::size_t k = 0; k < bounds.size(); ++k) {
    const auto [start, end] = bounds[k];
    const int target_day = end - 1 + horizon_days;

    std::vector<Tenor> scored_tenors;
    for (const auto& obs : data.observations) {
      if (obs.day_index != target_day) continue;
      bool seen = false;
      for (const auto& tenor : scored_tenors) {
        if (std::abs(tenor.months - obs.maturity_months) < kMatchTol) {
          seen = true;
          break;
        }
      }
      if (seen) continue;
      Tenor tenor;
      tenor.months = obs.maturity_months;
      tenor.label = fmt_double(obs.maturity_months);
      for (const auto& known : data.tenors) {
        if (std::abs(known.months - obs.maturity_months) < kMatchTol) {
          tenor.label = known.label;
          break;
        }
      }
      scored_tenors.push_back(std::move(tenor));
    }
    if (scored_tenors.empty()) continue;

    const Dataset window = data.subset_by_days(start, end);
    if (window.observations.empty()) continue;

    ModelSpec window_spec = spec;
    window_spec.seed = spec.seed + static_cast<std::uint64_t>(k);
    const auto model = fit_surface_model(window_spec, window);

    ForecastSpec forecast_spec;
    forecast_spec.horizon_days = horizon_days;
    forecast_spec.target_day = static_cast<double>(target_day);
    forecast_spec.tenors = scored_tenors;
    const ForecastResult forecast =
        forecast_curve(*model, forecast_spec, &data);

    WalkForwardResult row;
    row.window_start = start;
    row.window_end = end;
    row.target_day = forecast.target_day;
    row.max_train_day = model->max_training_day();
    double sq_sum = 0.0;
    double abs_sum = 0.0;
    for (const auto& cell : forecast.rows) {
      if (!cell.abs_error) continue;
      ++row.n_scored;
      abs_sum += *cell.abs_error;
      sq_sum += *cell.abs_error * *cell.abs_error;
    }
    if (row.n_scored == 0) continue;
    row.mae = abs_sum / row.n_scored;
    row.rmse = std::sqrt(sq_sum / row.n_scored);
    results.push_back(std::move(row));
  }
  return results;
}

}  // namespace irmap
