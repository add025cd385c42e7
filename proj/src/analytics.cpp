#include "irmap/analytics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

namespace irmap {
namespace {

constexpr double kTenorMatchTol = 1e-9;

// Residual variography uses a coarser lag layout than the general-purpose
// 15-bin default: Cressie weights N/h^2 make the shortest lag dominate the
// fit, so the verdict is only as stable as the first bin's pair count. Ten
// bins keep that count high at desk-scale panels (several hundred to a few
// thousand residuals) without losing the shape of genuinely structured
// variograms.
constexpr int kResidualVariogramBins = 10;

// Rate level for a maturity, or nothing when that tenor is absent.
std::optional<double> rate_at(
    const std::vector<std::pair<double, double>>& curve, double months) {
  for (const auto& [m, rate] : curve) {
    if (std::abs(m - months) < kTenorMatchTol) return rate;
  }
  return std::nullopt;
}

// Column-per-tenor level matrix over dates; NaN marks missing cells.
Matrix level_table(const Dataset& data, std::vector<double>& months_out) {
  std::map<double, int> month_to_col;
  for (const auto& tenor : data.tenors) {
    month_to_col.emplace(tenor.months, 0);
  }
  for (const auto& obs : data.observations) {
    month_to_col.emplace(obs.maturity_months, 0);
  }
  months_out.clear();
  int col = 0;
  for (auto& [months, index] : month_to_col) {
    index = col++;
    months_out.push_back(months);
  }

  std::map<int, int> day_to_row;
  for (const auto& obs : data.observations) day_to_row.emplace(obs.day_index, 0);
  int row = 0;
  for (auto& [day, index] : day_to_row) index = row++;

  Matrix table = Matrix::Constant(row, col,
                                  std::numeric_limits<double>::quiet_NaN());
  for (const auto& obs : data.observations) {
    table(day_to_row.at(obs.day_index), month_to_col.at(obs.maturity_months)) =
        obs.rate;
  }
  return table;
}

}  // namespace

Metrics compute_metrics(const Vector& observed, const Vector& predicted) {
  if (observed.size() != predicted.size() || observed.size() == 0) {
    throw DataError("metrics need matching non-empty vectors");
  }
  const Vector err = predicted - observed;
  Metrics m;
  m.rmse = std::sqrt(err.squaredNorm() / static_cast<double>(err.size()));
  m.mae = err.cwiseAbs().mean();
  m.bias = err.mean();
  return m;
}

std::string to_string(ResidualVerdict verdict) {
  return verdict == ResidualVerdict::PureNugget ? "pure_nugget" : "structured";
}

ResidualReport residual_nugget_check(const Matrix& points,
                                     const Vector& residuals,
                                     double threshold) {
  if (points.rows() < 30) {
    throw DataError("residual variography needs at least 30 residuals");
  }
  if (points.rows() != residuals.size()) {
    throw DataError("residual points/values size mismatch");
  }
  if (!(threshold > 0.0 && threshold <= 1.0)) {
    throw ConfigError("nugget ratio threshold must be in (0, 1]");
  }

  ResidualReport report;
  report.points = points;
  report.residuals = residuals;
  report.residual_variance =
      (residuals.array() - residuals.mean()).square().sum() /
      static_cast<double>(residuals.size());

  report.empirical = empirical_variogram(points, residuals,
                                         kResidualVariogramBins,
                                         default_max_lag(points));

  // Best WLS fit across every standard shape; ties keep the earlier entry,
  // so degenerate all-zero variograms report as spherical.
  double best_objective = std::numeric_limits<double>::infinity();
  for (auto shape : {VariogramShape::Spherical, VariogramShape::Exponential,
                     VariogramShape::Gaussian, VariogramShape::PureNugget}) {
    const auto fit = fit_variogram(report.empirical, shape);
    const double objective = variogram_wls_objective(report.empirical, fit);
    if (objective < best_objective) {
      best_objective = objective;
      report.fit = fit;
    }
  }

  const double total = report.fit.nugget + report.fit.sill;
  report.nugget_ratio = total > 0.0 ? report.fit.nugget / total : 1.0;

  double first_lag = std::numeric_limits<double>::infinity();
  for (const auto& lag : report.empirical.lags) {
    if (lag.pair_count > 0) {
      first_lag = lag.h_center;
      break;
    }
  }
  report.verdict = (report.nugget_ratio >= threshold ||
                    report.fit.range < first_lag)
                       ? ResidualVerdict::PureNugget
                       : ResidualVerdict::Structured;
  return report;
}

CurveFactors curve_factors(
    const std::vector<std::pair<double, double>>& curve) {
  const auto r3m = rate_at(curve, 3.0);
  const auto r2y = rate_at(curve, 24.0);
  const auto r10y = rate_at(curve, 120.0);
  if (!r3m || !r2y || !r10y) {
    throw DataError("curve factors need the 3M, 2Y and 10Y tenors");
  }
  CurveFactors f;
  f.level = *r10y;
  f.slope = *r10y - *r3m;
  f.curvature = 2.0 * *r2y - *r3m - *r10y;
  return f;
}

StylizedFacts stylized_facts(const Dataset& data) {
  std::vector<double> months;
  const Matrix table = level_table(data, months);
  const Eigen::Index n_dates = table.rows();
  if (n_dates < 30) throw DataError("stylized facts need at least 30 dates");

  StylizedFacts facts;
  facts.n_dates = static_cast<int>(n_dates);

  for (std::size_t c = 0; c < months.size(); ++c) {
    double total = 0.0;
    Eigen::Index count = 0;
    for (Eigen::Index r = 0; r < n_dates; ++r) {
      const double v = table(r, static_cast<Eigen::Index>(c));
      if (std::isnan(v)) continue;
      total += v;
      ++count;
    }
    if (count > 0) {
      facts.average_curve.emplace_back(months[c],
                                       total / static_cast<double>(count));
    }
  }

  // Strict increase across tenors, and concavity as nonincreasing slopes of
  // consecutive chords (tenor spacing is uneven, so raw differences mislead).
  facts.average_curve_increasing = facts.average_curve.size() >= 2;
  for (std::size_t i = 1; i < facts.average_curve.size(); ++i) {
    if (facts.average_curve[i].second <= facts.average_curve[i - 1].second) {
      facts.average_curve_increasing = false;
      break;
    }
  }
  facts.average_curve_concave = facts.average_curve.size() >= 3;
  for (std::size_t i = 2; i < facts.average_curve.size(); ++i) {
    const auto& [m0, r0] = facts.average_curve[i - 2];
    const auto& [m1, r1] = facts.average_curve[i - 1];
    const auto& [m2, r2] = facts.average_curve[i];
    const double slope_a = (r1 - r0) / (m1 - m0);
    const double slope_b = (r2 - r1) / (m2 - m1);
    if (slope_b > slope_a + 1e-12) {
      facts.average_curve_concave = false;
      break;
    }
  }

  for (std::size_t c = 0; c < months.size(); ++c) {
    std::vector<double> changes;
    for (Eigen::Index r = 1; r < n_dates; ++r) {
      const double a = table(r - 1, static_cast<Eigen::Index>(c));
      const double b = table(r, static_cast<Eigen::Index>(c));
      if (std::isnan(a) || std::isnan(b)) continue;
      changes.push_back(b - a);
    }
    if (changes.size() < 2) continue;
    double mean = 0.0;
    for (const double v : changes) mean += v;
    mean /= static_cast<double>(changes.size());
    double var = 0.0;
    for (const double v : changes) var += (v - mean) * (v - mean);
    var /= static_cast<double>(changes.size() - 1);
    facts.change_sd.emplace_back(months[c], std::sqrt(var));
  }

  const auto sd_at = [&](double m) -> std::optional<double> {
    for (const auto& [months_c, sd] : facts.change_sd) {
      if (std::abs(months_c - m) < kTenorMatchTol) return sd;
    }
    return std::nullopt;
  };
  const auto sd_1m = sd_at(1.0);
  const auto sd_10y = sd_at(120.0);
  if (sd_1m && sd_10y) {
    facts.short_end_more_volatile = *sd_1m > *sd_10y;
  }

  const double week_months = 12.0 / 52.0;
  int col_1w = -1, col_1m = -1;
  for (std::size_t c = 0; c < months.size(); ++c) {
    if (std::abs(months[c] - week_months) < kTenorMatchTol) {
      col_1w = static_cast<int>(c);
    }
    if (std::abs(months[c] - 1.0) < kTenorMatchTol) col_1m = static_cast<int>(c);
  }
  if (col_1w >= 0 && col_1m >= 0) {
    int inversions = 0;
    for (Eigen::Index r = 0; r < n_dates; ++r) {
      const double a = table(r, col_1w);
      const double b = table(r, col_1m);
      if (std::isnan(a) || std::isnan(b)) continue;
      if (a > b) ++inversions;
    }
    facts.inversion_count = inversions;
  }
  return facts;
}

Matrix correlation_matrix(const Dataset& data) {
  std::vector<double> months;
  const Matrix table = level_table(data, months);
  if (table.rows() < 3) {
    throw DataError("correlation matrix needs at least 3 dates");
  }
  const Eigen::Index k = table.cols();
  Matrix corr = Matrix::Constant(k, k, std::numeric_limits<double>::quiet_NaN());

  for (Eigen::Index a = 0; a < k; ++a) {
    for (Eigen::Index b = a; b < k; ++b) {
      std::vector<std::pair<double, double>> pairs;
      for (Eigen::Index r = 0; r < table.rows(); ++r) {
        const double va = table(r, a);
        const double vb = table(r, b);
        if (std::isnan(va) || std::isnan(vb)) continue;
        pairs.emplace_back(va, vb);
      }
      if (pairs.size() < 3) continue;
      double mean_a = 0.0, mean_b = 0.0;
      for (const auto& [va, vb] : pairs) {
        mean_a += va;
        mean_b += vb;
      }
      mean_a /= static_cast<double>(pairs.size());
      mean_b /= static_cast<double>(pairs.size());
      double cov = 0.0, var_a = 0.0, var_b = 0.0;
      for (const auto& [va, vb] : pairs) {
        cov += (va - mean_a) * (vb - mean_b);
        var_a += (va - mean_a) * (va - mean_a);
        var_b += (vb - mean_b) * (vb - mean_b);
      }
      if (var_a <= 0.0 || var_b <= 0.0) continue;  // constant series: NaN
      const double r = cov / std::sqrt(var_a * var_b);
      corr(a, b) = r;
      corr(b, a) = r;
    }
    if (!std::isnan(corr(a, a))) corr(a, a) = 1.0;
  }
  return corr;
}

}  // namespace irmap
