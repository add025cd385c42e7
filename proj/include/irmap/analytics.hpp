#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "irmap/dataset.hpp"
#include "irmap/types.hpp"
#include "irmap/variogram.hpp"

namespace irmap {

struct Metrics {
  double rmse = 0.0;
  double mae = 0.0;
  double bias = 0.0;  // mean(predicted - observed)
};

Metrics compute_metrics(const Vector& observed, const Vector& predicted);

enum class ResidualVerdict { PureNugget, Structured };

std::string to_string(ResidualVerdict verdict);

// Variography of model residuals: a good fit leaves spatially uncorrelated
// residuals, i.e. a fitted variogram that is (almost) all nugget.
struct ResidualReport {
  Matrix points;   // n x 2 scaled coordinates
  Vector residuals;  // observed - predicted
  double nugget_ratio = 1.0;  // nugget / (nugget + sill) of the best fit
  double residual_variance = 0.0;
  VariogramModel fit;
  EmpiricalVariogram empirical;
  ResidualVerdict verdict = ResidualVerdict::PureNugget;
};

// Verdict is PureNugget iff nugget_ratio >= threshold or the fitted range is
// below the smallest non-empty lag center. All-zero residuals short-circuit
// to PureNugget with ratio 1. Requires >= 30 residuals.
ResidualReport residual_nugget_check(const Matrix& points,
                                     const Vector& residuals,
                                     double threshold = 0.9);

// level = rate(10Y), slope = rate(10Y) - rate(3M),
// curvature = 2 rate(2Y) - rate(3M) - rate(10Y).
struct CurveFactors {
  double level = 0.0;
  double slope = 0.0;
  double curvature = 0.0;
};

// curve entries are (maturity months, rate); 3M, 2Y and 10Y must be present.
CurveFactors curve_factors(
    const std::vector<std::pair<double, double>>& curve);

struct StylizedFacts {
  std::vector<std::pair<double, double>> average_curve;  // months -> mean rate
  bool average_curve_increasing = false;  // strictly, across tenors
  bool average_curve_concave = false;     // nonincreasing divided differences
  std::vector<std::pair<double, double>> change_sd;  // months -> sd of changes
  std::optional<bool> short_end_more_volatile;  // sd(1M) > sd(10Y)
  std::optional<int> inversion_count;           // days with rate(1W) > rate(1M)
  int n_dates = 0;
};

// Requires >= 30 dates. The volatility and inversion entries are empty when
// the panel lacks the tenors they compare.
StylizedFacts stylized_facts(const Dataset& data);

// Pearson correlations of rate levels between tenor series over their common
// dates; symmetric with unit diagonal. Constant or too-short series produce
// NaN markers. Requires >= 3 dates.
Matrix correlation_matrix(const Dataset& data);

}  // namespace irmap
