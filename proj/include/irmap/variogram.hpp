#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "irmap/types.hpp"

namespace irmap {

enum class VariogramShape { Spherical, Exponential, Gaussian, PureNugget };

std::string to_string(VariogramShape shape);
VariogramShape variogram_shape_from_string(const std::string& name);

// gamma(0) = 0; for h > 0 the curve rises from `nugget` to nugget + sill.
// Exponential and Gaussian use the practical-range convention (factor 3).
struct VariogramModel {
  VariogramShape shape = VariogramShape::Spherical;
  double nugget = 0.0;
  double sill = 1.0;   // partial sill
  double range = 1.0;

  void validate() const;
  double operator()(double h) const;
};

double gamma(const VariogramModel& model, double h);

struct EmpiricalVariogram {
  struct Lag {
    double h_center = 0.0;
    double gamma_hat = 0.0;
    std::int64_t pair_count = 0;
  };
  std::vector<Lag> lags;  // all bins, centers strictly increasing
  double max_lag = 0.0;
  int n_bins = 0;
};

// Half the maximum pairwise distance, the default variography cutoff.
double default_max_lag(const Matrix& points);

// gamma_hat(h) = sum (Z_i - Z_j)^2 / (2 N(h)) over pairs binned by distance.
// Empty bins keep pair_count 0 and are skipped by the fit.
EmpiricalVariogram empirical_variogram(const Matrix& points,
                                       const Vector& values, int n_bins,
                                       double max_lag);
EmpiricalVariogram empirical_variogram(const Matrix& points,
                                       const Vector& values);

// Cressie-weighted squared error sum over non-empty bins, w_k = N_k / h_k^2.
double variogram_wls_objective(const EmpiricalVariogram& emp,
                               const VariogramModel& model);

// Weighted least squares over (nugget, sill, range): multi-start bounded
// Nelder-Mead plus a profiled polish (range search with the linear
// (nugget, sill) subproblem solved exactly). Bounds: nugget, sill in
// [0, 2 max gamma_hat], range in (0, 2 max_lag]. Needs >= 3 non-empty bins.
VariogramModel fit_variogram(const EmpiricalVariogram& emp,
                             VariogramShape shape);

}  // namespace irmap
