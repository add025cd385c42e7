#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "irmap/dataset.hpp"

namespace irmap {

// Three-factor parametric curve: level, short-term and medium-term factors
// with exponential decay lambda (per month).
struct NsFactors {
  double beta0 = 0.0;  // level
  double beta1 = 0.0;  // short-term
  double beta2 = 0.0;  // medium-term
  double lambda = 0.0609;

  void validate() const;  // lambda > 0
};

// rate = b0 + b1 (1-e^{-x})/x + b2 ((1-e^{-x})/x - e^{-x}), x = lambda*tau.
// The tau -> 0 limit evaluates analytically to b0 + b1.
double ns_rate(const NsFactors& factors, double maturity_months);

// One scalar factor path over panel days.
struct FactorDrive {
  enum class Mode { Constant, Linear, Ar1 };
  Mode mode = Mode::Constant;
  double start = 0.0;
  double slope = 0.0;     // per day (Linear)
  double mean = 0.0;      // long-run mean (Ar1)
  double phi = 0.0;       // persistence (Ar1)
  double shock_sd = 0.0;  // innovation sd (Ar1)
};

struct FactorPathSpec {
  FactorDrive beta0;
  FactorDrive beta1;
  FactorDrive beta2;
  double lambda = 0.0609;
};

// Deterministic per seed; Ar1 components draw from a dedicated stream.
std::vector<NsFactors> generate_factor_paths(const FactorPathSpec& spec,
                                             int days, std::uint64_t seed);

// Synthetic panel: rate(d, tau) = ns_rate(factors[d], tau) + N(0, noise_sd^2),
// on consecutive calendar days starting at start_date.
Dataset synthesize_panel(const std::vector<NsFactors>& factors_by_day,
                         const std::vector<Tenor>& tenors, double noise_sd,
                         std::uint64_t seed,
                         const std::string& start_date = "2000-01-03");

}  // namespace irmap
