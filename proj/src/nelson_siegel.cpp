#include "irmap/nelson_siegel.hpp"

#include <cmath>

#include "irmap/calendar.hpp"
#include "irmap/rng.hpp"

namespace irmap {

void NsFactors::validate() const {
  if (!(lambda > 0.0)) throw ConfigError("ns factors: lambda must be positive");
}

double ns_rate(const NsFactors& factors, double maturity_months) {
  const double x = factors.lambda * maturity_months;
  if (x < 1e-12) return factors.beta0 + factors.beta1;  // analytic limit
  const double decay = std::exp(-x);
  const double loading = -std::expm1(-x) / x;  // (1 - e^{-x}) / x, stable
  return factors.beta0 + factors.beta1 * loading +
         factors.beta2 * (loading - decay);
}

namespace {

double drive_value(const FactorDrive& drive, int day, double prev, Rng& rng,
                   bool first) {
  switch (drive.mode) {
    case FactorDrive::Mode::Constant:
      return drive.start;
    case FactorDrive::Mode::Linear:
      return drive.start + drive.slope * day;
    case FactorDrive::Mode::Ar1:
      if (first) return drive.start;
      return drive.mean + drive.phi * (prev - drive.mean) +
             rng.normal(0.0, drive.shock_sd);
  }
  return drive.start;
}

}  // namespace

std::vector<NsFactors> generate_factor_paths(const FactorPathSpec& spec,
                                             int days, std::uint64_t seed) {
  if (days < 1) throw ConfigError("factor path needs at least 1 day");
  if (!(spec.lambda > 0.0)) throw ConfigError("lambda must be positive");
  Rng rng(seed);
  std::vector<NsFactors> path(days);
  NsFactors prev{};
  for (int d = 0; d < days; ++d) {
    NsFactors f;
    f.beta0 = drive_value(spec.beta0, d, prev.beta0, rng, d == 0);
    f.beta1 = drive_value(spec.beta1, d, prev.beta1, rng, d == 0);
    f.beta2 = drive_value(spec.beta2, d, prev.beta2, rng, d == 0);
    f.lambda = spec.lambda;
    path[d] = f;
    prev = f;
  }
  return path;
}

Dataset synthesize_panel(const std::vector<NsFactors>& factors_by_day,
                         const std::vector<Tenor>& tenors, double noise_sd,
                         std::uint64_t seed, const std::string& start_date) {
  if (factors_by_day.size() < 2) throw DataError("panel needs at least 2 days");
  if (tenors.size() < 2) throw DataError("panel needs at least 2 tenors");
  if (noise_sd < 0.0) throw ConfigError("noise_sd must be nonnegative");

  const long start_serial = parse_iso_date(start_date);
  Rng rng(seed);
  Dataset data;
  data.tenors = tenors;
  for (int d = 0; d < static_cast<int>(factors_by_day.size()); ++d) {
    data.dates.push_back(format_iso_date(start_serial + d));
    data.date_days.push_back(d);
    for (const auto& tenor : tenors) {
      const double noise = noise_sd > 0.0 ? rng.normal(0.0, noise_sd) : 0.0;
      data.observations.push_back(Observation{
          tenor.months, d, ns_rate(factors_by_day[d], tenor.months) + noise});
    }
  }
  data.scaling = compute_scaling(data.observations, 1.0);
  return data;
}

}  // namespace irmap
