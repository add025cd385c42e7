#include <cmath>
#include <vector>

#include <doctest.h>

#include "irmap/rng.hpp"
#include "irmap/types.hpp"
#include "irmap/variogram.hpp"

using namespace irmap;

namespace {

Matrix random_points(int n, std::uint64_t seed) {
  Rng rng(seed);
  Matrix pts(n, 2);
  for (int i = 0; i < n; ++i) {
    pts(i, 0) = rng.uniform();
    pts(i, 1) = rng.uniform();
  }
  return pts;
}

// Noiseless empirical variogram sampled straight from a model curve.
EmpiricalVariogram sample_curve(const VariogramModel& model, int n_lags,
                                double max_lag) {
  EmpiricalVariogram emp;
  emp.max_lag = max_lag;
  emp.n_bins = n_lags;
  const double width = max_lag / n_lags;
  for (int k = 0; k < n_lags; ++k) {
    EmpiricalVariogram::Lag lag;
    lag.h_center = (k + 0.5) * width;
    lag.gamma_hat = model(lag.h_center);
    lag.pair_count = 100;
    emp.lags.push_back(lag);
  }
  return emp;
}

}  // namespace

TEST_CASE("variogram shape names round-trip") {
  for (const auto shape :
       {VariogramShape::Spherical, VariogramShape::Exponential,
        VariogramShape::Gaussian, VariogramShape::PureNugget}) {
    CHECK(variogram_shape_from_string(to_string(shape)) == shape);
  }
  CHECK_THROWS_AS(variogram_shape_from_string("matern"), ConfigError);
}

TEST_CASE("gamma follows the pinned shape formulas") {
  SUBCASE("gamma(0) = 0 for every shape, even with a nugget") {
    for (const auto shape :
         {VariogramShape::Spherical, VariogramShape::Exponential,
          VariogramShape::Gaussian, VariogramShape::PureNugget}) {
      const VariogramModel model{shape, 0.3, 1.0, 0.5};
      CHECK(model(0.0) == 0.0);
    }
  }
  SUBCASE("spherical reaches nugget + sill at the range and stays there") {
    const VariogramModel model{VariogramShape::Spherical, 0.1, 1.0, 0.5};
    CHECK(model(0.5) == doctest::Approx(1.1).epsilon(1e-14));
    CHECK(model(0.7) == doctest::Approx(1.1).epsilon(1e-14));
    CHECK(model(10.0) == doctest::Approx(1.1).epsilon(1e-14));
  }
  SUBCASE("spherical polynomial below the range") {
    const VariogramModel model{VariogramShape::Spherical, 0.0, 1.0, 1.0};
    CHECK(model(0.5) ==
          doctest::Approx(1.5 * 0.5 - 0.5 * 0.125).epsilon(1e-14));
  }
  SUBCASE("exponential practical-range value at h = range") {
    const VariogramModel model{VariogramShape::Exponential, 0.0, 1.0, 0.7};
    CHECK(model(0.7) ==
          doctest::Approx(0.950212931632136).epsilon(1e-14));  // 1 - e^-3
  }
  SUBCASE("gaussian practical-range value at h = range") {
    const VariogramModel model{VariogramShape::Gaussian, 0.0, 1.0, 0.7};
    CHECK(model(0.7) == doctest::Approx(0.950212931632136).epsilon(1e-14));
  }
  SUBCASE("pure nugget jumps to the nugget and stays flat") {
    const VariogramModel model{VariogramShape::PureNugget, 0.4, 0.0, 1.0};
    CHECK(model(1e-9) == 0.4);
    CHECK(model(5.0) == 0.4);
  }
  SUBCASE("gamma is nondecreasing on a 1000-point grid for all shapes") {
    for (const auto shape :
         {VariogramShape::Spherical, VariogramShape::Exponential,
          VariogramShape::Gaussian, VariogramShape::PureNugget}) {
      const VariogramModel model{shape, 0.2, 0.8, 0.6};
      double previous = -1.0;
      for (int i = 0; i < 1000; ++i) {
        const double h = 2.0 * i / 999.0;
        const double value = model(h);
        CHECK(value >= previous - 1e-14);
        previous = value;
      }
    }
  }
  SUBCASE("invalid parameters are rejected") {
    VariogramModel model{VariogramShape::Spherical, -0.1, 1.0, 0.5};
    CHECK_THROWS_AS(model.validate(), ConfigError);
    model = {VariogramShape::Spherical, 0.0, -1.0, 0.5};
    CHECK_THROWS_AS(model.validate(), ConfigError);
    model = {VariogramShape::Spherical, 0.0, 1.0, 0.0};
    CHECK_THROWS_AS(model.validate(), ConfigError);
  }
}

TEST_CASE("empirical variogram bins squared differences") {
  SUBCASE("constant field has zero gamma_hat everywhere") {
    const Matrix pts = random_points(50, 3);
    const Vector values = Vector::Constant(50, 2.75);
    const auto emp = empirical_variogram(pts, values);
    for (const auto& lag : emp.lags) {
      if (lag.pair_count > 0) CHECK(lag.gamma_hat == 0.0);
    }
  }
  SUBCASE("two points with rates 0 and 2 give a single bin with gamma 2") {
    Matrix pts(2, 2);
    pts << 0.0, 0.0, 1.0, 0.0;
    Vector values(2);
    values << 0.0, 2.0;
    const auto emp = empirical_variogram(pts, values, 1, 2.0);
    REQUIRE(emp.lags.size() == 1);
    CHECK(emp.lags[0].pair_count == 1);
    CHECK(emp.lags[0].gamma_hat == 2.0);  // (1/2) * (2 - 0)^2
  }
  SUBCASE("iid noise: every bin with >= 100 pairs sits within 15% of sigma^2") {
    Rng rng(17);
    const int n = 500;
    const Matrix pts = random_points(n, 8);
    const double sigma = 0.3;
    Vector values(n);
    for (int i = 0; i < n; ++i) values(i) = rng.normal(0.0, sigma);

    const auto emp = empirical_variogram(pts, values);
    int rich_bins = 0;
    for (const auto& lag : emp.lags) {
      if (lag.pair_count < 100) continue;
      ++rich_bins;
      CHECK(lag.gamma_hat ==
            doctest::Approx(sigma * sigma).epsilon(0.15));
    }
    CHECK(rich_bins >= 10);
  }
  SUBCASE("lag centers are strictly increasing and empty bins stay") {
    Matrix pts(3, 2);
    pts << 0.0, 0.0, 0.1, 0.0, 1.0, 0.0;
    Vector values(3);
    values << 0.0, 1.0, 2.0;
    const auto emp = empirical_variogram(pts, values, 5, 1.0);
    REQUIRE(emp.lags.size() == 5);
    for (std::size_t k = 1; k < emp.lags.size(); ++k) {
      CHECK(emp.lags[k].h_center > emp.lags[k - 1].h_center);
    }
    CHECK(emp.lags[1].pair_count == 0);
    CHECK(emp.lags[1].gamma_hat == 0.0);
  }
  SUBCASE("preconditions") {
    Matrix one(1, 2);
    one << 0.0, 0.0;
    CHECK_THROWS_AS(empirical_variogram(one, Vector::Zero(1)), DataError);
    Matrix pts(2, 2);
    pts << 0.0, 0.0, 1.0, 0.0;
    CHECK_THROWS_AS(empirical_variogram(pts, Vector::Zero(2), 0, 1.0),
                    ConfigError);
    CHECK_THROWS_AS(empirical_variogram(pts, Vector::Zero(2), 5, 0.0),
                    ConfigError);
  }
}

TEST_CASE("default max lag is half the maximum pairwise distance") {
  Matrix pts(3, 2);
  pts << 0.0, 0.0, 3.0, 4.0, 1.0, 1.0;  // max distance 5
  CHECK(default_max_lag(pts) == doctest::Approx(2.5).epsilon(1e-14));
}

TEST_CASE("wls objective weights squared errors by pairs over h^2") {
  EmpiricalVariogram emp;
  emp.max_lag = 2.0;
  emp.n_bins = 1;
  emp.lags.push_back({1.0, 1.0, 4});
  const VariogramModel half{VariogramShape::PureNugget, 0.5, 0.0, 1.0};
  CHECK(variogram_wls_objective(emp, half) ==
        doctest::Approx(1.0).epsilon(1e-14));  // 4/1^2 * (1 - 0.5)^2
  const VariogramModel exact{VariogramShape::PureNugget, 1.0, 0.0, 1.0};
  CHECK(variogram_wls_objective(emp, exact) == 0.0);
}

TEST_CASE("fit_variogram recovers noiseless parameters within 1%") {
  SUBCASE("spherical(0.1, 1.0, 0.5)") {
    const VariogramModel truth{VariogramShape::Spherical, 0.1, 1.0, 0.5};
    const auto emp = sample_curve(truth, 10, 1.0);
    const auto fit = fit_variogram(emp, VariogramShape::Spherical);
    CHECK(fit.nugget == doctest::Approx(truth.nugget).epsilon(0.01));
    CHECK(fit.sill == doctest::Approx(truth.sill).epsilon(0.01));
    CHECK(fit.range == doctest::Approx(truth.range).epsilon(0.01));
  }
  SUBCASE("exponential(0.05, 0.8, 0.4)") {
    const VariogramModel truth{VariogramShape::Exponential, 0.05, 0.8, 0.4};
    const auto emp = sample_curve(truth, 12, 1.2);
    const auto fit = fit_variogram(emp, VariogramShape::Exponential);
    CHECK(fit.nugget == doctest::Approx(truth.nugget).epsilon(0.02));
    CHECK(fit.sill == doctest::Approx(truth.sill).epsilon(0.02));
    CHECK(fit.range == doctest::Approx(truth.range).epsilon(0.02));
  }
  SUBCASE("gaussian(0.0, 1.5, 0.6)") {
    const VariogramModel truth{VariogramShape::Gaussian, 0.0, 1.5, 0.6};
    const auto emp = sample_curve(truth, 12, 1.2);
    const auto fit = fit_variogram(emp, VariogramShape::Gaussian);
    CHECK(fit.nugget <= 0.02);
    CHECK(fit.sill == doctest::Approx(truth.sill).epsilon(0.02));
    CHECK(fit.range == doctest::Approx(truth.range).epsilon(0.02));
  }
}

TEST_CASE("fit_variogram degenerate and edge behavior") {
  SUBCASE("all-zero gamma_hat collapses to nugget 0, sill 0, range at bound") {
    EmpiricalVariogram emp;
    emp.max_lag = 1.0;
    emp.n_bins = 5;
    for (int k = 0; k < 5; ++k) emp.lags.push_back({0.1 + 0.2 * k, 0.0, 10});
    const auto fit = fit_variogram(emp, VariogramShape::Spherical);
    CHECK(fit.nugget == 0.0);
    CHECK(fit.sill == 0.0);
    CHECK(fit.range > 0.0);
    CHECK(fit.range <= 0.01 * emp.max_lag);
  }
  SUBCASE("flat gamma_hat = c reproduces pure-nugget behavior") {
    const double c = 0.7;
    EmpiricalVariogram emp;
    emp.max_lag = 1.0;
    emp.n_bins = 8;
    for (int k = 0; k < 8; ++k) {
      emp.lags.push_back({(k + 0.5) / 8.0, c, 50});
    }
    const auto fit = fit_variogram(emp, VariogramShape::Spherical);
    // Check the fitted curve, not parameter identities: gamma(h) must be
    // close to c at every observed lag.
    for (const auto& lag : emp.lags) {
      CHECK(fit(lag.h_center) == doctest::Approx(c).epsilon(0.05));
    }
  }
  SUBCASE("pure nugget fit is the weighted mean with zero sill") {
    EmpiricalVariogram emp;
    emp.max_lag = 1.0;
    emp.n_bins = 3;
    emp.lags.push_back({0.25, 0.6, 10});
    emp.lags.push_back({0.5, 0.6, 10});
    emp.lags.push_back({0.75, 0.6, 10});
    const auto fit = fit_variogram(emp, VariogramShape::PureNugget);
    CHECK(fit.shape == VariogramShape::PureNugget);
    CHECK(fit.nugget == doctest::Approx(0.6).epsilon(1e-12));
    CHECK(fit.sill == 0.0);
  }
  SUBCASE("fewer than three usable bins is an error") {
    EmpiricalVariogram emp;
    emp.max_lag = 1.0;
    emp.n_bins = 3;
    emp.lags.push_back({0.25, 0.5, 10});
    emp.lags.push_back({0.5, 0.6, 10});
    emp.lags.push_back({0.75, 0.7, 0});  // empty bin does not count
    CHECK_THROWS_AS(fit_variogram(emp, VariogramShape::Spherical), FitError);
  }
  SUBCASE("fitted models keep gamma nondecreasing on a 1000-point grid") {
    Rng rng(123);
    const Matrix pts = random_points(80, 5);
    Vector values(80);
    for (int i = 0; i < 80; ++i) {
      values(i) = pts(i, 0) + 0.5 * pts(i, 1) + rng.normal(0.0, 0.05);
    }
    const auto emp = empirical_variogram(pts, values);
    for (const auto shape :
         {VariogramShape::Spherical, VariogramShape::Exponential,
          VariogramShape::Gaussian, VariogramShape::PureNugget}) {
      const auto fit = fit_variogram(emp, shape);
      double previous = -1.0;
      for (int i = 0; i < 1000; ++i) {
        const double h = 2.0 * emp.max_lag * i / 999.0;
        const double value = fit(h);
        CHECK(value >= previous - 1e-12);
        previous = value;
      }
    }
  }
}
