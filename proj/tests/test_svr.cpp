#include <cmath>
#include <limits>
#include <vector>

#include <doctest.h>

#include "irmap/rng.hpp"
#include "irmap/svr.hpp"
#include "irmap/types.hpp"

#include "oracle_helpers.hpp"

using namespace irmap;

namespace {

Matrix random_points(int n, Rng& rng) {
  Matrix pts(n, 2);
  for (int i = 0; i < n; ++i) {
    pts(i, 0) = rng.uniform();
    pts(i, 1) = rng.uniform();
  }
  return pts;
}

Vector smooth_targets(const Matrix& pts) {
  Vector y(pts.rows());
  for (Eigen::Index i = 0; i < pts.rows(); ++i) {
    y(i) = 2.0 + std::sin(3.0 * pts(i, 0)) + 0.5 * pts(i, 1);
  }
  return y;
}

Matrix kernel_matrix(double sigma, const Matrix& pts) {
  const Eigen::Index n = pts.rows();
  Matrix k(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      k(i, j) = rbf_kernel(sigma, pts.row(i).transpose(),
                           pts.row(j).transpose());
    }
  }
  return k;
}

double model_kkt_tol(const SvrModel& model) {
  return model.config().epsilon + model.config().tol + 1e-9;
}

}  // namespace

TEST_CASE("rbf kernel formula") {
  const Vec2 p(0.25, 0.75);
  CHECK(rbf_kernel(0.3, p, p) == 1.0);

  // |p - q| = sigma * sqrt(2) makes the exponent exactly -1.
  const double sigma = 0.4;
  const Vec2 q(0.25 + sigma * std::sqrt(2.0), 0.75);
  CHECK(rbf_kernel(sigma, p, q) ==
        doctest::Approx(0.36787944117144233).epsilon(1e-12));

  Rng rng(10);
  for (int t = 0; t < 20; ++t) {
    const Vec2 a(rng.uniform(), rng.uniform());
    const Vec2 b(rng.uniform(), rng.uniform());
    CHECK(rbf_kernel(0.2, a, b) == rbf_kernel(0.2, b, a));
    CHECK(rbf_kernel(0.2, a, b) > 0.0);
    CHECK(rbf_kernel(0.2, a, b) <= 1.0);
  }
}

TEST_CASE("constant targets stay inside the tube: beta 0, bias c") {
  Rng rng(55);
  const Matrix pts = random_points(12, rng);
  const Vector y = Vector::Constant(12, 2.0);
  SvrConfig config;
  config.epsilon = 0.1;
  const SvrModel model = svr_fit(config, pts, y);

  CHECK(model.support_points().rows() == 0);
  CHECK(model.bias() == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(model.stats().converged);
  CHECK(model.predict(Vec2(0.5, 0.5)) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(model.predict(Vec2(-3.0, 7.0)) ==
        doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("five-point dual agrees with the projected-gradient oracle") {
  Rng rng(77);
  const Matrix pts = random_points(5, rng);
  const Vector y = smooth_targets(pts);

  SvrConfig config;
  config.c = 10.0;
  config.epsilon = 0.05;
  config.sigma = 0.5;
  config.tol = 1e-8;
  const SvrModel model = svr_fit(config, pts, y);
  REQUIRE(model.stats().converged);

  const Matrix kernel = kernel_matrix(config.sigma, pts);
  const auto oracle = oracle::svr_dual(kernel, y, config.c, config.epsilon);

  CHECK(std::abs(model.stats().dual_objective - oracle.objective) <= 1e-6);

  const double oracle_bias =
      oracle::svr_bias(kernel, y, oracle, config.c, config.epsilon);
  for (int q = 0; q < 20; ++q) {
    const Vec2 query(rng.uniform(-0.2, 1.2), rng.uniform(-0.2, 1.2));
    double oracle_value = oracle_bias;
    for (int i = 0; i < 5; ++i) {
      oracle_value += oracle.beta(i) * rbf_kernel(config.sigma, query,
                                                  pts.row(i).transpose());
    }
    CHECK(model.predict(query) ==
          doctest::Approx(oracle_value).epsilon(1e-4));
  }
}

TEST_CASE("dual feasibility holds on every fit") {
  for (const std::uint64_t seed : {1ull, 2ull, 3ull}) {
    Rng rng(seed);
    const Matrix pts = random_points(30, rng);
    Vector y = smooth_targets(pts);
    for (int i = 0; i < 30; ++i) y(i) += rng.normal(0.0, 0.05);

    SvrConfig config;
    config.c = 5.0;
    config.epsilon = 0.02;
    config.sigma = 0.3;
    const SvrModel model = svr_fit(config, pts, y);

    CHECK(model.stats().converged);
    CHECK(std::abs(model.beta().sum()) <= 1e-8);
    for (Eigen::Index i = 0; i < model.beta().size(); ++i) {
      CHECK(std::abs(model.beta()(i)) <= config.c + 1e-12);
    }
    CHECK(svr_kkt_violations(model, pts, y).empty());
  }
}

TEST_CASE("all-zero beta model predicts its bias everywhere") {
  SvrConfig config;
  const SvrModel model(config, Matrix(0, 2), Vector(0), 1.7);
  CHECK(model.predict(Vec2(0.0, 0.0)) == 1.7);
  CHECK(model.predict(Vec2(100.0, -4.0)) == 1.7);
}

TEST_CASE("hand-built expansion: beta {+1,-1}, kernels {0.5, 0.25}, b 2") {
  SvrConfig config;
  config.sigma = 1.0;
  Matrix support(2, 2);
  // Distances chosen so the kernel values are exactly 0.5 and 0.25.
  support << std::sqrt(2.0 * std::log(2.0)), 0.0,
      -std::sqrt(4.0 * std::log(2.0)), 0.0;
  Vector beta(2);
  beta << 1.0, -1.0;
  const SvrModel model(config, support, beta, 2.0);
  CHECK(model.predict(Vec2(0.0, 0.0)) ==
        doctest::Approx(2.25).epsilon(1e-12));
}

TEST_CASE("free support vectors reproduce their targets within epsilon+tol") {
  Rng rng(20);
  const Matrix pts = random_points(40, rng);
  Vector y = smooth_targets(pts);
  for (int i = 0; i < 40; ++i) y(i) += rng.normal(0.0, 0.03);

  SvrConfig config;
  config.c = 10.0;
  config.epsilon = 0.02;
  config.sigma = 0.3;
  const SvrModel model = svr_fit(config, pts, y);
  REQUIRE(model.stats().converged);

  // Locate each support point's originating training index.
  int free_count = 0;
  for (Eigen::Index s = 0; s < model.support_points().rows(); ++s) {
    const double beta = model.beta()(s);
    if (std::abs(beta) <= 1e-6 * config.c ||
        std::abs(beta) >= config.c * (1.0 - 1e-6)) {
      continue;
    }
    ++free_count;
    for (Eigen::Index i = 0; i < pts.rows(); ++i) {
      if ((pts.row(i) - model.support_points().row(s)).norm() < 1e-12) {
        const double f = model.predict(pts.row(i).transpose());
        CHECK(std::abs(f - y(i)) <= model_kkt_tol(model));
      }
    }
  }
  CHECK(free_count > 0);
}

TEST_CASE("minimized dual objective never increases across iterations") {
  Rng rng(8);
  const Matrix pts = random_points(15, rng);
  const Vector y = smooth_targets(pts);

  SvrConfig config;
  config.c = 10.0;
  config.epsilon = 0.01;
  config.sigma = 0.4;
  config.record_objective = true;
  const SvrModel model = svr_fit(config, pts, y);

  const auto& history = model.stats().objective_history;
  REQUIRE(history.size() >= 2);
  CHECK(history.front() == 0.0);  // W at the feasible zero start
  for (std::size_t k = 1; k < history.size(); ++k) {
    CHECK(history[k] <= history[k - 1] + 1e-12);
  }
}

TEST_CASE("epsilon 0 with huge C drives training residuals to zero") {
  Rng rng(66);
  const Matrix pts = random_points(5, rng);
  const Vector y = smooth_targets(pts);

  SvrConfig config;
  config.c = 1e4;
  config.epsilon = 0.0;
  config.sigma = 0.7;
  config.tol = 1e-4;
  const SvrModel model = svr_fit(config, pts, y);

  double worst = 0.0;
  for (int i = 0; i < 5; ++i) {
    worst = std::max(worst,
                     std::abs(model.predict(pts.row(i).transpose()) - y(i)));
  }
  CHECK(worst <= 1e-2);
}

TEST_CASE("svr config validation and input checks") {
  SvrConfig config;
  config.c = 0.0;
  CHECK_THROWS_AS(config.validate(), ConfigError);
  config = {};
  config.sigma = 0.0;
  CHECK_THROWS_AS(config.validate(), ConfigError);
  config = {};
  config.epsilon = -0.01;
  CHECK_THROWS_AS(config.validate(), ConfigError);
  config = {};
  config.tol = 0.0;
  CHECK_THROWS_AS(config.validate(), ConfigError);
  config = {};
  config.max_passes = 0;
  CHECK_THROWS_AS(config.validate(), ConfigError);

  Matrix pts(2, 2);
  pts << 0.0, 0.0, 1.0, 1.0;
  Vector bad(2);
  bad << 1.0, std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(svr_fit({}, pts, bad), DataError);
}

TEST_CASE("grid search picks the best held-out RMSE") {
  Rng rng(30);
  const Matrix train = random_points(25, rng);
  const Vector train_y = smooth_targets(train);
  const Matrix test = random_points(12, rng);
  const Vector test_y = smooth_targets(test);

  SvrConfig base;
  base.sigma = 0.4;

  SvrGrid grid;
  grid.c_values = {10.0};
  grid.epsilon_values = {0.5, 0.01};  // the wide tube underfits badly
  const SvrConfig chosen =
      svr_grid_search(base, grid, train, train_y, test, test_y);
  CHECK(chosen.epsilon == 0.01);
  CHECK(chosen.c == 10.0);
  CHECK(chosen.sigma == 0.4);  // untouched axis falls back to the base

  const SvrConfig unchanged =
      svr_grid_search(base, SvrGrid{}, train, train_y, test, test_y);
  CHECK(unchanged.c == base.c);
  CHECK(unchanged.epsilon == base.epsilon);
  CHECK(unchanged.sigma == base.sigma);
}
