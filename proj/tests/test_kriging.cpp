#include <algorithm>
#include <cmath>
#include <vector>

#include <doctest.h>

#include "irmap/kriging.hpp"
#include "irmap/rng.hpp"
#include "irmap/types.hpp"
#include "irmap/variogram.hpp"

#include "oracle_helpers.hpp"

using namespace irmap;

namespace {

const VariogramModel kSpherical{VariogramShape::Spherical, 0.05, 1.0, 0.6};

Matrix random_points(int n, Rng& rng) {
  Matrix pts(n, 2);
  for (int i = 0; i < n; ++i) {
    pts(i, 0) = rng.uniform();
    pts(i, 1) = rng.uniform();
  }
  return pts;
}

}  // namespace

TEST_CASE("a single training point answers every query with weight one") {
  Matrix pts(1, 2);
  pts << 0.3, 0.4;
  Vector rates(1);
  rates << 2.25;
  const KrigingSystem system(pts, rates, kSpherical);

  for (const Vec2& query :
       {Vec2(0.3, 0.4), Vec2(0.0, 0.0), Vec2(5.0, -2.0)}) {
    const auto prediction = system.predict(query);
    CHECK(prediction.rate == doctest::Approx(2.25).epsilon(1e-12));
    const Vector solution = system.solve_weights(query);
    CHECK(solution(0) == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("two-point bordered matrix has the definitional form") {
  Matrix pts(2, 2);
  pts << 0.0, 0.0, 0.6, 0.8;  // distance 1
  const Matrix a = kriging_matrix(pts, kSpherical);
  REQUIRE(a.rows() == 3);
  REQUIRE(a.cols() == 3);
  const double gamma01 = kSpherical(1.0);
  CHECK(a(0, 0) == 0.0);
  CHECK(a(1, 1) == 0.0);
  CHECK(a(0, 1) == gamma01);
  CHECK(a(1, 0) == gamma01);
  CHECK(a(0, 2) == 1.0);
  CHECK(a(1, 2) == 1.0);
  CHECK(a(2, 0) == 1.0);
  CHECK(a(2, 1) == 1.0);
  CHECK(a(2, 2) == 0.0);

  const Vec2 query(0.3, 0.4);
  const Vector rhs = kriging_rhs(pts, kSpherical, query);
  REQUIRE(rhs.size() == 3);
  CHECK(rhs(0) == kSpherical(0.5));
  CHECK(rhs(1) == kSpherical(0.5));
  CHECK(rhs(2) == 1.0);
}

TEST_CASE("three-point system matches the dense direct-solve oracle") {
  Matrix pts(3, 2);
  pts << 0.1, 0.2, 0.8, 0.3, 0.4, 0.9;
  Vector rates(3);
  rates << 1.0, 2.0, 1.5;
  const KrigingSystem system(pts, rates, kSpherical);

  Rng rng(31);
  for (int q = 0; q < 25; ++q) {
    const Vec2 query(rng.uniform(-0.2, 1.2), rng.uniform(-0.2, 1.2));
    const auto oracle = oracle::krige(pts, rates, kSpherical, query);
    const auto prediction = system.predict(query);
    const Vector solution = system.solve_weights(query);

    for (int i = 0; i < 3; ++i) {
      CHECK(solution(i) == doctest::Approx(oracle.weights(i)).epsilon(1e-8));
    }
    CHECK(prediction.rate == doctest::Approx(oracle.rate).epsilon(1e-8));
    CHECK(prediction.variance ==
          doctest::Approx(std::max(0.0, oracle.variance)).epsilon(1e-8));
  }
}

TEST_CASE("zero-nugget kriging interpolates exactly with zero variance") {
  const VariogramModel zero_nugget{VariogramShape::Spherical, 0.0, 1.0, 0.6};
  Rng rng(12);
  const Matrix pts = random_points(25, rng);
  Vector rates(25);
  for (int i = 0; i < 25; ++i) rates(i) = rng.uniform(1.0, 4.0);
  const KrigingSystem system(pts, rates, zero_nugget);

  for (int i = 0; i < 25; ++i) {
    const auto prediction = system.predict(pts.row(i).transpose());
    CHECK(prediction.rate == doctest::Approx(rates(i)).epsilon(1e-8));
    CHECK(prediction.variance >= 0.0);
    CHECK(prediction.variance <= 1e-8);
  }
}

TEST_CASE("constant rates krige to the constant everywhere") {
  Rng rng(44);
  const Matrix pts = random_points(12, rng);
  const Vector rates = Vector::Constant(12, 3.125);
  const KrigingSystem system(pts, rates, kSpherical);
  for (int q = 0; q < 30; ++q) {
    const Vec2 query(rng.uniform(-0.5, 1.5), rng.uniform(-0.5, 1.5));
    CHECK(system.predict(query).rate ==
          doctest::Approx(3.125).epsilon(1e-10));
  }
}

TEST_CASE("weights sum to one and variance is nonnegative at random queries") {
  Rng rng(91);
  const Matrix pts = random_points(15, rng);
  Vector rates(15);
  for (int i = 0; i < 15; ++i) rates(i) = rng.uniform(0.0, 5.0);
  const KrigingSystem system(pts, rates, kSpherical);

  for (int q = 0; q < 500; ++q) {
    const Vec2 query(rng.uniform(-1.0, 2.0), rng.uniform(-1.0, 2.0));
    const Vector solution = system.solve_weights(query);
    CHECK(std::abs(solution.head(15).sum() - 1.0) <= 1e-10);
    CHECK(system.predict(query).variance >= 0.0);
  }
}

TEST_CASE("adding a constant to the rates shifts predictions by it") {
  Rng rng(5);
  const Matrix pts = random_points(10, rng);
  Vector rates(10);
  for (int i = 0; i < 10; ++i) rates(i) = rng.uniform(1.0, 2.0);
  const double c = 1.5;
  const KrigingSystem base(pts, rates, kSpherical);
  const Vector lifted = (rates.array() + c).matrix();
  const KrigingSystem shifted(pts, lifted, kSpherical);
  for (int q = 0; q < 20; ++q) {
    const Vec2 query(rng.uniform(), rng.uniform());
    CHECK(shifted.predict(query).rate ==
          doctest::Approx(base.predict(query).rate + c).epsilon(1e-10));
  }
}

TEST_CASE("coincident training points are averaged before assembly") {
  Matrix pts(3, 2);
  pts << 0.2, 0.2, 0.2, 0.2, 0.8, 0.8;  // first two coincide
  Vector rates(3);
  rates << 1.0, 3.0, 5.0;
  const KrigingSystem system(pts, rates, kSpherical);
  CHECK(system.points().rows() == 2);
  CHECK(system.predict(Vec2(0.2, 0.2)).rate ==
        doctest::Approx(2.0).epsilon(1e-8));
}

TEST_CASE("local neighborhood mode matches a direct solve on the k nearest") {
  Rng rng(73);
  const Matrix pts = random_points(12, rng);
  Vector rates(12);
  for (int i = 0; i < 12; ++i) rates(i) = rng.uniform(1.0, 4.0);

  KrigingConfig local;
  local.neighbors = 4;
  const KrigingSystem system(pts, rates, kSpherical, local);

  for (int q = 0; q < 10; ++q) {
    const Vec2 query(rng.uniform(), rng.uniform());

    std::vector<int> order(12);
    for (int i = 0; i < 12; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](int a, int b) {
      const double da = (pts.row(a).transpose() - query).squaredNorm();
      const double db = (pts.row(b).transpose() - query).squaredNorm();
      return da < db;
    });
    Matrix near(4, 2);
    Vector near_rates(4);
    for (int k = 0; k < 4; ++k) {
      near.row(k) = pts.row(order[k]);
      near_rates(k) = rates(order[k]);
    }
    const auto oracle = oracle::krige(near, near_rates, kSpherical, query);
    const auto prediction = system.predict(query);
    CHECK(prediction.rate == doctest::Approx(oracle.rate).epsilon(1e-8));
    CHECK(prediction.variance ==
          doctest::Approx(std::max(0.0, oracle.variance)).epsilon(1e-8));
  }
}

TEST_CASE("local mode cannot expose the global weight solver") {
  Rng rng(2);
  const Matrix pts = random_points(6, rng);
  Vector rates(6);
  for (int i = 0; i < 6; ++i) rates(i) = rng.uniform(1.0, 2.0);
  KrigingConfig local;
  local.neighbors = 3;
  const KrigingSystem system(pts, rates, kSpherical, local);
  CHECK_THROWS_AS(system.solve_weights(Vec2(0.5, 0.5)), FitError);
}

TEST_CASE("pure-nugget kriging survives via the jitter rescue as the mean") {
  // With a zero-nugget pure-nugget model the semivariance matrix is all
  // zeros and singular; the one-shot diagonal jitter must rescue it, and the
  // rescued system predicts the sample mean.
  Matrix pts(3, 2);
  pts << 0.0, 0.0, 1.0, 0.0, 0.0, 1.0;
  Vector rates(3);
  rates << 1.0, 2.0, 6.0;
  const VariogramModel flat{VariogramShape::PureNugget, 0.0, 0.0, 1.0};
  const KrigingSystem system(pts, rates, flat);
  CHECK(system.predict(Vec2(0.4, 0.4)).rate ==
        doctest::Approx(3.0).epsilon(1e-6));
}

TEST_CASE("kriging config validation") {
  KrigingConfig config;
  config.neighbors = -1;
  CHECK_THROWS_AS(config.validate(), ConfigError);
}

TEST_CASE("krige_fit wraps system construction") {
  Matrix pts(2, 2);
  pts << 0.0, 0.0, 1.0, 1.0;
  Vector rates(2);
  rates << 1.0, 2.0;
  const KrigingSystem system = krige_fit(pts, rates, kSpherical);
  const double mid = system.predict(Vec2(0.5, 0.5)).rate;
  CHECK(mid == doctest::Approx(1.5).epsilon(1e-10));
}
