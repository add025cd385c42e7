#include <algorithm>
#include <cmath>

#include <doctest.h>

#include "irmap/idw.hpp"
#include "irmap/rng.hpp"
#include "irmap/types.hpp"

using namespace irmap;

namespace {

Matrix two_points(double x0, double y0, double x1, double y1) {
  Matrix pts(2, 2);
  pts << x0, y0, x1, y1;
  return pts;
}

}  // namespace

TEST_CASE("idw returns the training rate at coincident queries") {
  Matrix pts(3, 2);
  pts << 0.0, 0.0, 0.5, 0.5, 1.0, 0.0;
  Vector rates(3);
  rates << 2.5, 4.0, 6.0;
  const IdwModel model({}, pts, rates);

  CHECK(model.predict(Vec2(0.0, 0.0)) == 2.5);
  // Within tie_epsilon still counts as coincident.
  CHECK(model.predict(Vec2(0.0, 0.5e-12)) == 2.5);
}

TEST_CASE("coincident training points answer with their mean") {
  Matrix pts(3, 2);
  pts << 0.0, 0.0, 0.0, 0.0, 1.0, 0.0;
  Vector rates(3);
  rates << 2.0, 3.0, 9.0;
  const IdwModel model({}, pts, rates);
  CHECK(model.predict(Vec2(0.0, 0.0)) == 2.5);
}

TEST_CASE("two equidistant points average their rates") {
  const Matrix pts = two_points(0.0, 0.0, 1.0, 0.0);
  Vector rates(2);
  rates << 1.0, 3.0;
  const IdwModel model({}, pts, rates);
  CHECK(model.predict(Vec2(0.5, 0.0)) == doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("hand-computed weight oracle: distances {1,2}, rates {0,3}") {
  // power 2: weights 1 and 1/4, prediction (0*1 + 3*0.25) / 1.25 = 0.6
  const Matrix pts = two_points(1.0, 0.0, 2.0, 0.0);
  Vector rates(2);
  rates << 0.0, 3.0;
  IdwConfig config;
  config.power = 2.0;
  CHECK(idw_predict(config, pts, rates, Vec2(0.0, 0.0)) ==
        doctest::Approx(0.6).epsilon(1e-14));
}

TEST_CASE("predictions are convex combinations of neighbor rates") {
  Rng rng(99);
  Matrix pts(40, 2);
  Vector rates(40);
  for (int i = 0; i < 40; ++i) {
    pts(i, 0) = rng.uniform();
    pts(i, 1) = rng.uniform();
    rates(i) = rng.uniform(1.0, 5.0);
  }
  for (const double power : {0.5, 1.0, 2.0, 4.0}) {
    IdwConfig config;
    config.power = power;
    const IdwModel model(config, pts, rates);
    for (int q = 0; q < 50; ++q) {
      const Vec2 query(rng.uniform(-0.2, 1.2), rng.uniform(-0.2, 1.2));
      const double value = model.predict(query);
      CHECK(value >= rates.minCoeff() - 1e-12);
      CHECK(value <= rates.maxCoeff() + 1e-12);
    }
  }
}

TEST_CASE("exactness at training points for every power") {
  Rng rng(7);
  Matrix pts(20, 2);
  Vector rates(20);
  for (int i = 0; i < 20; ++i) {
    pts(i, 0) = rng.uniform();
    pts(i, 1) = rng.uniform();
    rates(i) = rng.uniform(0.0, 4.0);
  }
  for (const double power : {0.5, 1.0, 2.0, 3.0, 8.0}) {
    IdwConfig config;
    config.power = power;
    const IdwModel model(config, pts, rates);
    for (int i = 0; i < 20; ++i) {
      CHECK(model.predict(pts.row(i).transpose()) == rates(i));
    }
  }
}

TEST_CASE("adding a constant to all rates shifts every prediction by it") {
  Rng rng(21);
  Matrix pts(15, 2);
  Vector rates(15);
  for (int i = 0; i < 15; ++i) {
    pts(i, 0) = rng.uniform();
    pts(i, 1) = rng.uniform();
    rates(i) = rng.uniform(1.0, 3.0);
  }
  const double c = 0.75;
  const IdwModel base({}, pts, rates);
  const Vector lifted = (rates.array() + c).matrix();
  const IdwModel shifted({}, pts, lifted);
  for (int q = 0; q < 25; ++q) {
    const Vec2 query(rng.uniform(), rng.uniform());
    CHECK(shifted.predict(query) ==
          doctest::Approx(base.predict(query) + c).epsilon(1e-12));
  }
}

TEST_CASE("k-nearest restriction uses only the chosen neighbors") {
  Matrix pts(3, 2);
  pts << 0.0, 0.0, 0.1, 0.0, 10.0, 0.0;
  Vector rates(3);
  rates << 1.0, 2.0, 100.0;

  IdwConfig config;
  config.neighbors = 2;
  const IdwModel model(config, pts, rates);
  const double value = model.predict(Vec2(0.05, 0.0));
  // The far point is excluded, so the answer stays between 1 and 2.
  CHECK(value >= 1.0);
  CHECK(value <= 2.0);

  IdwConfig all;
  all.neighbors = 0;
  const IdwModel global(all, pts, rates);
  CHECK(global.predict(Vec2(0.05, 0.0)) > value);
}

TEST_CASE("idw config validation") {
  IdwConfig config;
  config.power = 0.0;
  CHECK_THROWS_AS(config.validate(), ConfigError);
  config = {};
  config.neighbors = -1;
  CHECK_THROWS_AS(config.validate(), ConfigError);
  config = {};
  config.tie_epsilon = 0.0;
  CHECK_THROWS_AS(config.validate(), ConfigError);
}

TEST_CASE("empty training set is rejected") {
  Matrix pts(0, 2);
  Vector rates(0);
  CHECK_THROWS_AS(IdwModel({}, pts, rates), DataError);
}

TEST_CASE("very steep powers fall back to the nearest rate") {
  // d^-power overflows for tiny distances and steep powers; the predictor
  // must degrade to nearest-neighbor instead of returning NaN. The near
  // point sits above tie_epsilon so the coincidence rule stays out of play.
  const Matrix pts = two_points(1e-11, 0.0, 1.0, 0.0);
  Vector rates(2);
  rates << 4.0, -1.0;
  IdwConfig config;
  config.power = 60.0;  // (1e-11)^-60 overflows
  const double value = idw_predict(config, pts, rates, Vec2(0.0, 0.0));
  CHECK(std::isfinite(value));
  CHECK(value == doctest::Approx(4.0).epsilon(1e-9));
}
