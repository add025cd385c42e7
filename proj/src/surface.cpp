#include "irmap/surface.hpp"

#include <fstream>
#include <utility>

namespace irmap {
namespace {

using nlohmann::json;

json matrix_to_json(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix matrix_from_json(const json& j, Eigen::Index cols_expected = -1) {
  if (!j.is_array()) throw DataError("model file: expected a matrix");
  const Eigen::Index rows = static_cast<Eigen::Index>(j.size());
  Eigen::Index cols = cols_expected;
  if (rows > 0 && cols < 0) {
    cols = static_cast<Eigen::Index>(j.front().size());
  }
  Matrix m(rows, std::max<Eigen::Index>(cols, 0));
  for (Eigen::Index r = 0; r < rows; ++r) {
    const auto& row = j.at(static_cast<std::size_t>(r));
    if (static_cast<Eigen::Index>(row.size()) != m.cols()) {
      throw DataError("model file: ragged matrix");
    }
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      m(r, c) = row.at(static_cast<std::size_t>(c)).get<double>();
    }
  }
  return m;
}

json vector_to_json(const Vector& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

Vector vector_from_json(const json& j) {
  if (!j.is_array()) throw DataError("model file: expected a vector");
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    v(i) = j.at(static_cast<std::size_t>(i)).get<double>();
  }
  return v;
}

json scaling_to_json(const ScalingSpec& s) {
  return json{{"x_min", s.x_min}, {"x_max", s.x_max}, {"y_min", s.y_min},
              {"y_max", s.y_max}, {"anisotropy", s.anisotropy}};
}

ScalingSpec scaling_from_json(const json& j) {
  ScalingSpec s;
  s.x_min = j.at("x_min").get<double>();
  s.x_max = j.at("x_max").get<double>();
  s.y_min = j.at("y_min").get<double>();
  s.y_max = j.at("y_max").get<double>();
  s.anisotropy = j.at("anisotropy").get<double>();
  s.validate();
  return s;
}

Matrix embed_rows(const Dataset& data, const std::vector<int>& indices,
                  const ScalingSpec& scaling) {
  Matrix out(static_cast<Eigen::Index>(indices.size()), 2);
  for (std::size_t i = 0; i < indices.size(); ++i) {
    const auto& obs = data.observations[static_cast<std::size_t>(indices[i])];
    out.row(static_cast<Eigen::Index>(i)) = scaling.embed(obs).transpose();
  }
  return out;
}

std::unique_ptr<SurfaceModel> fit_with_indices(const ModelSpec& spec,
                                               const Dataset& data,
                                               const std::vector<int>& train,
                                               const std::vector<int>& test) {
  spec.validate();
  if (train.empty()) throw DataError("model fit needs training observations");

  // The spec's anisotropy wins over whatever the dataset carried, so one
  // panel can be fitted under several stretchings of the time axis.
  ScalingSpec scaling = data.scaling;
  scaling.anisotropy = spec.anisotropy;
  scaling.validate();

  const Matrix train_points = embed_rows(data, train, scaling);
  const Vector train_rates = data.rate_vector(train);

  double max_day = 0.0;
  for (const auto& obs : data.observations) {
    max_day = std::max(max_day, static_cast<double>(obs.day_index));
  }

  if (spec.family == "idw") {
    return std::make_unique<IdwSurface>(
        IdwModel(spec.idw, train_points, train_rates), scaling, max_day);
  }
  if (spec.family == "kriging") {
    const EmpiricalVariogram emp =
        empirical_variogram(train_points, train_rates, spec.kriging_bins,
                            default_max_lag(train_points));
    const VariogramModel variogram = fit_variogram(emp, spec.kriging_shape);
    return std::make_unique<KrigingSurface>(
        KrigingSystem(train_points, train_rates, variogram, spec.kriging),
        scaling, max_day);
  }
  if (spec.family == "svr") {
    return std::make_unique<SvrSurface>(
        svr_fit(spec.svr, train_points, train_rates), scaling, max_day);
  }
  if (spec.family == "mlp") {
    MlpConfig config = spec.mlp;
    config.seed = spec.seed;
    const Matrix test_points = embed_rows(data, test, scaling);
    const Vector test_rates = data.rate_vector(test);
    MlpTrainResult trained =
        mlp_train(config, train_points, train_rates, test_points, test_rates);
    return std::make_unique<MlpSurface>(std::move(trained.model), scaling,
                                        max_day);
  }
  throw ConfigError("unknown model family: " + spec.family);
}

}  // namespace

double SurfaceModel::predict(double maturity_months, double day_index) const {
  return predict_scaled(scaling_.embed(maturity_months, day_index));
}

IdwSurface::IdwSurface(IdwModel model, ScalingSpec scaling,
                       double max_training_day)
    : SurfaceModel(scaling, max_training_day), model_(std::move(model)) {}

double IdwSurface::predict_scaled(const Vec2& uv) const {
  return model_.predict(uv);
}

nlohmann::json IdwSurface::params_json() const {
  return json{{"config",
               {{"power", model_.config().power},
                {"neighbors", model_.config().neighbors},
                {"tie_epsilon", model_.config().tie_epsilon}}},
              {"points", matrix_to_json(model_.points())},
              {"rates", vector_to_json(model_.rates())}};
}

KrigingSurface::KrigingSurface(KrigingSystem system, ScalingSpec scaling,
                               double max_training_day)
    : SurfaceModel(scaling, max_training_day), system_(std::move(system)) {}

double KrigingSurface::predict_scaled(const Vec2& uv) const {
  return system_.predict(uv).rate;
}

nlohmann::json KrigingSurface::params_json() const {
  const VariogramModel& v = system_.model();
  return json{{"config", {{"neighbors", system_.config().neighbors}}},
              {"variogram",
               {{"shape", to_string(v.shape)},
                {"nugget", v.nugget},
                {"sill", v.sill},
                {"range", v.range}}},
              {"points", matrix_to_json(system_.points())},
              {"rates", vector_to_json(system_.rates())}};
}

SvrSurface::SvrSurface(SvrModel model, ScalingSpec scaling,
                       double max_training_day)
    : SurfaceModel(scaling, max_training_day), model_(std::move(model)) {}

double SvrSurface::predict_scaled(const Vec2& uv) const {
  return model_.predict(uv);
}

nlohmann::json SvrSurface::params_json() const {
  return json{{"config",
               {{"c", model_.config().c},
                {"epsilon", model_.config().epsilon},
                {"sigma", model_.config().sigma},
                {"tol", model_.config().tol}}},
              {"support_points", matrix_to_json(model_.support_points())},
              {"beta", vector_to_json(model_.beta())},
              {"bias", model_.bias()}};
}

MlpSurface::MlpSurface(MlpModel model, ScalingSpec scaling,
                       double max_training_day)
    : SurfaceModel(scaling, max_training_day), model_(std::move(model)) {}

double MlpSurface::predict_scaled(const Vec2& uv) const {
  return model_.predict(uv);
}

nlohmann::json MlpSurface::params_json() const {
  json weights = json::array();
  json biases = json::array();
  for (int l = 0; l < model_.layer_count(); ++l) {
    weights.push_back(matrix_to_json(model_.weights()[static_cast<std::size_t>(l)]));
    biases.push_back(vector_to_json(model_.biases()[static_cast<std::size_t>(l)]));
  }
  const auto standardizer_json = [](const Standardizer& s) {
    return json{{"mean", vector_to_json(s.mean)},
                {"stddev", vector_to_json(s.stddev)}};
  };
  return json{{"weights", std::move(weights)},
              {"biases", std::move(biases)},
              {"input", standardizer_json(model_.input_standardizer())},
              {"target", standardizer_json(model_.target_standardizer())}};
}

void ModelSpec::validate() const {
  if (family != "idw" && family != "kriging" && family != "svr" &&
      family != "mlp") {
    throw ConfigError("unknown model family: " + family);
  }
  if (!(anisotropy > 0.0)) throw ConfigError("anisotropy must be > 0");
  if (kriging_bins < 1) throw ConfigError("variogram bin count must be >= 1");
  idw.validate();
  kriging.validate();
  svr.validate();
  mlp.validate();
}

std::unique_ptr<SurfaceModel> fit_surface_model(const ModelSpec& spec,
                                                const Dataset& data,
                                                const SplitIndices& split) {
  return fit_with_indices(spec, data, split.train, split.test);
}

std::unique_ptr<SurfaceModel> fit_surface_model(const ModelSpec& spec,
                                                const Dataset& data) {
  const std::size_t n = data.observations.size();
  if (spec.family == "mlp") {
    const SplitIndices split = split_80_20(n, spec.seed);
    return fit_with_indices(spec, data, split.train, split.test);
  }
  std::vector<int> all(n);
  for (std::size_t i = 0; i < n; ++i) all[i] = static_cast<int>(i);
  return fit_with_indices(spec, data, all, {});
}

nlohmann::json model_to_json(const SurfaceModel& model) {
  return json{{"model", model.tag()},
              {"scaling", scaling_to_json(model.scaling())},
              {"max_training_day", model.max_training_day()},
              {"params", model.params_json()}};
}

std::unique_ptr<SurfaceModel> model_from_json(const nlohmann::json& j) {
  try {
    const std::string tag = j.at("model").get<std::string>();
    const ScalingSpec scaling = scaling_from_json(j.at("scaling"));
    const double max_day = j.at("max_training_day").get<double>();
    const json& params = j.at("params");

    if (tag == "idw") {
      const json& c = params.at("config");
      IdwConfig config;
      config.power = c.at("power").get<double>();
      config.neighbors = c.at("neighbors").get<int>();
      config.tie_epsilon = c.at("tie_epsilon").get<double>();
      return std::make_unique<IdwSurface>(
          IdwModel(config, matrix_from_json(params.at("points"), 2),
                   vector_from_json(params.at("rates"))),
          scaling, max_day);
    }
    if (tag == "kriging") {
      KrigingConfig config;
      config.neighbors = params.at("config").at("neighbors").get<int>();
      const json& v = params.at("variogram");
      VariogramModel variogram;
      variogram.shape =
          variogram_shape_from_string(v.at("shape").get<std::string>());
      variogram.nugget = v.at("nugget").get<double>();
      variogram.sill = v.at("sill").get<double>();
      variogram.range = v.at("range").get<double>();
      return std::make_unique<KrigingSurface>(
          KrigingSystem(matrix_from_json(params.at("points"), 2),
                        vector_from_json(params.at("rates")), variogram,
                        config),
          scaling, max_day);
    }
    if (tag == "svr") {
      const json& c = params.at("config");
      SvrConfig config;
      config.c = c.at("c").get<double>();
      config.epsilon = c.at("epsilon").get<double>();
      config.sigma = c.at("sigma").get<double>();
      config.tol = c.at("tol").get<double>();
      return std::make_unique<SvrSurface>(
          SvrModel(config, matrix_from_json(params.at("support_points"), 2),
                   vector_from_json(params.at("beta")),
                   params.at("bias").get<double>()),
          scaling, max_day);
    }
    if (tag == "mlp") {
      std::vector<Matrix> weights;
      std::vector<Vector> biases;
      for (const auto& w : params.at("weights")) {
        weights.push_back(matrix_from_json(w));
      }
      for (const auto& b : params.at("biases")) {
        biases.push_back(vector_from_json(b));
      }
      const auto standardizer_from = [](const json& s) {
        Standardizer out;
        out.mean = vector_from_json(s.at("mean"));
        out.stddev = vector_from_json(s.at("stddev"));
        return out;
      };
      return std::make_unique<MlpSurface>(
          MlpModel(std::move(weights), std::move(biases),
                   standardizer_from(params.at("input")),
                   standardizer_from(params.at("target"))),
          scaling, max_day);
    }
    throw DataError("model file: unknown model tag " + tag);
  } catch (const json::exception& e) {
    throw DataError(std::string("model file: ") + e.what());
  }
}

void save_model_file(const SurfaceModel& model, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot open model file for writing: " + path);
  out << model_to_json(model).dump(2) << '\n';
  if (!out) throw DataError("failed writing model file: " + path);
}

std::unique_ptr<SurfaceModel> load_model_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open model file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw DataError(std::string("model file parse error: ") + e.what());
  }
  return model_from_json(j);
}

}  // namespace irmap
