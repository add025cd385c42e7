#pragma once

#include <cstdint>
#include <memory>
#include <string>

#include <json.hpp>

#include "irmap/dataset.hpp"
#include "irmap/idw.hpp"
#include "irmap/kriging.hpp"
#include "irmap/mlp.hpp"
#include "irmap/svr.hpp"
#include "irmap/types.hpp"

namespace irmap {

// One prediction contract over the four model families. Fitted models are
// immutable and safe for concurrent prediction.
class SurfaceModel {
 public:
  virtual ~SurfaceModel() = default;

  virtual std::string tag() const = 0;
  virtual double predict_scaled(const Vec2& uv) const = 0;
  virtual nlohmann::json params_json() const = 0;

  double predict(double maturity_months, double day_index) const;
  const ScalingSpec& scaling() const { return scaling_; }
  double max_training_day() const { return max_training_day_; }

 protected:
  SurfaceModel(ScalingSpec scaling, double max_training_day)
      : scaling_(scaling), max_training_day_(max_training_day) {}

  ScalingSpec scaling_;
  double max_training_day_ = 0.0;
};

class IdwSurface final : public SurfaceModel {
 public:
  IdwSurface(IdwModel model, ScalingSpec scaling, double max_training_day);
  std::string tag() const override { return "idw"; }
  double predict_scaled(const Vec2& uv) const override;
  nlohmann::json params_json() const override;
  const IdwModel& model() const { return model_; }

 private:
  IdwModel model_;
};

class KrigingSurface final : public SurfaceModel {
 public:
  KrigingSurface(KrigingSystem system, ScalingSpec scaling,
                 double max_training_day);
  std::string tag() const override { return "kriging"; }
  double predict_scaled(const Vec2& uv) const override;
  nlohmann::json params_json() const override;
  const KrigingSystem& system() const { return system_; }

 private:
  KrigingSystem system_;
};

class SvrSurface final : public SurfaceModel {
 public:
  SvrSurface(SvrModel model, ScalingSpec scaling, double max_training_day);
  std::string tag() const override { return "svr"; }
  double predict_scaled(const Vec2& uv) const override;
  nlohmann::json params_json() const override;
  const SvrModel& model() const { return model_; }

 private:
  SvrModel model_;
};

class MlpSurface final : public SurfaceModel {
 public:
  MlpSurface(MlpModel model, ScalingSpec scaling, double max_training_day);
  std::string tag() const override { return "mlp"; }
  double predict_scaled(const Vec2& uv) const override;
  nlohmann::json params_json() const override;
  const MlpModel& model() const { return model_; }

 private:
  MlpModel model_;
};

// Model family plus hyperparameters, as configured by the CLI.
struct ModelSpec {
  std::string family = "idw";  // idw | kriging | svr | mlp
  IdwConfig idw;
  VariogramShape kriging_shape = VariogramShape::Spherical;
  KrigingConfig kriging;
  int kriging_bins = 15;
  SvrConfig svr;
  MlpConfig mlp;
  double anisotropy = 1.0;
  std::uint64_t seed = 0;

  void validate() const;
};

// Fits the chosen family on the train split of `data`, embedding with the
// dataset's scaling under the spec's anisotropy. The test split is the MLP
// early-stopping control set; IDW, kriging and SVR ignore it. Kriging fits
// its variogram on the train split before solving the system.
std::unique_ptr<SurfaceModel> fit_surface_model(const ModelSpec& spec,
                                                const Dataset& data,
                                                const SplitIndices& split);

// Fit on every observation; MLP carves an internal seeded 80/20 control set.
std::unique_ptr<SurfaceModel> fit_surface_model(const ModelSpec& spec,
                                                const Dataset& data);

nlohmann::json model_to_json(const SurfaceModel& model);
std::unique_ptr<SurfaceModel> model_from_json(const nlohmann::json& j);

void save_model_file(const SurfaceModel& model, const std::string& path);
std::unique_ptr<SurfaceModel> load_model_file(const std::string& path);

}  // namespace irmap
