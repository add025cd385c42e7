#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <memory>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "irmap/analytics.hpp"
#include "irmap/dataset.hpp"
#include "irmap/forecast.hpp"
#include "irmap/io_util.hpp"
#include "irmap/nelson_siegel.hpp"
#include "irmap/panel_io.hpp"
#include "irmap/ppm.hpp"
#include "irmap/surface.hpp"
#include "irmap/tenor.hpp"
#include "irmap/types.hpp"

namespace {

using nlohmann::json;

// ---------------------------------------------------------------------------
// Config plumbing: every option can come from --config <json>; values given
// on the command line win over the file.

class ConfigBinder {
 public:
  explicit ConfigBinder(CLI::App* cmd) : cmd_(cmd) {}

  template <typename T>
  CLI::Option* bind(const std::string& flag, T& value,
                    const std::string& help) {
    CLI::Option* opt = cmd_->add_option(flag, value, help);
    appliers_.push_back([opt, &value](const json& j) {
      const std::string name = opt->get_single_name();
      if (opt->count() == 0 && j.contains(name)) {
        try {
          value = j.at(name).get<T>();
        } catch (const json::exception& e) {
          throw irmap::ConfigError("config key '" + name + "': " + e.what());
        }
      }
    });
    return opt;
  }

  void apply(const json& config) {
    for (const auto& apply_one : appliers_) apply_one(config);
  }

 private:
  CLI::App* cmd_;
  std::vector<std::function<void(const json&)>> appliers_;
};

struct CommonOptions {
  std::string config_path;
  std::uint64_t seed = 0;
  std::string out_dir = ".";

  void register_on(CLI::App* cmd, ConfigBinder& binder) {
    cmd->add_option("--config", config_path,
                    "JSON file with defaults for any option of this command");
    binder.bind("--seed", seed, "Seed for every random draw in the command");
    binder.bind("--out", out_dir, "Directory receiving all output artifacts");
  }

  json load_config() const {
    if (config_path.empty()) return json::object();
    std::ifstream in(config_path);
    if (!in) {
      throw irmap::ConfigError("cannot open config file: " + config_path);
    }
    try {
      json j;
      in >> j;
      if (!j.is_object()) {
        throw irmap::ConfigError("config file must hold a JSON object");
      }
      return j;
    } catch (const json::exception& e) {
      throw irmap::ConfigError(std::string("config file parse error: ") +
                               e.what());
    }
  }

  std::filesystem::path artifact(const std::string& name) const {
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) {
      throw irmap::DataError("cannot create output directory: " + out_dir);
    }
    return std::filesystem::path(out_dir) / name;
  }
};

void ensure_distinct(const std::string& input,
                     const std::filesystem::path& output) {
  std::error_code ec;
  if (std::filesystem::weakly_canonical(input, ec) ==
      std::filesystem::weakly_canonical(output, ec)) {
    throw irmap::ConfigError("input and output refer to the same file: " +
                             output.string());
  }
}

void write_json_file(const std::filesystem::path& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw irmap::DataError("cannot open for writing: " + path.string());
  out << j.dump(2) << '\n';
  if (!out) throw irmap::DataError("failed writing: " + path.string());
}

void write_text_file(const std::filesystem::path& path,
                     const std::string& text) {
  std::ofstream out(path);
  if (!out) throw irmap::DataError("cannot open for writing: " + path.string());
  out << text;
  if (!out) throw irmap::DataError("failed writing: " + path.string());
}

std::vector<irmap::Tenor> parse_tenors(const std::vector<std::string>& labels) {
  if (labels.empty()) return irmap::default_tenors();
  std::vector<irmap::Tenor> tenors;
  tenors.reserve(labels.size());
  for (const auto& label : labels) {
    try {
      tenors.push_back(irmap::make_tenor(label));
    } catch (const irmap::DataError& e) {
      throw irmap::ConfigError(e.what());  // bad flag value, not bad data
    }
  }
  return tenors;
}

// Sorted unique maturity axis, matching the analytics level table.
std::vector<double> maturity_axis(const irmap::Dataset& data) {
  std::set<double> months;
  for (const auto& tenor : data.tenors) months.insert(tenor.months);
  for (const auto& obs : data.observations) months.insert(obs.maturity_months);
  return {months.begin(), months.end()};
}

// ---------------------------------------------------------------------------
// Model hyperparameter flags shared by `fit` and walk-forward `forecast`.

struct ModelFlags {
  irmap::ModelSpec spec;
  std::string shape_name = "spherical";
  int kriging_neighbors = 0;  // -1 forces the global system on any size

  void register_on(CLI::App* cmd, ConfigBinder& binder) {
    binder.bind("--family", spec.family, "Model family: idw|kriging|svr|mlp");
    binder.bind("--anisotropy", spec.anisotropy,
                "Multiplier on the scaled time axis before any distance");
    binder.bind("--power", spec.idw.power, "IDW inverse-distance power");
    binder.bind("--idw-neighbors", spec.idw.neighbors,
                "IDW neighborhood size, 0 = all points");
    binder.bind("--tie-epsilon", spec.idw.tie_epsilon,
                "Scaled distance treated as a coincident point");
    binder.bind("--shape", shape_name,
                "Variogram shape: spherical|exponential|gaussian|pure_nugget");
    binder.bind("--bins", spec.kriging_bins, "Empirical variogram bin count");
    binder.bind("--kriging-neighbors", kriging_neighbors,
                "Kriging neighborhood: k>0 local, 0 auto, -1 global");
    binder.bind("--c", spec.svr.c, "SVR box constraint C");
    binder.bind("--epsilon", spec.svr.epsilon, "SVR insensitive tube width");
    binder.bind("--sigma", spec.svr.sigma, "SVR Gaussian kernel width");
    binder.bind("--tol", spec.svr.tol, "SVR KKT tolerance");
    binder.bind("--hidden", spec.mlp.hidden_layers,
                "MLP hidden layer widths, e.g. --hidden 25 25");
    binder.bind("--lr", spec.mlp.learning_rate, "MLP learning rate");
    binder.bind("--momentum", spec.mlp.momentum, "MLP momentum");
    binder.bind("--epochs", spec.mlp.max_epochs, "MLP epoch budget");
    binder.bind("--patience", spec.mlp.patience,
                "MLP early-stopping patience, epochs");
  }

  // Panels above this size switch auto-mode kriging to a local neighborhood.
  static constexpr int kGlobalKrigingLimit = 3000;

  irmap::ModelSpec build(std::uint64_t seed, std::size_t n_train) {
    spec.kriging_shape = irmap::variogram_shape_from_string(shape_name);
    if (kriging_neighbors < 0) {
      spec.kriging.neighbors = 0;
    } else if (kriging_neighbors == 0) {
      spec.kriging.neighbors =
          n_train > kGlobalKrigingLimit ? 64 : 0;
    } else {
      spec.kriging.neighbors = kriging_neighbors;
    }
    spec.seed = seed;
    spec.validate();
    return spec;
  }
};

json metrics_json(const irmap::Metrics& m) {
  return json{{"rmse", m.rmse}, {"mae", m.mae}, {"bias", m.bias}};
}

irmap::Metrics score_indices(const irmap::SurfaceModel& model,
                             const irmap::Dataset& data,
                             const std::vector<int>& indices) {
  irmap::Vector observed(static_cast<Eigen::Index>(indices.size()));
  irmap::Vector predicted(static_cast<Eigen::Index>(indices.size()));
  for (std::size_t i = 0; i < indices.size(); ++i) {
    const auto& obs = data.observations[static_cast<std::size_t>(indices[i])];
    observed(static_cast<Eigen::Index>(i)) = obs.rate;
    predicted(static_cast<Eigen::Index>(i)) =
        model.predict(obs.maturity_months, obs.day_index);
  }
  return irmap::compute_metrics(observed, predicted);
}

// ---------------------------------------------------------------------------
// synth

struct SynthCommand {
  CommonOptions common;
  int days = 100;
  std::vector<std::string> tenor_labels;
  double noise_sd = 0.0;
  double lambda = 0.0609;
  std::string start_date = "2000-01-03";

  struct DriveFlags {
    std::string mode = "constant";
    double start = 0.0;
    double slope = 0.0;
    double mean = 0.0;
    double phi = 0.0;
    double sd = 0.0;

    irmap::FactorDrive build(const std::string& which) const {
      irmap::FactorDrive drive;
      if (mode == "constant") {
        drive.mode = irmap::FactorDrive::Mode::Constant;
      } else if (mode == "linear") {
        drive.mode = irmap::FactorDrive::Mode::Linear;
      } else if (mode == "ar1") {
        drive.mode = irmap::FactorDrive::Mode::Ar1;
      } else {
        throw irmap::ConfigError("unknown " + which + " mode: " + mode);
      }
      drive.start = start;
      drive.slope = slope;
      drive.mean = mean;
      drive.phi = phi;
      drive.shock_sd = sd;
      return drive;
    }
  };
  DriveFlags level{.start = 3.0};
  DriveFlags slope{.start = -1.0};
  DriveFlags curvature{.start = 0.5};

  void run() {
    const json config = common.load_config();
    binder->apply(config);
    if (days < 2) throw irmap::ConfigError("synth needs at least 2 days");
    if (noise_sd < 0.0) throw irmap::ConfigError("noise sd must be >= 0");

    irmap::FactorPathSpec path_spec;
    path_spec.beta0 = level.build("level");
    path_spec.beta1 = slope.build("slope");
    path_spec.beta2 = curvature.build("curvature");
    path_spec.lambda = lambda;

    const auto factors =
        irmap::generate_factor_paths(path_spec, days, common.seed);
    const irmap::Dataset panel = irmap::synthesize_panel(
        factors, parse_tenors(tenor_labels), noise_sd, common.seed, start_date);

    const auto path = common.artifact("panel.csv");
    irmap::save_panel_file(panel, path.string());
    std::cout << "wrote " << path.string() << '\n';
  }

  std::unique_ptr<ConfigBinder> binder;
};

void register_drive(ConfigBinder& binder, const std::string& prefix,
                    SynthCommand::DriveFlags& drive) {
  binder.bind("--" + prefix + "-mode", drive.mode,
              "Factor drive: constant|linear|ar1");
  binder.bind("--" + prefix + "-start", drive.start, "Factor value on day 0");
  binder.bind("--" + prefix + "-slope", drive.slope,
              "Linear drift per day (linear mode)");
  binder.bind("--" + prefix + "-mean", drive.mean, "Long-run mean (ar1 mode)");
  binder.bind("--" + prefix + "-phi", drive.phi, "Persistence (ar1 mode)");
  binder.bind("--" + prefix + "-sd", drive.sd, "Innovation sd (ar1 mode)");
}

void setup_synth(CLI::App& app, std::shared_ptr<SynthCommand> cmd) {
  CLI::App* sub = app.add_subcommand(
      "synth", "Generate a synthetic rate panel from factor dynamics");
  cmd->binder = std::make_unique<ConfigBinder>(sub);
  ConfigBinder& binder = *cmd->binder;
  cmd->common.register_on(sub, binder);
  binder.bind("--days", cmd->days, "Panel length in consecutive days");
  binder.bind("--tenors", cmd->tenor_labels,
              "Tenor labels, default 1W..10Y");
  binder.bind("--noise-sd", cmd->noise_sd, "Observation noise sd, rate units");
  binder.bind("--lambda", cmd->lambda, "Curve decay per month");
  binder.bind("--start-date", cmd->start_date, "ISO date of day 0");
  register_drive(binder, "level", cmd->level);
  register_drive(binder, "slope", cmd->slope);
  register_drive(binder, "curv", cmd->curvature);
  sub->callback([cmd] { cmd->run(); });
}

// ---------------------------------------------------------------------------
// fit

struct FitCommand {
  CommonOptions common;
  ModelFlags model_flags;
  std::string input;

  void run() {
    const json config = common.load_config();
    binder->apply(config);
    if (input.empty()) throw irmap::ConfigError("fit needs --input <panel>");

    const irmap::Dataset data = irmap::load_panel_file(input);
    const auto split =
        irmap::split_80_20(data.observations.size(), common.seed);
    const irmap::ModelSpec spec =
        model_flags.build(common.seed, split.train.size());

    const auto model = irmap::fit_surface_model(spec, data, split);

    const auto model_path = common.artifact("model.json");
    const auto metrics_path = common.artifact("metrics.json");
    ensure_distinct(input, model_path);
    ensure_distinct(input, metrics_path);
    irmap::save_model_file(*model, model_path.string());

    json metrics{{"model", spec.family},
                 {"n_train", split.train.size()},
                 {"n_test", split.test.size()},
                 {"train", metrics_json(score_indices(*model, data, split.train))},
                 {"test", metrics_json(score_indices(*model, data, split.test))}};
    write_json_file(metrics_path, metrics);
    std::cout << "wrote " << model_path.string() << " and "
              << metrics_path.string() << '\n';
  }

  std::unique_ptr<ConfigBinder> binder;
};

void setup_fit(CLI::App& app, std::shared_ptr<FitCommand> cmd) {
  CLI::App* sub = app.add_subcommand(
      "fit", "Fit a surface model on an 80/20 split of a panel");
  cmd->binder = std::make_unique<ConfigBinder>(sub);
  ConfigBinder& binder = *cmd->binder;
  cmd->common.register_on(sub, binder);
  binder.bind("--input", cmd->input, "Panel CSV path");
  cmd->model_flags.register_on(sub, binder);
  sub->callback([cmd] { cmd->run(); });
}

// ---------------------------------------------------------------------------
// map

struct MapCommand {
  CommonOptions common;
  std::string model_path;
  int nx = 13;   // maturity axis resolution
  int ny = 100;  // day axis resolution
  double mat_min = std::numeric_limits<double>::quiet_NaN();
  double mat_max = std::numeric_limits<double>::quiet_NaN();
  double day_min = std::numeric_limits<double>::quiet_NaN();
  double day_max = std::numeric_limits<double>::quiet_NaN();

  void run() {
    const json config = common.load_config();
    binder->apply(config);
    if (model_path.empty()) throw irmap::ConfigError("map needs --model");
    if (nx < 2 || ny < 2) {
      throw irmap::ConfigError("grid resolution must be >= 2 per axis");
    }

    const auto model = irmap::load_model_file(model_path);
    const auto& scaling = model->scaling();
    const double x_lo = std::isnan(mat_min) ? scaling.x_min : mat_min;
    const double x_hi = std::isnan(mat_max) ? scaling.x_max : mat_max;
    const double y_lo = std::isnan(day_min) ? scaling.y_min : day_min;
    const double y_hi = std::isnan(day_max) ? scaling.y_max : day_max;
    if (!(x_hi > x_lo) || !(y_hi > y_lo)) {
      throw irmap::ConfigError("grid bounds must have positive extent");
    }

    irmap::Vector maturities(nx), days(ny);
    for (int j = 0; j < nx; ++j) {
      maturities(j) = x_lo + (x_hi - x_lo) * j / (nx - 1);
    }
    for (int i = 0; i < ny; ++i) {
      days(i) = y_lo + (y_hi - y_lo) * i / (ny - 1);
    }

    const irmap::SurfaceGrid grid =
        irmap::map_surface(*model, maturities, days);

    std::string csv = "maturity_months,day_index,rate\n";
    for (Eigen::Index i = 0; i < grid.days.size(); ++i) {
      for (Eigen::Index j = 0; j < grid.maturities.size(); ++j) {
        csv += irmap::fmt_double(grid.maturities(j));
        csv += ',';
        csv += irmap::fmt_double(grid.days(i));
        csv += ',';
        csv += irmap::fmt_double(grid.values(i, j));
        csv += '\n';
      }
    }
    const auto csv_path = common.artifact("surface.csv");
    const auto ppm_path = common.artifact("surface.ppm");
    const auto sidecar_path = common.artifact("surface.json");
    write_text_file(csv_path, csv);
    irmap::write_heatmap_ppm_file(grid, ppm_path.string());

    json axes{{"maturity_months", json::array()}, {"day_index", json::array()}};
    for (Eigen::Index j = 0; j < grid.maturities.size(); ++j) {
      axes["maturity_months"].push_back(grid.maturities(j));
    }
    for (Eigen::Index i = 0; i < grid.days.size(); ++i) {
      axes["day_index"].push_back(grid.days(i));
    }
    json sidecar{{"model", grid.model_tag},
                 {"config", json{{"nx", nx},
                                 {"ny", ny},
                                 {"maturity_min", x_lo},
                                 {"maturity_max", x_hi},
                                 {"day_min", y_lo},
                                 {"day_max", y_hi}}},
                 {"axes", axes}};
    write_json_file(sidecar_path, sidecar);
    std::cout << "wrote " << csv_path.string() << ", " << ppm_path.string()
              << " and " << sidecar_path.string() << '\n';
  }

  std::unique_ptr<ConfigBinder> binder;
};

void setup_map(CLI::App& app, std::shared_ptr<MapCommand> cmd) {
  CLI::App* sub = app.add_subcommand(
      "map", "Evaluate a fitted model on a grid: CSV plus PPM heatmap");
  cmd->binder = std::make_unique<ConfigBinder>(sub);
  ConfigBinder& binder = *cmd->binder;
  cmd->common.register_on(sub, binder);
  binder.bind("--model", cmd->model_path, "Fitted model JSON path");
  binder.bind("--nx", cmd->nx, "Grid points along the maturity axis");
  binder.bind("--ny", cmd->ny, "Grid points along the day axis");
  binder.bind("--mat-min", cmd->mat_min, "Maturity lower bound, months");
  binder.bind("--mat-max", cmd->mat_max, "Maturity upper bound, months");
  binder.bind("--day-min", cmd->day_min, "Day lower bound");
  binder.bind("--day-max", cmd->day_max, "Day upper bound");
  sub->callback([cmd] { cmd->run(); });
}

// ---------------------------------------------------------------------------
// reconstruct

struct ReconstructCommand {
  CommonOptions common;
  std::string model_path;
  double day = 0.0;
  std::vector<std::string> tenor_labels;

  void run() {
    const json config = common.load_config();
    binder->apply(config);
    if (model_path.empty()) {
      throw irmap::ConfigError("reconstruct needs --model");
    }
    const auto model = irmap::load_model_file(model_path);
    const auto tenors = parse_tenors(tenor_labels);
    const auto curve = irmap::reconstruct_curve(*model, day, tenors);

    std::string csv = "tenor,maturity_months,rate\n";
    for (std::size_t i = 0; i < curve.size(); ++i) {
      csv += tenors[i].label;
      csv += ',';
      csv += irmap::fmt_double(curve[i].first);
      csv += ',';
      csv += irmap::fmt_double(curve[i].second);
      csv += '\n';
    }
    const auto csv_path = common.artifact("curve.csv");
    write_text_file(csv_path, csv);
    std::cout << "wrote " << csv_path.string() << '\n';

    try {
      const irmap::CurveFactors factors = irmap::curve_factors(curve);
      write_json_file(common.artifact("factors.json"),
                      json{{"level", factors.level},
                           {"slope", factors.slope},
                           {"curvature", factors.curvature}});
    } catch (const irmap::DataError&) {
      // factor tenors absent from the requested curve; no factors artifact
    }
  }

  std::unique_ptr<ConfigBinder> binder;
};

void setup_reconstruct(CLI::App& app, std::shared_ptr<ReconstructCommand> cmd) {
  CLI::App* sub = app.add_subcommand(
      "reconstruct", "In-sample curve at a fixed day from a fitted model");
  cmd->binder = std::make_unique<ConfigBinder>(sub);
  ConfigBinder& binder = *cmd->binder;
  cmd->common.register_on(sub, binder);
  binder.bind("--model", cmd->model_path, "Fitted model JSON path");
  binder.bind("--day", cmd->day, "Day index inside the training span");
  binder.bind("--tenors", cmd->tenor_labels, "Tenor labels, default 1W..10Y");
  sub->callback([cmd] { cmd->run(); });
}

// ---------------------------------------------------------------------------
// forecast

struct ForecastCommand {
  CommonOptions common;
  ModelFlags model_flags;
  std::string model_path;
  std::string input;
  std::string truth_path;
  int horizon = 31;
  double target_day = std::numeric_limits<double>::quiet_NaN();
  std::vector<std::string> tenor_labels;
  std::vector<int> walk;  // window, step

  void run() {
    const json config = common.load_config();
    binder->apply(config);
    if (horizon < 1) throw irmap::ConfigError("horizon must be >= 1 day");

    if (!walk.empty()) {
      run_walk_forward();
      return;
    }

    if (model_path.empty()) {
      throw irmap::ConfigError("forecast needs --model (or --walk-forward)");
    }
    const auto model = irmap::load_model_file(model_path);

    irmap::ForecastSpec spec;
    spec.horizon_days = horizon;
    spec.tenors = parse_tenors(tenor_labels);
    spec.target_day = std::isnan(target_day)
                          ? model->max_training_day() + horizon
                          : target_day;

    irmap::Dataset truth;
    const bool has_truth = !truth_path.empty();
    if (has_truth) truth = irmap::load_panel_file(truth_path);

    const irmap::ForecastResult result =
        irmap::forecast_curve(*model, spec, has_truth ? &truth : nullptr);

    std::string csv = "tenor,maturity_months,rate,truth,abs_error\n";
    for (const auto& row : result.rows) {
      csv += row.label;
      csv += ',';
      csv += irmap::fmt_double(row.months);
      csv += ',';
      csv += irmap::fmt_double(row.rate);
      csv += ',';
      if (row.truth) csv += irmap::fmt_double(*row.truth);
      csv += ',';
      if (row.abs_error) csv += irmap::fmt_double(*row.abs_error);
      csv += '\n';
    }
    const auto csv_path = common.artifact("forecast.csv");
    write_text_file(csv_path, csv);

    json summary{{"target_day", result.target_day},
                 {"horizon_days", horizon},
                 {"n_scored", 0}};
    int n_scored = 0;
    for (const auto& row : result.rows) {
      if (row.abs_error) ++n_scored;
    }
    summary["n_scored"] = n_scored;
    if (result.mae) summary["mae"] = *result.mae;
    write_json_file(common.artifact("forecast_summary.json"), summary);
    std::cout << "wrote " << csv_path.string() << '\n';
  }

  void run_walk_forward() {
    if (walk.size() != 2) {
      throw irmap::ConfigError("--walk-forward takes <window> <step>");
    }
    if (input.empty()) {
      throw irmap::ConfigError("walk-forward mode needs --input <panel>");
    }
    const irmap::Dataset data = irmap::load_panel_file(input);
    const irmap::ModelSpec spec =
        model_flags.build(common.seed, data.observations.size());
    const auto results =
        irmap::walk_forward(data, spec, walk[0], walk[1], horizon);

    std::string csv =
        "window_start,window_end,target_day,max_train_day,n_scored,mae,rmse\n";
    for (const auto& row : results) {
      csv += std::to_string(row.window_start);
      csv += ',';
      csv += std::to_string(row.window_end);
      csv += ',';
      csv += irmap::fmt_double(row.target_day);
      csv += ',';
      csv += irmap::fmt_double(row.max_train_day);
      csv += ',';
      csv += std::to_string(row.n_scored);
      csv += ',';
      csv += irmap::fmt_double(row.mae);
      csv += ',';
      csv += irmap::fmt_double(row.rmse);
      csv += '\n';
    }
    const auto csv_path = common.artifact("walkforward.csv");
    write_text_file(csv_path, csv);
    std::cout << "wrote " << csv_path.string() << '\n';
  }

  std::unique_ptr<ConfigBinder> binder;
};

void setup_forecast(CLI::App& app, std::shared_ptr<ForecastCommand> cmd) {
  CLI::App* sub = app.add_subcommand(
      "forecast",
      "Out-of-sample curve from a fitted model, or walk-forward scoring");
  cmd->binder = std::make_unique<ConfigBinder>(sub);
  ConfigBinder& binder = *cmd->binder;
  cmd->common.register_on(sub, binder);
  binder.bind("--model", cmd->model_path, "Fitted model JSON path");
  binder.bind("--input", cmd->input, "Panel CSV path (walk-forward mode)");
  binder.bind("--truth", cmd->truth_path, "Panel CSV with realized rates");
  binder.bind("--horizon", cmd->horizon, "Days past the training span");
  binder.bind("--target-day", cmd->target_day,
              "Explicit forecast day (overrides --horizon)");
  binder.bind("--tenors", cmd->tenor_labels, "Tenor labels, default 1W..10Y");
  binder.bind("--walk-forward", cmd->walk, "Window and step in days")
      ->expected(2);
  cmd->model_flags.register_on(sub, binder);
  sub->callback([cmd] { cmd->run(); });
}

// ---------------------------------------------------------------------------
// diagnose

struct DiagnoseCommand {
  CommonOptions common;
  std::string model_path;
  std::string input;
  double threshold = 0.9;

  void run() {
    const json config = common.load_config();
    binder->apply(config);
    if (model_path.empty() || input.empty()) {
      throw irmap::ConfigError("diagnose needs --model and --input");
    }
    const auto model = irmap::load_model_file(model_path);
    const irmap::Dataset data = irmap::load_panel_file(input);

    irmap::ScalingSpec expected = data.scaling;
    expected.anisotropy = model->scaling().anisotropy;
    if (!irmap::scaling_close(expected, model->scaling(), 1e-6)) {
      throw irmap::DataError("panel does not match the model's scaling box");
    }

    const std::size_t n = data.observations.size();
    irmap::Matrix points(static_cast<Eigen::Index>(n), 2);
    irmap::Vector residuals(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) {
      const auto& obs = data.observations[i];
      points.row(static_cast<Eigen::Index>(i)) =
          model->scaling().embed(obs).transpose();
      residuals(static_cast<Eigen::Index>(i)) =
          obs.rate - model->predict(obs.maturity_months, obs.day_index);
    }
    const irmap::ResidualReport report =
        irmap::residual_nugget_check(points, residuals, threshold);

    json lags = json::array();
    for (const auto& lag : report.empirical.lags) {
      lags.push_back(json{{"h", lag.h_center},
                          {"gamma", lag.gamma_hat},
                          {"pairs", lag.pair_count}});
    }
    write_json_file(
        common.artifact("residuals.json"),
        json{{"model", model->tag()},
             {"verdict", irmap::to_string(report.verdict)},
             {"nugget_ratio", report.nugget_ratio},
             {"residual_variance", report.residual_variance},
             {"n_points", n},
             {"fit",
              {{"shape", irmap::to_string(report.fit.shape)},
               {"nugget", report.fit.nugget},
               {"sill", report.fit.sill},
               {"range", report.fit.range}}},
             {"empirical",
              {{"max_lag", report.empirical.max_lag},
               {"n_bins", report.empirical.n_bins},
               {"lags", std::move(lags)}}}});

    const irmap::StylizedFacts facts = irmap::stylized_facts(data);
    json curve = json::array();
    for (const auto& [months, rate] : facts.average_curve) {
      curve.push_back(json::array({months, rate}));
    }
    json change_sd = json::array();
    for (const auto& [months, sd] : facts.change_sd) {
      change_sd.push_back(json::array({months, sd}));
    }
    json facts_json{{"n_dates", facts.n_dates},
                    {"average_curve", std::move(curve)},
                    {"average_curve_increasing", facts.average_curve_increasing},
                    {"average_curve_concave", facts.average_curve_concave},
                    {"change_sd", std::move(change_sd)}};
    if (facts.short_end_more_volatile) {
      facts_json["short_end_more_volatile"] = *facts.short_end_more_volatile;
    }
    if (facts.inversion_count) {
      facts_json["inversion_count"] = *facts.inversion_count;
    }
    write_json_file(common.artifact("stylized_facts.json"), facts_json);

    const irmap::Matrix corr = irmap::correlation_matrix(data);
    const std::vector<double> months = maturity_axis(data);
    std::string csv = "months";
    for (const double m : months) {
      csv += ',';
      csv += irmap::fmt_double(m);
    }
    csv += '\n';
    for (Eigen::Index r = 0; r < corr.rows(); ++r) {
      csv += irmap::fmt_double(months[static_cast<std::size_t>(r)]);
      for (Eigen::Index c = 0; c < corr.cols(); ++c) {
        csv += ',';
        csv += std::isnan(corr(r, c)) ? "nan" : irmap::fmt_double(corr(r, c));
      }
      csv += '\n';
    }
    write_text_file(common.artifact("correlation.csv"), csv);
    std::cout << "verdict: " << irmap::to_string(report.verdict) << '\n';
  }

  std::unique_ptr<ConfigBinder> binder;
};

void setup_diagnose(CLI::App& app, std::shared_ptr<DiagnoseCommand> cmd) {
  CLI::App* sub = app.add_subcommand(
      "diagnose",
      "Residual variography, stylized facts and tenor correlations");
  cmd->binder = std::make_unique<ConfigBinder>(sub);
  ConfigBinder& binder = *cmd->binder;
  cmd->common.register_on(sub, binder);
  binder.bind("--model", cmd->model_path, "Fitted model JSON path");
  binder.bind("--input", cmd->input, "Panel CSV the model was fitted on");
  binder.bind("--threshold", cmd->threshold,
              "Nugget ratio above which residuals count as unstructured");
  sub->callback([cmd] { cmd->run(); });
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Interest-rate panels as spatial data: synthesize, fit, map, "
               "reconstruct, forecast and diagnose."};
  app.require_subcommand(1);

  auto synth = std::make_shared<SynthCommand>();
  auto fit = std::make_shared<FitCommand>();
  auto map = std::make_shared<MapCommand>();
  auto reconstruct = std::make_shared<ReconstructCommand>();
  auto forecast = std::make_shared<ForecastCommand>();
  auto diagnose = std::make_shared<DiagnoseCommand>();
  setup_synth(app, synth);
  setup_fit(app, fit);
  setup_map(app, map);
  setup_reconstruct(app, reconstruct);
  setup_forecast(app, forecast);
  setup_diagnose(app, diagnose);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  } catch (const irmap::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const irmap::DataError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return 3;
  } catch (const irmap::FitError& e) {
    std::cerr << "fit error: " << e.what() << '\n';
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 4;
  }
  return 0;
}
