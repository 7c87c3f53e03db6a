#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "deepesn/experiment.hpp"
#include "deepesn/selection.hpp"

namespace deepesn {

inline constexpr int kConfigSchemaVersion = 1;

/// Settings for `run` and `grid`. `run` uses `hyperparameters` with
/// `guesses` instances; `grid` searches `grid`.
struct ExperimentConfig {
  std::string preset;
  std::filesystem::path dataset;
  PipelineConfig pipeline;
  ReservoirPoint hyperparameters{0.9, 0.5, 1.5};
  double lambda_r = 1e-3;
  int guesses = 5;
  GridSpec grid;
  std::uint64_t seed = 1;
  int workers = 1;
  std::filesystem::path output = "report.json";
  bool timing = true;

  /// Single-point grid equivalent to `hyperparameters` and `lambda_r`.
  GridSpec run_grid() const;
  void validate() const;
};

std::vector<std::string> preset_names();

/// Named defaults: "deepesn-paper" (30 x 200, 1% connectivity),
/// "esn-paper" (1 x 6000, 1% connectivity) and "smoke" (tiny, fast).
ExperimentConfig preset_config(std::string_view name);

/// Applies a JSON document on top of its preset (or the built-in defaults).
/// Unknown keys and wrong types are rejected. Relative paths resolve
/// against `base_dir`.
ExperimentConfig parse_experiment_config(const nlohmann::json& doc, const std::filesystem::path& base_dir = {});
ExperimentConfig load_experiment_config(const std::filesystem::path& path);

}  // namespace deepesn
