#include "deepesn/report.hpp"

namespace deepesn {

using nlohmann::ordered_json;

ordered_json trial_to_json(const TrialReport& trial, const ReportOptions& options) {
  ordered_json j;
  j["index"] = trial.index;
  j["hyperparameters"] = {{"spectral_radius", trial.spectral_radius},
                          {"spectral_radius_used", trial.spectral_radius_used},
                          {"leaky_rate", trial.leaky_rate},
                          {"input_scaling", trial.input_scaling},
                          {"lambda_r", trial.lambda_r}};
  j["status"] = trial.failed ? "failed" : "ok";
  if (trial.failed) j["error"] = trial.error;
  j["seeds"] = trial.seeds;
  j["valid_acc"] = trial.valid_acc;
  j["test_acc"] = trial.test_acc;
  j["thresholds"] = trial.thresholds;
  if (!trial.failed) {
    j["valid_mean"] = trial.valid_mean;
    j["valid_std"] = trial.valid_std;
    j["test_mean"] = trial.test_mean;
    j["test_std"] = trial.test_std;
  }
  j["skipped_sequences"] = trial.skipped_sequences;
  if (options.include_timing) {
    j["seconds"] = trial.seconds;
    j["guess_seconds"] = trial.guess_seconds;
  }
  return j;
}

ordered_json pipeline_to_json(const PipelineConfig& config) {
  ordered_json j;
  j["architecture"] = {{"n_layers", config.architecture.n_layers},
                       {"units_per_layer", config.architecture.units_per_layer},
                       {"connectivity", config.architecture.connectivity}};
  j["ip"] = {{"enabled", config.ip_enabled},
             {"target_std", config.ip.target_std},
             {"target_mean", config.ip.target_mean},
             {"learning_rate", config.ip.learning_rate},
             {"epochs", config.ip.epochs}};
  j["washout"] = config.washout;
  j["threshold"] = {{"policy", config.threshold.policy == ThresholdPolicy::kFixed ? "fixed" : "tuned"},
                    {"value", config.threshold.value}};
  j["accuracy"] = config.aggregation == AccuracyAggregation::kPooled ? "pooled" : "macro";
  return j;
}

ordered_json grid_to_json(const GridSpec& grid) {
  ordered_json j;
  j["spectral_radius"] = grid.spectral_radius;
  j["leaky_rate"] = grid.leaky_rate;
  j["input_scaling"] = grid.input_scaling;
  j["lambda_r"] = grid.lambda_r;
  j["guesses"] = grid.guesses;
  return j;
}

ordered_json report_to_json(const ReportContext& context, const GridResult& result, const ReportOptions& options) {
  ordered_json j;
  j["schema_version"] = kReportSchemaVersion;
  j["command"] = context.command;
  j["dataset"] = {{"name", context.dataset_name}, {"dim", context.dataset_dim}};
  j["master_seed"] = context.master_seed;
  j["pipeline"] = pipeline_to_json(context.pipeline);
  j["grid"] = grid_to_json(context.grid);
  j["notes"] = result.notes;
  if (result.selected) {
    j["selected"] = *result.selected;
    const TrialReport& best = result.trials[*result.selected];
    j["selected_summary"] = {{"spectral_radius", best.spectral_radius},
                             {"leaky_rate", best.leaky_rate},
                             {"input_scaling", best.input_scaling},
                             {"lambda_r", best.lambda_r},
                             {"valid_mean", best.valid_mean},
                             {"test_mean", best.test_mean},
                             {"test_std", best.test_std}};
    if (options.include_timing) j["selected_summary"]["seconds"] = best.seconds;
  } else {
    j["selected"] = nullptr;
  }
  ordered_json trials = ordered_json::array();
  for (const auto& t : result.trials) trials.push_back(trial_to_json(t, options));
  j["trials"] = std::move(trials);
  return j;
}

std::string render_report(const ReportContext& context, const GridResult& result, const ReportOptions& options) {
  return report_to_json(context, result, options).dump(2) + "\n";
}

}  // namespace deepesn
