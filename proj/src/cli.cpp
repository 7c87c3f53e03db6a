#include "deepesn/cli.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "deepesn/config.hpp"
#include "deepesn/data.hpp"
#include "deepesn/report.hpp"
#include "deepesn/selection.hpp"

namespace deepesn {

namespace {

struct StageError {
  int code;
  std::string kind;
  std::string message;
};

void emit_error(std::ostream& err, const StageError& e) {
  nlohmann::ordered_json record;
  record["error"] = {{"kind", e.kind}, {"message", e.message}};
  err << record.dump() << '\n';
}

struct ExperimentFlags {
  std::string config;
  std::string preset;
  std::string dataset;
  std::optional<std::uint64_t> seed;
  std::optional<int> workers;
  std::string out;
  bool omit_timing = false;
};

void add_experiment_flags(CLI::App* cmd, ExperimentFlags& f) {
  cmd->add_option("--config", f.config, "Experiment config (JSON)")->envname("DEEPESN_CONFIG");
  cmd->add_option("--preset", f.preset, "Named preset: deepesn-paper, esn-paper, smoke")->envname("DEEPESN_PRESET");
  cmd->add_option("--dataset", f.dataset, "Dataset file (overrides the config)")->envname("DEEPESN_DATASET");
  cmd->add_option("--seed", f.seed, "Master seed (u64)")->envname("DEEPESN_SEED");
  cmd->add_option("--workers", f.workers, "Worker threads")->envname("DEEPESN_WORKERS")->check(CLI::PositiveNumber);
  cmd->add_option("--out", f.out, "Report output path")->envname("DEEPESN_OUT");
  cmd->add_flag("--omit-timing", f.omit_timing, "Leave wall-clock fields out of the report");
}

ExperimentConfig resolve_config(const ExperimentFlags& f) {
  ExperimentConfig cfg;
  if (!f.config.empty()) {
    cfg = load_experiment_config(f.config);
  } else if (!f.preset.empty()) {
    cfg = preset_config(f.preset);
  } else {
    throw ParseError("config: one of --config or --preset is required");
  }
  if (!f.dataset.empty()) cfg.dataset = f.dataset;
  if (f.seed) cfg.seed = *f.seed;
  if (f.workers) cfg.workers = *f.workers;
  if (!f.out.empty()) cfg.output = f.out;
  if (f.omit_timing) cfg.timing = false;
  cfg.validate();
  if (cfg.dataset.empty()) throw ParseError("config: no dataset given");
  if (!std::filesystem::exists(cfg.dataset))
    throw ParseError("config: dataset file '" + cfg.dataset.string() + "' does not exist");
  return cfg;
}

int run_experiment(const std::string& command, const ExperimentFlags& flags, std::ostream& out, std::ostream& err) {
  ExperimentConfig cfg;
  try {
    cfg = resolve_config(flags);
  } catch (const std::exception& e) {
    emit_error(err, {kExitUsage, "config_error", e.what()});
    return kExitUsage;
  }

  PianoRollDataset dataset;
  try {
    dataset = load_dataset(cfg.dataset);
  } catch (const std::exception& e) {
    emit_error(err, {kExitData, "data_error", e.what()});
    return kExitData;
  }

  const GridSpec grid = command == "run" ? cfg.run_grid() : cfg.grid;
  GridResult result;
  try {
    result = grid_search(dataset, cfg.pipeline, grid, cfg.seed, cfg.workers);
  } catch (const ContractViolation& e) {
    emit_error(err, {kExitUsage, "contract_violation", e.what()});
    return kExitUsage;
  }
  for (const auto& note : result.notes) err << "note: " << note << '\n';

  ReportContext context{command, dataset.name, dataset.dim, cfg.seed, cfg.pipeline, grid};
  const std::string report = render_report(context, result, ReportOptions{cfg.timing});
  {
    std::ofstream file(cfg.output, std::ios::binary);
    if (!file) {
      emit_error(err, {kExitFailure, "io_error", "cannot write report '" + cfg.output.string() + "'"});
      return kExitFailure;
    }
    file << report;
  }

  std::size_t failed = 0;
  for (const auto& t : result.trials) failed += t.failed ? 1 : 0;
  out << command << ": " << result.trials.size() << " trial(s), " << failed << " failed; report -> "
      << cfg.output.string() << '\n';
  if (!result.selected) {
    emit_error(err, {kExitNumerical, "all_trials_failed",
                     result.trials.empty() ? "no trials" : result.trials.front().error});
    return kExitNumerical;
  }
  const TrialReport& best = result.trials[*result.selected];
  out << "selected #" << best.index << " rho=" << best.spectral_radius << " a=" << best.leaky_rate
      << " sigma=" << best.input_scaling << " lambda_r=" << best.lambda_r << "  valid ACC " << 100.0 * best.valid_mean
      << "%  test ACC " << 100.0 * best.test_mean << "% (" << 100.0 * best.test_std << ")";
  if (cfg.timing) out << "  " << best.seconds << " s";
  out << '\n';
  return kExitOk;
}

int validate_data(const std::string& path, std::ostream& out, std::ostream& err) {
  try {
    const PianoRollDataset dataset = load_dataset(path);
    const DatasetDiagnostics diag = diagnose(dataset);
    nlohmann::ordered_json j;
    j["name"] = diag.name;
    j["dim"] = diag.dim;
    j["expected_dim"] = diag.expected_dim ? nlohmann::ordered_json(*diag.expected_dim) : nlohmann::ordered_json();
    j["valid"] = true;
    nlohmann::ordered_json splits = nlohmann::ordered_json::array();
    for (const auto& s : diag.splits) {
      splits.push_back({{"split", s.split},
                        {"sequences", s.sequences},
                        {"frames", s.frames},
                        {"active_notes", s.active_notes},
                        {"empty_frames", s.empty_frames},
                        {"too_short", s.too_short},
                        {"min_length", s.min_length},
                        {"max_length", s.max_length}});
      if (s.too_short > 0)
        err << "warning: " << s.split << " has " << s.too_short << " sequence(s) shorter than 2 frames\n";
    }
    j["splits"] = std::move(splits);
    out << j.dump(2) << '\n';
    return kExitOk;
  } catch (const std::exception& e) {
    emit_error(err, {kExitData, "data_error", e.what()});
    return kExitData;
  }
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Deep echo state networks: training, evaluation and grid search on piano-roll data", "deepesn"};
  app.require_subcommand(1);

  ExperimentFlags run_flags, grid_flags;
  auto* run_cmd = app.add_subcommand("run", "Train and test one hyperparameter setting over several guesses");
  add_experiment_flags(run_cmd, run_flags);
  auto* grid_cmd = app.add_subcommand("grid", "Grid search with selection on the validation split");
  add_experiment_flags(grid_cmd, grid_flags);

  std::string validate_path;
  auto* validate_cmd = app.add_subcommand("validate-data", "Check a dataset file and print diagnostics");
  validate_cmd->add_option("path", validate_path, "Dataset file")->required();

  SyntheticSpec synth;
  std::string synth_out;
  auto* synth_cmd = app.add_subcommand("synth-data", "Write a small synthetic dataset");
  synth_cmd->add_option("--out", synth_out, "Output path")->required();
  synth_cmd->add_option("--name", synth.name);
  synth_cmd->add_option("--dim", synth.dim)->check(CLI::PositiveNumber);
  synth_cmd->add_option("--train", synth.train_sequences)->check(CLI::NonNegativeNumber);
  synth_cmd->add_option("--valid", synth.valid_sequences)->check(CLI::NonNegativeNumber);
  synth_cmd->add_option("--test", synth.test_sequences)->check(CLI::NonNegativeNumber);
  synth_cmd->add_option("--min-length", synth.min_length);
  synth_cmd->add_option("--max-length", synth.max_length);
  synth_cmd->add_option("--seed", synth.seed);

  std::string model_name;
  std::int64_t inputs = 0, outputs = 0, layers = 0, units = 0, budget = 0;
  bool at_most = false;
  auto* params_cmd = app.add_subcommand("params", "Free-parameter accounting for reservoir and gated models");
  params_cmd->add_option("--outputs", outputs, "Output dimension N_Y")->required();
  params_cmd->add_option("--layers", layers, "Reservoir layers N_L");
  params_cmd->add_option("--units", units, "Units per reservoir layer N_R");
  params_cmd->add_option("--model", model_name, "Recurrent baseline: srn, lstm or gru");
  params_cmd->add_option("--inputs", inputs, "Input dimension N_U");
  params_cmd->add_option("--budget", budget, "Parameter budget for the baseline");
  params_cmd->add_flag("--at-most", at_most, "Never exceed the budget (default: nearest)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    emit_error(err, {kExitUsage, "usage_error", e.what()});
    return kExitUsage;
  }

  if (*run_cmd) return run_experiment("run", run_flags, out, err);
  if (*grid_cmd) return run_experiment("grid", grid_flags, out, err);
  if (*validate_cmd) return validate_data(validate_path, out, err);
  if (*synth_cmd) {
    try {
      save_dataset(make_synthetic_dataset(synth), synth_out);
    } catch (const std::exception& e) {
      emit_error(err, {kExitUsage, "usage_error", e.what()});
      return kExitUsage;
    }
    out << "wrote " << synth_out << '\n';
    return kExitOk;
  }
  if (*params_cmd) {
    try {
      nlohmann::ordered_json j;
      if (layers > 0 || units > 0) j["reservoir"] = {{"n_layers", layers}, {"units_per_layer", units},
                                                      {"free_parameters", count_free_parameters(outputs, layers, units)}};
      if (!model_name.empty()) {
        const auto model = parse_recurrent_model(model_name);
        if (!model) throw ContractViolation("unknown model '" + model_name + "'");
        const std::int64_t target = budget > 0 ? budget : count_free_parameters(outputs, layers, units);
        const UnitBudget b = solve_units_for_budget(*model, inputs, outputs, target,
                                                    at_most ? BudgetRule::kAtMost : BudgetRule::kNearest);
        j["baseline"] = {{"model", model_name}, {"budget", target}, {"units", b.units}, {"free_parameters", b.parameters}};
      }
      out << j.dump(2) << '\n';
      return kExitOk;
    } catch (const std::exception& e) {
      emit_error(err, {kExitUsage, "usage_error", e.what()});
      return kExitUsage;
    }
  }
  return kExitUsage;
}

}  // namespace deepesn
