#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "deepesn/data.hpp"
#include "deepesn/experiment.hpp"

namespace deepesn {

/// Hyperparameter grid. Defaults are the reservoir-computing search ranges
/// used for the polyphonic-music benchmarks.
struct GridSpec {
  std::vector<double> spectral_radius{0.1, 0.3, 0.5, 0.7, 0.9, 1.0};
  std::vector<double> leaky_rate{0.1, 0.3, 0.5, 0.7, 0.9, 1.0};
  std::vector<double> input_scaling{0.5, 1.5, 2.5};
  std::vector<double> lambda_r{1e-4, 1e-3, 1e-2, 1e-1};
  int guesses = 5;

  std::size_t reservoir_points() const {
    return spectral_radius.size() * leaky_rate.size() * input_scaling.size();
  }
  std::size_t size() const { return reservoir_points() * lambda_r.size(); }
  void validate() const;
};

/// Grid value rho = 1.0 violates the strict echo-state bound, so it is run
/// as this value instead.
inline constexpr double kRhoOneSubstitute = 1.0 - 1e-8;

/// rho as actually used for initialization (1.0 -> kRhoOneSubstitute).
double effective_rho(double listed);

struct TrialReport {
  std::size_t index = 0;
  /// Value as listed in the grid.
  double spectral_radius = 0.0;
  /// Value used for initialization.
  double spectral_radius_used = 0.0;
  double leaky_rate = 0.0;
  double input_scaling = 0.0;
  double lambda_r = 0.0;

  std::vector<std::uint64_t> seeds;
  std::vector<double> valid_acc;
  std::vector<double> test_acc;
  std::vector<double> thresholds;
  std::vector<double> guess_seconds;
  double valid_mean = 0.0;
  double valid_std = 0.0;
  double test_mean = 0.0;
  double test_std = 0.0;
  /// Train + test wall-clock summed over guesses.
  double seconds = 0.0;
  Index skipped_sequences = 0;

  bool failed = false;
  std::string error;
};

struct GridResult {
  std::vector<TrialReport> trials;
  /// Index of the trial with the best mean validation ACC (lowest index on
  /// ties); empty when every trial failed.
  std::optional<std::size_t> selected;
  std::vector<std::string> notes;
};

/// Seed for one guess of one reservoir point. Derived from the values
/// rather than the position, so duplicated grid values share instances.
std::uint64_t guess_seed(std::uint64_t master_seed, const ReservoirPoint& point, int guess);

/// Exhaustive search. Each reservoir point is instantiated `guesses` times;
/// each instance serves every lambda_r. Work runs on `workers` threads and
/// results are merged by grid index, so the output does not depend on the
/// worker count.
GridResult grid_search(const PianoRollDataset& dataset, const PipelineConfig& config, const GridSpec& grid,
                       std::uint64_t master_seed, int workers = 1);

/// Sample mean and standard deviation (n - 1 denominator; 0 for n = 1).
std::pair<double, double> mean_and_std(const std::vector<double>& values);

// Free-parameter accounting.

enum class RecurrentModel { kSrn, kLstm, kGru };

std::optional<RecurrentModel> parse_recurrent_model(std::string_view name);
std::string_view recurrent_model_name(RecurrentModel model);

/// Trainable parameters of a reservoir model: a readout with bias over the
/// concatenated state plus an IP gain and bias per reservoir unit.
std::int64_t count_free_parameters(std::int64_t n_outputs, std::int64_t n_layers, std::int64_t units_per_layer);

/// Trainable parameters of a fully-trained recurrent baseline with `units`
/// hidden units and a dense output layer with bias.
std::int64_t recurrent_free_parameters(RecurrentModel model, std::int64_t n_inputs, std::int64_t n_outputs,
                                       std::int64_t units);

enum class BudgetRule {
  /// Unit count whose parameter total is closest to the budget (fewer units
  /// on ties).
  kNearest,
  /// Largest unit count whose parameter total does not exceed the budget.
  kAtMost,
};

struct UnitBudget {
  std::int64_t units = 0;
  std::int64_t parameters = 0;
};

UnitBudget solve_units_for_budget(RecurrentModel model, std::int64_t n_inputs, std::int64_t n_outputs,
                                  std::int64_t budget, BudgetRule rule = BudgetRule::kNearest);

}  // namespace deepesn
