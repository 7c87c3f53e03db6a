#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "deepesn/data.hpp"
#include "deepesn/intrinsic_plasticity.hpp"
#include "deepesn/reservoir.hpp"

namespace deepesn {

enum class ThresholdPolicy { kFixed, kTuned };

struct ThresholdConfig {
  ThresholdPolicy policy = ThresholdPolicy::kFixed;
  /// Fixed threshold; also the tie-break preference when tuning.
  double value = 0.5;
};

/// Candidates scanned by ThresholdPolicy::kTuned.
inline constexpr double kThresholdGrid[] = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};

enum class AccuracyAggregation { kPooled, kMacro };

struct ArchitectureConfig {
  Index n_layers = 1;
  Index units_per_layer = 100;
  double connectivity = 1.0;
};

/// Everything about a train/evaluate run except the grid-searched values.
struct PipelineConfig {
  ArchitectureConfig architecture;
  bool ip_enabled = true;
  IpConfig ip;
  Index washout = 0;
  ThresholdConfig threshold;
  AccuracyAggregation aggregation = AccuracyAggregation::kPooled;
};

/// Reservoir hyperparameters of one grid point (lambda_r excluded: it only
/// affects the readout, so one set of collected states serves every value).
struct ReservoirPoint {
  double spectral_radius = 0.9;
  double leaky_rate = 1.0;
  double input_scaling = 1.0;
};

struct LambdaOutcome {
  double lambda_r = 0.0;
  double valid_acc = 0.0;
  double test_acc = 0.0;
  double threshold = 0.5;
  /// Train + test wall-clock for this readout: shared reservoir work
  /// (initialization, IP, state collection, accumulation) plus the solve,
  /// test-state collection and test prediction. Validation is excluded.
  double seconds = 0.0;
  bool failed = false;
  std::string error;
};

struct GuessOutcome {
  std::uint64_t seed = 0;
  std::vector<LambdaOutcome> per_lambda;
  /// Sequences with fewer than washout + 2 frames.
  Index skipped_sequences = 0;
};

ReservoirConfig make_reservoir_config(const ArchitectureConfig& arch, const ReservoirPoint& point, int input_dim,
                                      std::uint64_t seed);

/// Builds one random instantiation, pre-trains it, collects states, fits a
/// readout for each lambda and evaluates on the validation and test
/// splits. Initialization or IP failures propagate as exceptions; a failed
/// solve marks only its own lambda.
GuessOutcome evaluate_guess(const PianoRollDataset& dataset, const PipelineConfig& config,
                            const ReservoirPoint& point, std::span<const double> lambdas, std::uint64_t seed);

}  // namespace deepesn
