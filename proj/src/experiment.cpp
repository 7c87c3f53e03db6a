#include "deepesn/experiment.hpp"

#include <chrono>
#include <cmath>

#include "deepesn/metrics.hpp"
#include "deepesn/readout.hpp"

namespace deepesn {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct SplitData {
  std::vector<RowMatrix<double>> inputs;
  std::vector<NoteMatrix> targets;
};

SplitData prepare_split(const std::vector<PianoRollSequence>& seqs, int dim, Index washout, Index& skipped) {
  SplitData out;
  for (const auto& seq : seqs) {
    auto pairs = next_step_pairs(seq, dim);
    if (!pairs || pairs->inputs.rows() <= washout) {
      ++skipped;
      continue;
    }
    out.inputs.push_back(pairs->inputs.cast<double>());
    out.targets.push_back(pairs->targets.bottomRows(pairs->targets.rows() - washout));
  }
  return out;
}

std::vector<RowMatrix<double>> collect_states(const DeepReservoir<double>& model, const SplitData& split,
                                              Index washout) {
  std::vector<RowMatrix<double>> states;
  states.reserve(split.inputs.size());
  for (const auto& inputs : split.inputs) states.push_back(run_sequence(model, inputs, washout));
  return states;
}

std::vector<RowMatrix<double>> predict_all(const RidgeReadout<double>& readout,
                                           const std::vector<RowMatrix<double>>& states) {
  std::vector<RowMatrix<double>> outputs;
  outputs.reserve(states.size());
  for (const auto& s : states) outputs.push_back(predict(readout, s));
  return outputs;
}

double split_acc(const std::vector<RowMatrix<double>>& outputs, const std::vector<NoteMatrix>& targets,
                 double threshold, AccuracyAggregation aggregation) {
  std::vector<FrameCounts> counts;
  counts.reserve(outputs.size());
  for (std::size_t i = 0; i < outputs.size(); ++i)
    counts.push_back(frame_counts(binarize(outputs[i], threshold), targets[i]));
  return aggregation == AccuracyAggregation::kPooled ? pooled_acc(counts) : macro_acc(counts);
}

/// Best validation threshold; ties go to the candidate closest to the
/// configured default.
double tune_threshold(const std::vector<RowMatrix<double>>& outputs, const std::vector<NoteMatrix>& targets,
                      const ThresholdConfig& cfg, AccuracyAggregation aggregation) {
  double best = cfg.value;
  double best_acc = -1.0;
  for (double candidate : kThresholdGrid) {
    const double value = split_acc(outputs, targets, candidate, aggregation);
    const bool better = value > best_acc ||
                        (value == best_acc && std::abs(candidate - cfg.value) < std::abs(best - cfg.value));
    if (better) {
      best = candidate;
      best_acc = value;
    }
  }
  return best;
}

}  // namespace

ReservoirConfig make_reservoir_config(const ArchitectureConfig& arch, const ReservoirPoint& point, int input_dim,
                                      std::uint64_t seed) {
  ReservoirConfig cfg;
  cfg.n_layers = arch.n_layers;
  cfg.units_per_layer = arch.units_per_layer;
  cfg.connectivity = arch.connectivity;
  cfg.input_dim = input_dim;
  cfg.target_spectral_radius = point.spectral_radius;
  cfg.leaky_rate = point.leaky_rate;
  cfg.input_scaling = point.input_scaling;
  cfg.seed = seed;
  return cfg;
}

GuessOutcome evaluate_guess(const PianoRollDataset& dataset, const PipelineConfig& config,
                            const ReservoirPoint& point, std::span<const double> lambdas, std::uint64_t seed) {
  require(!lambdas.empty(), "evaluate_guess: no regularization values");
  require(config.washout >= 0, "evaluate_guess: washout must be nonnegative");
  GuessOutcome outcome;
  outcome.seed = seed;

  const SplitData train = prepare_split(dataset.train, dataset.dim, config.washout, outcome.skipped_sequences);
  const SplitData valid = prepare_split(dataset.valid, dataset.dim, config.washout, outcome.skipped_sequences);
  const SplitData test = prepare_split(dataset.test, dataset.dim, config.washout, outcome.skipped_sequences);
  require(!train.inputs.empty(), "evaluate_guess: no usable training sequences");
  require(!valid.inputs.empty(), "evaluate_guess: no usable validation sequences");
  require(!test.inputs.empty(), "evaluate_guess: no usable test sequences");

  // Training: init, IP, state collection and accumulation.
  const auto train_start = Clock::now();
  DeepReservoir<double> model =
      init_deep_reservoir<double>(make_reservoir_config(config.architecture, point, dataset.dim, seed));
  if (config.ip_enabled) pretrain_ip(model, train.inputs, config.ip);
  RidgeAccumulator<double> accumulator(model.state_dim(), dataset.dim);
  for (std::size_t i = 0; i < train.inputs.size(); ++i)
    accumulator.add(run_sequence(model, train.inputs[i], config.washout), train.targets[i]);
  const double shared_train_seconds = seconds_since(train_start);

  const auto valid_states = collect_states(model, valid, config.washout);
  const auto test_start = Clock::now();
  const auto test_states = collect_states(model, test, config.washout);
  const double test_collect_seconds = seconds_since(test_start);

  for (double lambda : lambdas) {
    LambdaOutcome result;
    result.lambda_r = lambda;
    try {
      const auto solve_start = Clock::now();
      RidgeReadout<double> readout = solve(accumulator, lambda);
      const double solve_seconds = seconds_since(solve_start);

      const auto valid_outputs = predict_all(readout, valid_states);
      readout.threshold = config.threshold.policy == ThresholdPolicy::kTuned
                              ? tune_threshold(valid_outputs, valid.targets, config.threshold, config.aggregation)
                              : config.threshold.value;
      result.threshold = readout.threshold;
      result.valid_acc = split_acc(valid_outputs, valid.targets, readout.threshold, config.aggregation);

      const auto eval_start = Clock::now();
      result.test_acc = split_acc(predict_all(readout, test_states), test.targets, readout.threshold,
                                  config.aggregation);
      result.seconds = shared_train_seconds + solve_seconds + test_collect_seconds + seconds_since(eval_start);
    } catch (const NumericalError& e) {
      result.failed = true;
      result.error = e.what();
    }
    outcome.per_lambda.push_back(std::move(result));
  }
  return outcome;
}

}  // namespace deepesn
