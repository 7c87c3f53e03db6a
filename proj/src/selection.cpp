#include "deepesn/selection.hpp"

#include <atomic>
#include <cctype>
#include <bit>
#include <cmath>
#include <exception>
#include <mutex>
#include <sstream>
#include <thread>

#include "deepesn/random.hpp"

namespace deepesn {

namespace {

struct GuessTask {
  std::optional<GuessOutcome> outcome;
  std::string error;
};

ReservoirPoint point_at(const GridSpec& grid, std::size_t point_index) {
  const std::size_t ns = grid.input_scaling.size();
  const std::size_t na = grid.leaky_rate.size();
  const std::size_t is = point_index % ns;
  const std::size_t ia = (point_index / ns) % na;
  const std::size_t ir = point_index / (ns * na);
  return ReservoirPoint{grid.spectral_radius[ir], grid.leaky_rate[ia], grid.input_scaling[is]};
}

}  // namespace

void GridSpec::validate() const {
  require(!spectral_radius.empty() && !leaky_rate.empty() && !input_scaling.empty() && !lambda_r.empty(),
          "GridSpec: every value list must be nonempty");
  require(guesses >= 1, "GridSpec: guesses must be at least 1");
  for (double r : spectral_radius) require(r > 0.0 && r <= 1.0, "GridSpec: spectral radius values must lie in (0, 1]");
  for (double a : leaky_rate) require(a > 0.0 && a <= 1.0, "GridSpec: leaky rates must lie in (0, 1]");
  for (double s : input_scaling) require(s > 0.0, "GridSpec: input scaling values must be positive");
  for (double l : lambda_r) require(l >= 0.0, "GridSpec: lambda_r values must be nonnegative");
}

double effective_rho(double listed) { return listed >= 1.0 ? kRhoOneSubstitute : listed; }

std::uint64_t guess_seed(std::uint64_t master_seed, const ReservoirPoint& point, int guess) {
  return derive_seed(master_seed,
                     {std::bit_cast<std::uint64_t>(point.spectral_radius), std::bit_cast<std::uint64_t>(point.leaky_rate),
                      std::bit_cast<std::uint64_t>(point.input_scaling), static_cast<std::uint64_t>(guess)});
}

std::pair<double, double> mean_and_std(const std::vector<double>& values) {
  if (values.empty()) return {0.0, 0.0};
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(values.size());
  if (values.size() < 2) return {mean, 0.0};
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return {mean, std::sqrt(ss / static_cast<double>(values.size() - 1))};
}

GridResult grid_search(const PianoRollDataset& dataset, const PipelineConfig& config, const GridSpec& grid,
                       std::uint64_t master_seed, int workers) {
  grid.validate();
  require(workers >= 1, "grid_search: workers must be at least 1");

  GridResult result;
  for (double r : grid.spectral_radius)
    if (r >= 1.0) {
      std::ostringstream os;
      os << "spectral radius " << r << " run as " << kRhoOneSubstitute << " (echo-state bound is strict)";
      result.notes.push_back(os.str());
      break;
    }

  const std::size_t points = grid.reservoir_points();
  const auto guesses = static_cast<std::size_t>(grid.guesses);
  std::vector<GuessTask> tasks(points * guesses);
  std::atomic<std::size_t> next{0};

  auto worker = [&]() {
    for (std::size_t t = next.fetch_add(1); t < tasks.size(); t = next.fetch_add(1)) {
      const std::size_t p = t / guesses;
      const int g = static_cast<int>(t % guesses);
      const ReservoirPoint listed = point_at(grid, p);
      ReservoirPoint used = listed;
      used.spectral_radius = effective_rho(listed.spectral_radius);
      try {
        tasks[t].outcome = evaluate_guess(dataset, config, used, grid.lambda_r, guess_seed(master_seed, listed, g));
      } catch (const std::exception& e) {
        tasks[t].error = e.what();
      }
    }
  };
  const auto thread_count = std::min<std::size_t>(static_cast<std::size_t>(workers), tasks.size());
  if (thread_count <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t i = 0; i < thread_count; ++i) pool.emplace_back(worker);
  }

  const std::size_t nl = grid.lambda_r.size();
  result.trials.reserve(points * nl);
  for (std::size_t p = 0; p < points; ++p) {
    const ReservoirPoint listed = point_at(grid, p);
    for (std::size_t li = 0; li < nl; ++li) {
      TrialReport trial;
      trial.index = p * nl + li;
      trial.spectral_radius = listed.spectral_radius;
      trial.spectral_radius_used = effective_rho(listed.spectral_radius);
      trial.leaky_rate = listed.leaky_rate;
      trial.input_scaling = listed.input_scaling;
      trial.lambda_r = grid.lambda_r[li];
      for (std::size_t g = 0; g < guesses; ++g) {
        const GuessTask& task = tasks[p * guesses + g];
        trial.seeds.push_back(guess_seed(master_seed, listed, static_cast<int>(g)));
        if (!task.outcome) {
          if (!trial.failed) trial.error = task.error;
          trial.failed = true;
          continue;
        }
        const LambdaOutcome& lo = task.outcome->per_lambda[li];
        trial.skipped_sequences = std::max(trial.skipped_sequences, task.outcome->skipped_sequences);
        if (lo.failed) {
          if (!trial.failed) trial.error = lo.error;
          trial.failed = true;
          continue;
        }
        trial.valid_acc.push_back(lo.valid_acc);
        trial.test_acc.push_back(lo.test_acc);
        trial.thresholds.push_back(lo.threshold);
        trial.guess_seconds.push_back(lo.seconds);
        trial.seconds += lo.seconds;
      }
      if (!trial.failed) {
        std::tie(trial.valid_mean, trial.valid_std) = mean_and_std(trial.valid_acc);
        std::tie(trial.test_mean, trial.test_std) = mean_and_std(trial.test_acc);
      }
      result.trials.push_back(std::move(trial));
    }
  }

  for (const auto& trial : result.trials) {
    if (trial.failed) continue;
    if (!result.selected || trial.valid_mean > result.trials[*result.selected].valid_mean)
      result.selected = trial.index;
  }
  return result;
}

std::optional<RecurrentModel> parse_recurrent_model(std::string_view raw) {
  std::string name(raw);
  for (char& c : name) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (name == "srn") return RecurrentModel::kSrn;
  if (name == "lstm") return RecurrentModel::kLstm;
  if (name == "gru") return RecurrentModel::kGru;
  return std::nullopt;
}

std::string_view recurrent_model_name(RecurrentModel model) {
  switch (model) {
    case RecurrentModel::kSrn:
      return "srn";
    case RecurrentModel::kLstm:
      return "lstm";
    case RecurrentModel::kGru:
      return "gru";
  }
  return "unknown";
}

std::int64_t count_free_parameters(std::int64_t n_outputs, std::int64_t n_layers, std::int64_t units_per_layer) {
  require(n_outputs > 0 && n_layers > 0 && units_per_layer > 0, "count_free_parameters: counts must be positive");
  const std::int64_t total_units = n_layers * units_per_layer;
  return n_outputs * (total_units + 1) + 2 * total_units;
}

std::int64_t recurrent_free_parameters(RecurrentModel model, std::int64_t n_inputs, std::int64_t n_outputs,
                                       std::int64_t units) {
  require(n_inputs > 0 && n_outputs > 0 && units > 0, "recurrent_free_parameters: counts must be positive");
  // One block = input weights + recurrent weights + bias; SRN has one,
  // GRU three (update, reset, candidate), LSTM four (three gates + cell).
  std::int64_t blocks = 1;
  if (model == RecurrentModel::kLstm) blocks = 4;
  if (model == RecurrentModel::kGru) blocks = 3;
  const std::int64_t block = n_inputs * units + units * units + units;
  return blocks * block + n_outputs * (units + 1);
}

UnitBudget solve_units_for_budget(RecurrentModel model, std::int64_t n_inputs, std::int64_t n_outputs,
                                  std::int64_t budget, BudgetRule rule) {
  const std::int64_t minimum = recurrent_free_parameters(model, n_inputs, n_outputs, 1);
  require(budget >= minimum, "solve_units_for_budget: budget below the one-unit model");

  // Largest N with params(N) <= budget; params is increasing in N.
  std::int64_t lo = 1, hi = 2;
  while (recurrent_free_parameters(model, n_inputs, n_outputs, hi) <= budget) hi *= 2;
  while (hi - lo > 1) {
    const std::int64_t mid = lo + (hi - lo) / 2;
    if (recurrent_free_parameters(model, n_inputs, n_outputs, mid) <= budget)
      lo = mid;
    else
      hi = mid;
  }
  const std::int64_t below = recurrent_free_parameters(model, n_inputs, n_outputs, lo);
  if (rule == BudgetRule::kAtMost || below == budget) return {lo, below};
  const std::int64_t above = recurrent_free_parameters(model, n_inputs, n_outputs, lo + 1);
  if (above - budget < budget - below) return {lo + 1, above};
  return {lo, below};
}

}  // namespace deepesn
