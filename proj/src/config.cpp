#include "deepesn/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

namespace deepesn {

namespace {

using nlohmann::json;

[[noreturn]] void config_error(const std::string& message) { throw ParseError("config: " + message); }

void check_keys(const json& obj, const std::string& where, std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) config_error(where + " must be an object");
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [key, value] : obj.items())
    if (!ok.count(key)) config_error("unknown key '" + (where.empty() ? key : where + "." + key) + "'");
}

double get_number(const json& j, const std::string& where) {
  if (!j.is_number()) config_error(where + " must be a number");
  return j.get<double>();
}

std::int64_t get_integer(const json& j, const std::string& where) {
  if (!j.is_number_integer()) config_error(where + " must be an integer");
  return j.get<std::int64_t>();
}

std::vector<double> get_number_list(const json& j, const std::string& where) {
  if (!j.is_array() || j.empty()) config_error(where + " must be a nonempty array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(get_number(j[i], where + "[" + std::to_string(i) + "]"));
  return out;
}

std::filesystem::path resolve(const std::filesystem::path& p, const std::filesystem::path& base) {
  if (p.empty() || p.is_absolute() || base.empty()) return p;
  return base / p;
}

}  // namespace

GridSpec ExperimentConfig::run_grid() const {
  GridSpec g;
  g.spectral_radius = {hyperparameters.spectral_radius};
  g.leaky_rate = {hyperparameters.leaky_rate};
  g.input_scaling = {hyperparameters.input_scaling};
  g.lambda_r = {lambda_r};
  g.guesses = guesses;
  return g;
}

void ExperimentConfig::validate() const {
  const auto& arch = pipeline.architecture;
  if (arch.n_layers <= 0) config_error("architecture.n_layers must be positive");
  if (arch.units_per_layer <= 0) config_error("architecture.units_per_layer must be positive");
  if (!(arch.connectivity > 0.0 && arch.connectivity <= 1.0)) config_error("architecture.connectivity must lie in (0, 1]");
  try {
    pipeline.ip.validate();
    grid.validate();
    run_grid().validate();
  } catch (const ContractViolation& e) {
    config_error(e.what());
  }
  if (pipeline.washout < 0) config_error("washout must be nonnegative");
  if (!(pipeline.threshold.value > 0.0 && pipeline.threshold.value < 1.0)) config_error("threshold.value must lie in (0, 1)");
  if (workers < 1) config_error("workers must be at least 1");
}

std::vector<std::string> preset_names() { return {"deepesn-paper", "esn-paper", "smoke"}; }

ExperimentConfig preset_config(std::string_view name) {
  ExperimentConfig cfg;
  cfg.preset = std::string(name);
  if (name == "deepesn-paper") {
    cfg.pipeline.architecture = {30, 200, 0.01};
  } else if (name == "esn-paper") {
    cfg.pipeline.architecture = {1, 6000, 0.01};
  } else if (name == "smoke") {
    cfg.pipeline.architecture = {2, 20, 0.2};
    cfg.pipeline.ip.epochs = 1;
    cfg.hyperparameters = {0.9, 1.0, 1.0};
    cfg.guesses = 2;
    cfg.grid.spectral_radius = {0.9};
    cfg.grid.leaky_rate = {0.5, 1.0};
    cfg.grid.input_scaling = {1.0};
    cfg.grid.lambda_r = {1e-3, 1e-1};
    cfg.grid.guesses = 2;
  } else {
    std::ostringstream os;
    os << "unknown preset '" << name << "' (known:";
    for (const auto& p : preset_names()) os << " " << p;
    os << ")";
    config_error(os.str());
  }
  return cfg;
}

ExperimentConfig parse_experiment_config(const json& doc, const std::filesystem::path& base_dir) {
  check_keys(doc, "",
             {"schema_version", "preset", "dataset", "architecture", "hyperparameters", "guesses", "grid", "ip",
              "washout", "threshold", "accuracy", "seed", "workers", "output", "timing"});
  if (doc.contains("schema_version") && get_integer(doc["schema_version"], "schema_version") != kConfigSchemaVersion)
    config_error("unsupported schema_version (expected " + std::to_string(kConfigSchemaVersion) + ")");

  ExperimentConfig cfg;
  if (doc.contains("preset")) {
    if (!doc["preset"].is_string()) config_error("preset must be a string");
    cfg = preset_config(doc["preset"].get<std::string>());
  }
  if (doc.contains("dataset")) {
    if (!doc["dataset"].is_string()) config_error("dataset must be a string path");
    cfg.dataset = resolve(doc["dataset"].get<std::string>(), base_dir);
  }
  if (doc.contains("architecture")) {
    const json& a = doc["architecture"];
    check_keys(a, "architecture", {"n_layers", "units_per_layer", "connectivity"});
    auto& arch = cfg.pipeline.architecture;
    if (a.contains("n_layers")) arch.n_layers = get_integer(a["n_layers"], "architecture.n_layers");
    if (a.contains("units_per_layer"))
      arch.units_per_layer = get_integer(a["units_per_layer"], "architecture.units_per_layer");
    if (a.contains("connectivity")) arch.connectivity = get_number(a["connectivity"], "architecture.connectivity");
  }
  if (doc.contains("hyperparameters")) {
    const json& h = doc["hyperparameters"];
    check_keys(h, "hyperparameters", {"spectral_radius", "leaky_rate", "input_scaling", "lambda_r"});
    auto& hp = cfg.hyperparameters;
    if (h.contains("spectral_radius"))
      hp.spectral_radius = get_number(h["spectral_radius"], "hyperparameters.spectral_radius");
    if (h.contains("leaky_rate")) hp.leaky_rate = get_number(h["leaky_rate"], "hyperparameters.leaky_rate");
    if (h.contains("input_scaling")) hp.input_scaling = get_number(h["input_scaling"], "hyperparameters.input_scaling");
    if (h.contains("lambda_r")) cfg.lambda_r = get_number(h["lambda_r"], "hyperparameters.lambda_r");
  }
  if (doc.contains("guesses")) cfg.guesses = static_cast<int>(get_integer(doc["guesses"], "guesses"));
  if (doc.contains("grid")) {
    const json& g = doc["grid"];
    check_keys(g, "grid", {"spectral_radius", "leaky_rate", "input_scaling", "lambda_r", "guesses"});
    if (g.contains("spectral_radius")) cfg.grid.spectral_radius = get_number_list(g["spectral_radius"], "grid.spectral_radius");
    if (g.contains("leaky_rate")) cfg.grid.leaky_rate = get_number_list(g["leaky_rate"], "grid.leaky_rate");
    if (g.contains("input_scaling")) cfg.grid.input_scaling = get_number_list(g["input_scaling"], "grid.input_scaling");
    if (g.contains("lambda_r")) cfg.grid.lambda_r = get_number_list(g["lambda_r"], "grid.lambda_r");
    if (g.contains("guesses")) cfg.grid.guesses = static_cast<int>(get_integer(g["guesses"], "grid.guesses"));
  }
  if (doc.contains("ip")) {
    const json& i = doc["ip"];
    check_keys(i, "ip", {"enabled", "target_std", "target_mean", "learning_rate", "epochs"});
    if (i.contains("enabled")) {
      if (!i["enabled"].is_boolean()) config_error("ip.enabled must be a boolean");
      cfg.pipeline.ip_enabled = i["enabled"].get<bool>();
    }
    if (i.contains("target_std")) cfg.pipeline.ip.target_std = get_number(i["target_std"], "ip.target_std");
    if (i.contains("target_mean")) cfg.pipeline.ip.target_mean = get_number(i["target_mean"], "ip.target_mean");
    if (i.contains("learning_rate")) cfg.pipeline.ip.learning_rate = get_number(i["learning_rate"], "ip.learning_rate");
    if (i.contains("epochs")) cfg.pipeline.ip.epochs = static_cast<int>(get_integer(i["epochs"], "ip.epochs"));
  }
  if (doc.contains("washout")) cfg.pipeline.washout = get_integer(doc["washout"], "washout");
  if (doc.contains("threshold")) {
    const json& t = doc["threshold"];
    check_keys(t, "threshold", {"policy", "value"});
    if (t.contains("policy")) {
      const std::string policy = t["policy"].is_string() ? t["policy"].get<std::string>() : "";
      if (policy == "fixed")
        cfg.pipeline.threshold.policy = ThresholdPolicy::kFixed;
      else if (policy == "tuned")
        cfg.pipeline.threshold.policy = ThresholdPolicy::kTuned;
      else
        config_error("threshold.policy must be \"fixed\" or \"tuned\"");
    }
    if (t.contains("value")) cfg.pipeline.threshold.value = get_number(t["value"], "threshold.value");
  }
  if (doc.contains("accuracy")) {
    const std::string agg = doc["accuracy"].is_string() ? doc["accuracy"].get<std::string>() : "";
    if (agg == "pooled")
      cfg.pipeline.aggregation = AccuracyAggregation::kPooled;
    else if (agg == "macro")
      cfg.pipeline.aggregation = AccuracyAggregation::kMacro;
    else
      config_error("accuracy must be \"pooled\" or \"macro\"");
  }
  if (doc.contains("seed")) {
    const json& seed = doc["seed"];
    if (!seed.is_number_integer() || (!seed.is_number_unsigned() && seed.get<std::int64_t>() < 0))
      config_error("seed must be a nonnegative integer");
    cfg.seed = doc["seed"].get<std::uint64_t>();
  }
  if (doc.contains("workers")) cfg.workers = static_cast<int>(get_integer(doc["workers"], "workers"));
  if (doc.contains("output")) {
    if (!doc["output"].is_string()) config_error("output must be a string path");
    cfg.output = resolve(doc["output"].get<std::string>(), base_dir);
  }
  if (doc.contains("timing")) {
    if (!doc["timing"].is_boolean()) config_error("timing must be a boolean");
    cfg.timing = doc["timing"].get<bool>();
  }
  cfg.validate();
  return cfg;
}

ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open config file '" + path.string() + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParseError(path.string() + ": invalid JSON: " + e.what());
  }
  return parse_experiment_config(doc, path.parent_path());
}

}  // namespace deepesn
