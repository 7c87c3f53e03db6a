#pragma once

#include <cstdint>
#include <string>

#include <json.hpp>

#include "deepesn/experiment.hpp"
#include "deepesn/selection.hpp"

namespace deepesn {

inline constexpr int kReportSchemaVersion = 1;

struct ReportOptions {
  /// Wall-clock fields are the only non-reproducible content; dropping them
  /// makes reports byte-identical across reruns.
  bool include_timing = true;
};

struct ReportContext {
  std::string command;
  std::string dataset_name;
  int dataset_dim = 0;
  std::uint64_t master_seed = 0;
  PipelineConfig pipeline;
  GridSpec grid;
};

nlohmann::ordered_json trial_to_json(const TrialReport& trial, const ReportOptions& options = {});
nlohmann::ordered_json pipeline_to_json(const PipelineConfig& config);
nlohmann::ordered_json grid_to_json(const GridSpec& grid);
nlohmann::ordered_json report_to_json(const ReportContext& context, const GridResult& result,
                                      const ReportOptions& options = {});

/// Serialized report with a trailing newline.
std::string render_report(const ReportContext& context, const GridResult& result,
                          const ReportOptions& options = {});

}  // namespace deepesn
