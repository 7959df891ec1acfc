#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "earlywarn/eval.hpp"
#include "earlywarn/models.hpp"
#include "earlywarn/series.hpp"

namespace earlywarn {

// {5, 10, ..., 40}
std::vector<std::size_t> default_horizons();

// "start:end:step" (inclusive end) or a comma list such as "5,10,20".
// Throws InvalidHorizon for zero, descending or duplicate entries.
std::vector<std::size_t> parse_horizons(std::string_view text);

struct SweepConfig {
  std::vector<ModelSpec> models;
  std::vector<std::size_t> horizons = default_horizons();
  std::vector<LabelScheme> schemes{LabelScheme::Binary};
  SplitSpec split;
  TrainConfig train;
  std::size_t workers = 1;
  // Off by default so that repeated runs produce byte-identical reports;
  // rows then carry wall_s = 0.
  bool record_wall_time = false;

  // InvalidConfig for no models/schemes or zero workers; InvalidHorizon
  // unless horizons are non-empty, positive and strictly ascending.
  void validate() const;
};

struct SweepRow {
  std::string model;
  std::string description;
  LabelScheme scheme = LabelScheme::Binary;
  std::size_t horizon = 0;
  std::string course;
  MetricsReport metrics;
  double positive_f1 = 0.0;
  std::uint64_t seed = 0;
  double wall_s = 0.0;
  std::string status = "ok";  // "ok" or "failed"
  std::string error;

  bool ok() const { return status == "ok"; }
};

struct HorizonSweepResult {
  std::vector<SweepRow> rows;
  bool empty() const { return rows.empty(); }
};

std::string model_description(const ModelSpec& spec);

// One job: truncate, split by cohort, fit min-max on train (skipped when the
// dataset already carries normalization stats), fit, score on test.
// Failures are returned as a row with status "failed"; nothing is thrown.
SweepRow run_sweep_job(const LabeledDataset& ds, const ModelSpec& model, LabelScheme scheme,
                       std::size_t horizon, const SweepConfig& cfg);

// Rows ordered by (course, model, scheme, horizon) following the configured
// order, independent of worker scheduling.
HorizonSweepResult horizon_sweep(const std::map<std::string, LabeledDataset>& datasets,
                                 const SweepConfig& cfg);

enum class ReportFormat { Csv, Json };

ReportFormat parse_report_format(std::string_view text);

inline constexpr const char* kReportColumns =
    "model,scheme,horizon,course,macro_f1,weighted_f1,positive_f1,seed,wall_s";

// Throws IoError for an empty result (no file is created) or a write failure.
void export_report(const HorizonSweepResult& result, ReportFormat format,
                   const std::filesystem::path& path);
// Format chosen by extension (.csv or .json). CSV carries only the summary
// columns; failed rows come back with status "failed".
HorizonSweepResult import_report(const std::filesystem::path& path);

nlohmann::json to_json(const HorizonSweepResult& result);
HorizonSweepResult sweep_from_json(const nlohmann::json& j);

// Wide table: course, scheme, horizon, then one weighted-F1 column per model.
void export_plot_data(const HorizonSweepResult& result, const std::filesystem::path& path);

}  // namespace earlywarn
