#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "earlywarn/models.hpp"
#include "earlywarn/series.hpp"
#include "earlywarn/sweep.hpp"

namespace earlywarn::cli {

// Everything a run needs, resolved from --config and flags (flags win).
// Echoed verbatim into run_manifest.json so a run can be replayed with
// `<command> --config run_manifest.json`.
struct RunConfig {
  std::string command;
  std::optional<std::filesystem::path> oulad_dir;
  std::vector<std::string> courses;
  std::vector<std::filesystem::path> datasets;  // serialized LabeledDataset dirs
  SplitSpec split;
  std::optional<std::size_t> n_weeks;
  std::vector<std::size_t> horizons = default_horizons();
  std::vector<ModelSpec> models;
  std::vector<LabelScheme> schemes{LabelScheme::Binary};
  std::optional<std::uint64_t> seed;
  std::filesystem::path out_dir;
  std::size_t workers = 1;
  TrainConfig train;  // seed is copied in from `seed`
  bool record_wall_time = false;
  SyntheticConfig synth;
  std::optional<std::filesystem::path> input;  // report re-export source

  nlohmann::json to_json() const;
  // Accepts either a bare config object or a run manifest holding one under "config".
  static RunConfig from_json(const nlohmann::json& j);
  // Throws InvalidConfig / MissingFile / InvalidHorizon for the command's needs.
  void validate() const;
};

inline constexpr const char* kOuladDirEnv = "EARLYWARN_OULAD_DIR";

// Subcommands: ingest, build, synth, train, sweep, baseline, report.
// Returns 0 on success, 1 on usage errors, 2 on data errors, 3 on numeric failures.
int dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace earlywarn::cli
