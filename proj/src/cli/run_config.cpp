#include "earlywarn/cli.hpp"
#include "earlywarn/error.hpp"

namespace earlywarn::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

bool needs_seed(const std::string& command) {
  return command == "synth" || command == "train" || command == "sweep";
}

bool needs_data(const std::string& command) {
  return command == "train" || command == "sweep" || command == "baseline";
}

void require_path(const fs::path& p, const char* what) {
  if (!fs::exists(p)) throw Error(ErrorCode::MissingFile, std::string(what) + " not found: " + p.string());
}

}  // namespace

json RunConfig::to_json() const {
  json models_json = json::array();
  for (const auto& m : models) models_json.push_back(m.to_json());
  json schemes_json = json::array();
  for (auto s : schemes) schemes_json.push_back(earlywarn::to_string(s));
  json datasets_json = json::array();
  for (const auto& d : datasets) datasets_json.push_back(d.string());

  json j = {{"command", command},
            {"oulad_dir", oulad_dir ? json(oulad_dir->string()) : json(nullptr)},
            {"courses", courses},
            {"datasets", datasets_json},
            {"train_presentations", split.train_presentations},
            {"test_presentations", split.test_presentations},
            {"n_weeks", n_weeks ? json(*n_weeks) : json(nullptr)},
            {"horizons", horizons},
            {"models", models_json},
            {"schemes", schemes_json},
            {"seed", seed ? json(*seed) : json(nullptr)},
            {"out", out_dir.string()},
            {"workers", workers},
            {"train", train.to_json()},
            {"record_wall_time", record_wall_time},
            {"synth",
             {{"n_per_class", synth.n_per_class},
              {"n_weeks", synth.n_weeks},
              {"n_activities", synth.n_activities},
              {"scheme", earlywarn::to_string(synth.scheme)},
              {"dropout_week", synth.dropout_week}}},
            {"input", input ? json(input->string()) : json(nullptr)}};
  return j;
}

RunConfig RunConfig::from_json(const json& source) {
  const json& j = source.contains("config") && source.at("config").is_object() ? source.at("config") : source;
  RunConfig c;
  try {
    c.command = j.value("command", "");
    if (j.contains("oulad_dir") && !j.at("oulad_dir").is_null()) c.oulad_dir = j.at("oulad_dir").get<std::string>();
    if (j.contains("courses")) c.courses = j.at("courses").get<std::vector<std::string>>();
    if (j.contains("datasets")) {
      for (const auto& d : j.at("datasets")) c.datasets.emplace_back(d.get<std::string>());
    }
    if (j.contains("train_presentations")) {
      c.split.train_presentations = j.at("train_presentations").get<std::set<std::string>>();
    }
    if (j.contains("test_presentations")) {
      c.split.test_presentations = j.at("test_presentations").get<std::set<std::string>>();
    }
    if (j.contains("n_weeks") && !j.at("n_weeks").is_null()) c.n_weeks = j.at("n_weeks").get<std::size_t>();
    if (j.contains("horizons")) {
      const auto& h = j.at("horizons");
      c.horizons = h.is_string() ? parse_horizons(h.get<std::string>()) : h.get<std::vector<std::size_t>>();
    }
    if (j.contains("models")) {
      for (const auto& m : j.at("models")) c.models.push_back(ModelSpec::from_json(m));
    }
    if (j.contains("schemes")) {
      c.schemes.clear();
      for (const auto& s : j.at("schemes")) c.schemes.push_back(parse_label_scheme(s.get<std::string>()));
    }
    if (j.contains("seed") && !j.at("seed").is_null()) c.seed = j.at("seed").get<std::uint64_t>();
    c.out_dir = j.value("out", "");
    c.workers = j.value("workers", c.workers);
    if (j.contains("train")) c.train = TrainConfig::from_json(j.at("train"));
    c.record_wall_time = j.value("record_wall_time", false);
    if (j.contains("synth")) {
      const auto& s = j.at("synth");
      c.synth.n_per_class = s.value("n_per_class", c.synth.n_per_class);
      c.synth.n_weeks = s.value("n_weeks", c.synth.n_weeks);
      c.synth.n_activities = s.value("n_activities", c.synth.n_activities);
      if (s.contains("scheme")) c.synth.scheme = parse_label_scheme(s.at("scheme").get<std::string>());
      c.synth.dropout_week = s.value("dropout_week", c.synth.dropout_week);
    }
    if (j.contains("input") && !j.at("input").is_null()) c.input = j.at("input").get<std::string>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidConfig, std::string("config: ") + e.what());
  }
  return c;
}

void RunConfig::validate() const {
  if (out_dir.empty()) throw Error(ErrorCode::InvalidConfig, "--out is required");
  if (workers == 0) throw Error(ErrorCode::InvalidConfig, "--workers must be >= 1");
  if (needs_seed(command) && !seed) {
    throw Error(ErrorCode::InvalidConfig, command + " needs an explicit --seed");
  }
  if (oulad_dir) require_path(*oulad_dir, "OULAD directory");
  for (const auto& d : datasets) require_path(d, "dataset");
  if (input) require_path(*input, "report");
  if (n_weeks && (*n_weeks == 0 || *n_weeks > kMaxWeeks)) {
    throw Error(ErrorCode::InvalidConfig, "--weeks must lie in [1, 40]");
  }
  split.validate();
  train.validate();
  if (schemes.empty()) throw Error(ErrorCode::InvalidConfig, "at least one label scheme is required");

  if (command == "ingest" && !oulad_dir) {
    throw Error(ErrorCode::InvalidConfig, "ingest needs --oulad-dir or " + std::string(kOuladDirEnv));
  }
  if (command == "build" && (!oulad_dir || courses.empty())) {
    throw Error(ErrorCode::InvalidConfig, "build needs --oulad-dir and --course");
  }
  if (command == "synth" && synth.n_per_class == 0) {
    throw Error(ErrorCode::InvalidConfig, "--n-per-class must be >= 1");
  }
  if (needs_data(command) && datasets.empty() && !(oulad_dir && !courses.empty())) {
    throw Error(ErrorCode::InvalidConfig, command + " needs --dataset or --oulad-dir with --course");
  }
  if (command == "train") {
    if (models.size() != 1) throw Error(ErrorCode::InvalidConfig, "train takes exactly one --model");
    if (horizons.size() != 1) throw Error(ErrorCode::InvalidConfig, "train takes exactly one --horizon");
    if (schemes.size() != 1) throw Error(ErrorCode::InvalidConfig, "train takes exactly one --scheme");
  }
  if (command == "sweep") {
    if (models.empty()) throw Error(ErrorCode::InvalidConfig, "sweep needs --models");
    if (horizons.empty()) throw Error(ErrorCode::InvalidHorizon, "sweep needs --horizons");
  }
  if (command == "report" && !input) throw Error(ErrorCode::InvalidConfig, "report needs --input");
}

}  // namespace earlywarn::cli
