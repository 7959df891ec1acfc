#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <map>
#include <set>

#include <CLI11.hpp>
#include <Eigen/Core>

#include "earlywarn/cli.hpp"
#include "earlywarn/error.hpp"
#include "earlywarn/eval.hpp"
#include "earlywarn/ingest.hpp"

#ifndef EARLYWARN_VERSION
#define EARLYWARN_VERSION "dev"
#endif

namespace earlywarn::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Majority-baseline F1 quoted for the whole dataset, binary and multiclass.
constexpr double kReferenceBinaryF1 = 0.58;
constexpr double kReferenceMulticlassF1 = 0.48;
constexpr double kReferenceTolerance = 0.005;

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto pos = text.find(',', start);
    const auto item = text.substr(start, pos == std::string::npos ? std::string::npos : pos - start);
    if (!item.empty()) out.push_back(item);
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return out;
}

std::vector<LabelScheme> parse_schemes(const std::string& text) {
  if (text == "both") return {LabelScheme::Binary, LabelScheme::Multiclass};
  std::vector<LabelScheme> out;
  for (const auto& s : split_list(text)) out.push_back(parse_label_scheme(s));
  if (out.empty()) throw Error(ErrorCode::InvalidConfig, "empty --scheme");
  return out;
}

json read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::MissingFile, "config not found: " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::InvalidConfig, path.string() + ": " + e.what());
  }
}

void write_json(const fs::path& path, const json& j) {
  std::error_code ec;
  fs::create_directories(path.parent_path(), ec);
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  out << j.dump(2) << '\n';
}

std::string utc_now() {
  const std::time_t t = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

json versions() {
  return {{"earlywarn", EARLYWARN_VERSION},
          {"series_builder", kBuilderVersion},
          {"checkpoint", numkit::kCheckpointFormat},
          {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                        std::to_string(EIGEN_MINOR_VERSION)},
          {"compiler", __VERSION__}};
}

// Raw flag storage; a value is applied to the RunConfig only if its flag was given.
struct Flags {
  std::string config, oulad_dir, out, courses, train_presentations, test_presentations, horizons,
      models, model, scheme, precision, input, format = "all";
  std::vector<std::string> datasets;
  std::size_t weeks = 0, horizon = 0, workers = 1, n_per_class = 0, activities = 0, dropout_week = 0,
              batch_size = 0, epochs = 0, patience = 0, k = 0;
  std::uint64_t seed = 0;
  double lr = 0.0, validation_fraction = 0.0;
  bool class_weights = false, record_wall_time = false;
};

void add_common(CLI::App* sub, Flags& f) {
  sub->add_option("--config", f.config, "JSON config or a previous run_manifest.json");
  sub->add_option("--out", f.out, "output directory");
}

void add_data_source(CLI::App* sub, Flags& f) {
  sub->add_option("--oulad-dir", f.oulad_dir, "OULAD CSV directory (fallback: $EARLYWARN_OULAD_DIR)");
  sub->add_option("--course", f.courses, "course code(s), comma separated");
  sub->add_option("--dataset", f.datasets, "serialized dataset directory (repeatable)");
  sub->add_option("--train-presentations", f.train_presentations, "default 2013B,2013J");
  sub->add_option("--test-presentations", f.test_presentations, "default 2014B,2014J");
  sub->add_option("--weeks", f.weeks, "tensor length in weeks (default from course length)");
}

void add_training(CLI::App* sub, Flags& f) {
  sub->add_option("--seed", f.seed, "random seed");
  sub->add_option("--scheme", f.scheme, "binary | multiclass | both");
  sub->add_option("--precision", f.precision, "f64 | f32");
  sub->add_option("--lr", f.lr, "Adam learning rate");
  sub->add_option("--batch-size", f.batch_size);
  sub->add_option("--epochs", f.epochs, "maximum epochs");
  sub->add_option("--patience", f.patience, "early-stopping patience in epochs");
  sub->add_option("--validation-fraction", f.validation_fraction);
  sub->add_option("--knn-k", f.k, "neighbours for knn models");
  sub->add_flag("--class-weights", f.class_weights, "inverse-frequency loss weights");
  sub->add_flag("--record-wall-time", f.record_wall_time, "fill wall_s in reports");
}

RunConfig resolve(const CLI::App& sub, const Flags& f) {
  auto given = [&sub](const char* name) {
    try {
      return sub.count(name) > 0;
    } catch (const CLI::OptionNotFound&) {
      return false;
    }
  };
  RunConfig c = f.config.empty() ? RunConfig{} : RunConfig::from_json(read_json(f.config));
  c.command = sub.get_name();
  const bool is_synth = c.command == "synth";

  if (given("--out")) c.out_dir = f.out;
  if (given("--oulad-dir")) c.oulad_dir = fs::path(f.oulad_dir);
  if (!c.oulad_dir && c.datasets.empty() && !given("--dataset")) {
    if (const char* env = std::getenv(kOuladDirEnv); env && *env) c.oulad_dir = fs::path(env);
  }
  if (given("--course")) c.courses = split_list(f.courses);
  if (given("--dataset")) c.datasets.assign(f.datasets.begin(), f.datasets.end());
  if (given("--train-presentations")) {
    const auto v = split_list(f.train_presentations);
    c.split.train_presentations = {v.begin(), v.end()};
  }
  if (given("--test-presentations")) {
    const auto v = split_list(f.test_presentations);
    c.split.test_presentations = {v.begin(), v.end()};
  }
  if (given("--weeks")) {
    if (is_synth) c.synth.n_weeks = f.weeks;
    else c.n_weeks = f.weeks;
  }
  if (given("--horizons")) c.horizons = parse_horizons(f.horizons);
  if (given("--horizon")) c.horizons = {f.horizon};
  if (given("--models")) {
    c.models.clear();
    for (const auto& m : split_list(f.models)) c.models.push_back(ModelSpec::parse(m));
  }
  if (given("--model")) c.models = {ModelSpec::parse(f.model)};
  if (given("--knn-k")) {
    for (auto& m : c.models) m.knn.k = f.k;
  }
  if (given("--scheme")) {
    if (is_synth) c.synth.scheme = parse_label_scheme(f.scheme);
    else c.schemes = parse_schemes(f.scheme);
  }
  if (given("--seed")) c.seed = f.seed;
  if (given("--workers")) c.workers = f.workers;
  if (given("--precision")) c.train.precision = numkit::parse_precision(f.precision);
  if (given("--lr")) c.train.lr = f.lr;
  if (given("--batch-size")) c.train.batch_size = f.batch_size;
  if (given("--epochs")) c.train.max_epochs = f.epochs;
  if (given("--patience")) c.train.early_stop_patience = f.patience;
  if (given("--validation-fraction")) c.train.validation_fraction = f.validation_fraction;
  if (given("--class-weights")) c.train.class_weights = f.class_weights;
  if (given("--record-wall-time")) c.record_wall_time = f.record_wall_time;
  if (given("--n-per-class")) c.synth.n_per_class = f.n_per_class;
  if (given("--activities")) c.synth.n_activities = f.activities;
  if (given("--dropout-week")) c.synth.dropout_week = f.dropout_week;
  if (given("--input")) c.input = fs::path(f.input);

  if (c.seed) {
    c.train.seed = *c.seed;
    c.synth.seed = *c.seed;
  }
  c.validate();
  return c;
}

std::map<std::string, LabeledDataset> load_sources(const RunConfig& c, std::ostream& out) {
  std::map<std::string, LabeledDataset> sources;
  for (const auto& dir : c.datasets) {
    LabeledDataset ds = load_dataset(dir);
    std::string key = ds.course.empty() ? dir.filename().string() : ds.course;
    if (sources.contains(key)) throw Error(ErrorCode::InvalidConfig, "two datasets for course " + key);
    sources.emplace(std::move(key), std::move(ds));
  }
  if (c.datasets.empty()) {
    const OuladTables tables = load_tables(*c.oulad_dir);
    for (const auto& course : c.courses) {
      BuildStats stats;
      sources.emplace(course, build_tensor(tables, course, c.split, c.n_weeks, &stats));
      out << "built " << course << ": " << sources.at(course).size() << " samples x " << stats.n_weeks
          << " weeks x " << sources.at(course).vocab.size() << " channels\n";
    }
  }
  return sources;
}

json build_stats_json(const BuildStats& s) {
  return {{"clicks_retained", s.clicks_retained},
          {"clicks_beyond_horizon", s.clicks_beyond_horizon},
          {"clicks_unknown_activity", s.clicks_unknown_activity},
          {"dropped_activity_types", s.dropped_activity_types},
          {"n_weeks", s.n_weeks}};
}

void run_ingest(const RunConfig& c, std::ostream& out, json& outputs) {
  const OuladTables tables = load_tables(*c.oulad_dir);
  const json summary = summary_to_json(tables);
  write_json(c.out_dir / "ingest_summary.json", summary);
  outputs.push_back("ingest_summary.json");
  out << "interactions retained: " << tables.interactions.size() << '\n'
      << "rows dropped (dangling site): " << tables.summary.rows_dropped_dangling << '\n'
      << "rows dropped (unknown student): " << tables.summary.rows_dropped_unknown_student << '\n';
  for (const auto& [key, n] : tables.summary.participants_per_presentation) {
    out << "participants " << key << ": " << n << '\n';
  }
}

void run_build(const RunConfig& c, std::ostream& out, json& outputs) {
  const OuladTables tables = load_tables(*c.oulad_dir);
  json stats_json = json::object();
  for (const auto& course : c.courses) {
    BuildStats stats;
    const LabeledDataset ds = build_tensor(tables, course, c.split, c.n_weeks, &stats);
    save_dataset(ds, c.out_dir / course);
    stats_json[course] = build_stats_json(stats);
    outputs.push_back(course + "/");
    out << course << ": " << ds.size() << " samples x " << ds.tensor.n_weeks << " weeks x "
        << ds.vocab.size() << " channels\n";
    for (const auto& t : stats.dropped_activity_types) {
      out << "warning: activity type '" << t << "' absent from training presentations, dropped\n";
    }
  }
  write_json(c.out_dir / "build_stats.json", stats_json);
  outputs.push_back("build_stats.json");
}

void run_synth(const RunConfig& c, std::ostream& out, json& outputs) {
  const LabeledDataset ds = gen_synthetic(c.synth);
  save_dataset(ds, c.out_dir);
  outputs.push_back("tensor.bin");
  outputs.push_back("meta.json");
  out << "synthetic " << to_string(c.synth.scheme) << ": " << ds.size() << " samples x "
      << ds.tensor.n_weeks << " weeks x " << ds.tensor.n_activities << " channels\n";
}

void write_reports(const HorizonSweepResult& result, const fs::path& dir, json& outputs) {
  export_report(result, ReportFormat::Csv, dir / "report.csv");
  export_report(result, ReportFormat::Json, dir / "report.json");
  export_plot_data(result, dir / "plot_data.csv");
  outputs.push_back("report.csv");
  outputs.push_back("report.json");
  outputs.push_back("plot_data.csv");
}

void print_row(const SweepRow& r, std::ostream& out, std::ostream& err) {
  if (!r.ok()) {
    err << "warning: " << r.model << " " << to_string(r.scheme) << " h=" << r.horizon << " on "
        << r.course << " failed: " << r.error << '\n';
    return;
  }
  char buf[160];
  std::snprintf(buf, sizeof buf, "%-14s %-10s %-6s h=%-3zu macro=%.4f weighted=%.4f positive=%.4f",
                r.model.c_str(), to_string(r.scheme), r.course.c_str(), r.horizon, r.metrics.macro_f1,
                r.metrics.weighted_f1, r.positive_f1);
  out << buf << '\n';
}

void run_train(const RunConfig& c, std::ostream& out, std::ostream& err, json& outputs) {
  auto sources = load_sources(c, out);
  if (sources.size() != 1) throw Error(ErrorCode::InvalidConfig, "train takes exactly one course or dataset");
  const auto& [course, ds] = *sources.begin();
  const ModelSpec& spec = c.models.front();
  const LabelScheme scheme = c.schemes.front();
  const std::size_t horizon = c.horizons.front();
  const auto start = std::chrono::steady_clock::now();

  auto [train, test] = split_by_cohort(truncate_horizon(ds, horizon), c.split);
  if (!train.normalization) {
    const NormalizationStats stats = fit_minmax(train);
    train = apply_minmax(std::move(train), stats);
    test = apply_minmax(std::move(test), stats);
  }
  if (test.size() == 0) throw Error(ErrorCode::EmptyCourse, "no test samples for " + course);
  const ModelState state = train_model(train, spec, c.train, scheme);
  const auto preds = predict(state, test);
  const auto truths = class_indices(test.outcomes, scheme);

  SweepRow row;
  row.model = spec.name();
  row.description = model_description(spec);
  row.scheme = scheme;
  row.horizon = horizon;
  row.course = course;
  row.seed = c.train.seed;
  row.metrics = f1_metrics(confusion(preds, truths, num_classes(scheme), class_names(scheme)));
  row.positive_f1 = positive_class_f1(preds, truths, scheme);
  if (c.record_wall_time) {
    row.wall_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }

  json metrics = to_json(row.metrics);
  metrics["positive_f1"] = round_to(row.positive_f1);
  save_model(state, c.out_dir / "model", metrics);
  const NormalizationStats& norm = *train.normalization;
  write_json(c.out_dir / "normalization.json",
             {{"channels", norm.channels}, {"min", norm.min}, {"max", norm.max}});
  outputs.push_back("model/");
  outputs.push_back("normalization.json");
  write_reports(HorizonSweepResult{{row}}, c.out_dir, outputs);
  out << "epochs run: " << state.fit.epochs_run << ", best epoch: " << state.fit.best_epoch << '\n';
  print_row(row, out, err);
}

void run_sweep(const RunConfig& c, std::ostream& out, std::ostream& err, json& outputs) {
  const auto sources = load_sources(c, out);
  SweepConfig sc;
  sc.models = c.models;
  sc.horizons = c.horizons;
  sc.schemes = c.schemes;
  sc.split = c.split;
  sc.train = c.train;
  sc.workers = c.workers;
  sc.record_wall_time = c.record_wall_time;
  const HorizonSweepResult result = horizon_sweep(sources, sc);
  for (const auto& r : result.rows) print_row(r, out, err);
  write_reports(result, c.out_dir, outputs);
}

struct OutcomeSplit {
  std::vector<FinalResult> train, test;
};

std::map<std::string, OutcomeSplit> baseline_outcomes(const RunConfig& c) {
  std::map<std::string, OutcomeSplit> by_course;
  if (!c.datasets.empty()) {
    for (const auto& dir : c.datasets) {
      const LabeledDataset ds = load_dataset(dir);
      auto [train, test] = split_by_cohort(ds, c.split);
      by_course[ds.course] = {train.outcomes, test.outcomes};
    }
    return by_course;
  }
  const OuladTables tables = load_tables(*c.oulad_dir);
  std::vector<std::string> courses = c.courses;
  if (courses.size() == 1 && courses.front() == "all") {
    courses.clear();
    for (const auto& o : tables.offerings) {
      if (std::find(courses.begin(), courses.end(), o.course_code) == courses.end()) {
        courses.push_back(o.course_code);
      }
    }
    std::sort(courses.begin(), courses.end());
  }
  for (const auto& course : courses) {
    OutcomeSplit& s = by_course[course];
    auto collect = [&](const std::set<std::string>& presentations, std::vector<FinalResult>& dst) {
      for (const auto& p : presentations) {
        if (!tables.find_offering(course, p)) continue;
        for (const auto& rec : filter_participants(tables, course, p)) dst.push_back(rec.final_result);
      }
    };
    collect(c.split.train_presentations, s.train);
    collect(c.split.test_presentations, s.test);
    if (s.train.empty() && s.test.empty()) throw Error(ErrorCode::UnknownCourse, course);
  }
  return by_course;
}

void run_baseline(const RunConfig& c, std::ostream& out, json& outputs) {
  auto by_course = baseline_outcomes(c);
  if (by_course.size() > 1) {
    OutcomeSplit pooled;
    for (const auto& [course, s] : by_course) {
      pooled.train.insert(pooled.train.end(), s.train.begin(), s.train.end());
      pooled.test.insert(pooled.test.end(), s.test.begin(), s.test.end());
    }
    by_course["ALL"] = std::move(pooled);
  }
  json rows = json::array();
  for (const auto& [course, s] : by_course) {
    if (s.train.empty() || s.test.empty()) {
      out << course << ": skipped (empty train or test cohort)\n";
      continue;
    }
    for (auto scheme : c.schemes) {
      const BaselineReport b = baseline_report(s.train, s.test, scheme);
      const double ref = scheme == LabelScheme::Binary ? kReferenceBinaryF1 : kReferenceMulticlassF1;
      std::vector<std::string> matching;
      if (std::abs(b.f1.macro - ref) <= kReferenceTolerance) matching.push_back("macro");
      if (std::abs(b.f1.weighted - ref) <= kReferenceTolerance) matching.push_back("weighted");
      if (std::abs(b.f1.positive - ref) <= kReferenceTolerance) matching.push_back("positive");
      json row = to_json(b);
      row["course"] = course;
      row["reference_f1"] = ref;
      row["conventions_matching_reference"] = matching;
      row["discrepancy"] = matching.empty();
      rows.push_back(row);

      char buf[200];
      std::snprintf(buf, sizeof buf,
                    "%-5s %-10s majority=%-11s macro=%.4f weighted=%.4f positive=%.4f reference=%.2f",
                    course.c_str(), to_string(scheme), b.majority_name.c_str(), b.f1.macro, b.f1.weighted,
                    b.f1.positive, ref);
      out << buf << (matching.empty() ? "  DISCREPANCY: no averaging convention reproduces the reference"
                                      : "  matches: " + matching.front())
          << '\n';
    }
  }
  write_json(c.out_dir / "baseline.json", {{"rows", rows}});
  outputs.push_back("baseline.json");
}

void run_report(const RunConfig& c, const std::string& format, std::ostream& out, json& outputs) {
  const HorizonSweepResult result = import_report(*c.input);
  if (format == "csv" || format == "all") {
    export_report(result, ReportFormat::Csv, c.out_dir / "report.csv");
    outputs.push_back("report.csv");
  }
  if (format == "json" || format == "all") {
    export_report(result, ReportFormat::Json, c.out_dir / "report.json");
    outputs.push_back("report.json");
  }
  if (format != "csv" && format != "json" && format != "all") {
    throw Error(ErrorCode::InvalidConfig, "--format must be csv, json or all");
  }
  export_plot_data(result, c.out_dir / "plot_data.csv");
  outputs.push_back("plot_data.csv");
  out << result.rows.size() << " rows re-exported\n";
}

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Usage: return 1;
    case ErrorKind::Data: return 2;
    case ErrorKind::Numeric: return 3;
  }
  return 2;
}

}  // namespace

int dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"earlywarn: weekly click-series early warning benchmarks", "earlywarn"};
  app.require_subcommand(1);
  app.set_version_flag("--version", EARLYWARN_VERSION);
  Flags f;

  auto* ingest = app.add_subcommand("ingest", "parse OULAD CSVs and write an ingestion summary");
  add_common(ingest, f);
  ingest->add_option("--oulad-dir", f.oulad_dir, "OULAD CSV directory (fallback: $EARLYWARN_OULAD_DIR)");

  auto* build = app.add_subcommand("build", "build per-course tensors from OULAD tables");
  add_common(build, f);
  add_data_source(build, f);

  auto* synth = app.add_subcommand("synth", "generate a synthetic labeled dataset");
  add_common(synth, f);
  synth->add_option("--seed", f.seed, "random seed");
  synth->add_option("--n-per-class", f.n_per_class);
  synth->add_option("--weeks", f.weeks);
  synth->add_option("--activities", f.activities);
  synth->add_option("--scheme", f.scheme, "binary | multiclass");
  synth->add_option("--dropout-week", f.dropout_week);

  auto* train = app.add_subcommand("train", "train one model at one horizon");
  add_common(train, f);
  add_data_source(train, f);
  add_training(train, f);
  train->add_option("--model", f.model, "fcn | lstm | mlp | knn | knn-dtw | majority");
  train->add_option("--horizon", f.horizon, "observed weeks");

  auto* sweep = app.add_subcommand("sweep", "evaluate models over a horizon grid");
  add_common(sweep, f);
  add_data_source(sweep, f);
  add_training(sweep, f);
  sweep->add_option("--models", f.models, "comma list, e.g. fcn,mlp,knn,lstm");
  sweep->add_option("--horizons", f.horizons, "start:end:step or a comma list (default 5:40:5)");
  sweep->add_option("--workers", f.workers, "parallel jobs (default 1)");

  auto* baseline = app.add_subcommand("baseline", "majority-class baseline under every F1 convention");
  add_common(baseline, f);
  add_data_source(baseline, f);
  baseline->add_option("--scheme", f.scheme, "binary | multiclass | both");

  auto* report = app.add_subcommand("report", "re-export a report.csv / report.json");
  add_common(report, f);
  report->add_option("--input", f.input, "existing report.csv or report.json");
  report->add_option("--format", f.format, "csv | json | all");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::CallForVersion&) {
    out << EARLYWARN_VERSION << '\n';
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return 1;
  }

  const CLI::App* sub = app.get_subcommands().front();
  const auto start = std::chrono::steady_clock::now();
  const std::string started = utc_now();
  RunConfig cfg;
  cfg.command = sub->get_name();
  json outputs = json::array();
  int code = 0;
  std::string failure;
  bool resolved = false;
  try {
    cfg = resolve(*sub, f);
    resolved = true;
    std::error_code ec;
    fs::create_directories(cfg.out_dir, ec);
    if (ec) throw Error(ErrorCode::IoError, "cannot create " + cfg.out_dir.string());
    const std::string& cmd = cfg.command;
    if (cmd == "ingest") run_ingest(cfg, out, outputs);
    else if (cmd == "build") run_build(cfg, out, outputs);
    else if (cmd == "synth") run_synth(cfg, out, outputs);
    else if (cmd == "train") run_train(cfg, out, err, outputs);
    else if (cmd == "sweep") run_sweep(cfg, out, err, outputs);
    else if (cmd == "baseline") run_baseline(cfg, out, outputs);
    else if (cmd == "report") run_report(cfg, f.format, out, outputs);
  } catch (const Error& e) {
    code = exit_code_for(e.kind());
    failure = e.what();
  } catch (const nlohmann::json::exception& e) {
    code = 2;
    failure = e.what();
  } catch (const std::exception& e) {
    code = 2;
    failure = e.what();
  }
  if (code != 0) {
    err << "error: " << failure << '\n';
    if (code == 1) err << '\n' << sub->help();
  }

  if (resolved) {
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    json manifest = {{"command", cfg.command},
                     {"config", cfg.to_json()},
                     {"seed", cfg.seed ? json(*cfg.seed) : json(nullptr)},
                     {"versions", versions()},
                     {"started_utc", started},
                     {"wall_time_s", wall},
                     {"outputs", outputs},
                     {"exit_code", code}};
    if (code != 0) manifest["error"] = failure;
    try {
      write_json(cfg.out_dir / "run_manifest.json", manifest);
    } catch (const Error& e) {
      err << "error: " << e.what() << '\n';
      if (code == 0) code = 2;
    }
  }
  return code;
}

}  // namespace earlywarn::cli
