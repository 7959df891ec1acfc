#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <sstream>
#include <tuple>

#include "earlywarn/error.hpp"
#include "earlywarn/sweep.hpp"
#include "ingest/csv_reader.hpp"

namespace earlywarn {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string fixed6(double v) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

double parse_real(std::string_view text, const detail::CsvReader& csv) {
  if (text == "nan") return std::numeric_limits<double>::quiet_NaN();
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw Error(ErrorCode::ParseError, csv.file_name() + ":" + std::to_string(csv.line_number()) +
                                           ": bad number '" + std::string(text) + "'");
  }
  return v;
}

template <class U>
U parse_unsigned(std::string_view text, const detail::CsvReader& csv) {
  U v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (text.empty() || ec != std::errc{} || ptr != text.data() + text.size()) {
    throw Error(ErrorCode::ParseError, csv.file_name() + ":" + std::to_string(csv.line_number()) +
                                           ": bad integer '" + std::string(text) + "'");
  }
  return v;
}

// Writes `content` to `path`, reporting failures as IoError.
void write_file(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  out << content;
  if (!out) throw Error(ErrorCode::IoError, "write failed for " + path.string());
}

// NaN is not representable in JSON; failed rows store null.
json real_or_null(double v) { return std::isfinite(v) ? json(round_to(v)) : json(nullptr); }

double real_from(const json& j) {
  return j.is_null() ? std::numeric_limits<double>::quiet_NaN() : j.get<double>();
}

std::string csv_report(const HorizonSweepResult& result) {
  std::ostringstream os;
  os << kReportColumns << '\n';
  for (const auto& r : result.rows) {
    os << r.model << ',' << to_string(r.scheme) << ',' << r.horizon << ',' << r.course << ','
       << fixed6(r.metrics.macro_f1) << ',' << fixed6(r.metrics.weighted_f1) << ','
       << fixed6(r.positive_f1) << ',' << r.seed << ',' << fixed6(r.wall_s) << '\n';
  }
  return os.str();
}

HorizonSweepResult import_csv(const fs::path& path) {
  detail::CsvReader csv(path);
  csv.require_columns({"model", "scheme", "horizon", "course", "macro_f1", "weighted_f1",
                       "positive_f1", "seed", "wall_s"});
  const auto c_model = csv.column("model"), c_scheme = csv.column("scheme"),
             c_horizon = csv.column("horizon"), c_course = csv.column("course"),
             c_macro = csv.column("macro_f1"), c_weighted = csv.column("weighted_f1"),
             c_positive = csv.column("positive_f1"), c_seed = csv.column("seed"),
             c_wall = csv.column("wall_s");
  HorizonSweepResult result;
  while (csv.next()) {
    SweepRow r;
    r.model = std::string(csv.field(c_model));
    r.description = model_description(ModelSpec::parse(r.model));
    r.scheme = parse_label_scheme(csv.field(c_scheme));
    r.horizon = parse_unsigned<std::size_t>(csv.field(c_horizon), csv);
    r.course = std::string(csv.field(c_course));
    r.metrics.macro_f1 = parse_real(csv.field(c_macro), csv);
    r.metrics.weighted_f1 = parse_real(csv.field(c_weighted), csv);
    r.positive_f1 = parse_real(csv.field(c_positive), csv);
    r.seed = parse_unsigned<std::uint64_t>(csv.field(c_seed), csv);
    r.wall_s = parse_real(csv.field(c_wall), csv);
    if (std::isnan(r.metrics.weighted_f1)) r.status = "failed";
    result.rows.push_back(std::move(r));
  }
  return result;
}

}  // namespace

ReportFormat parse_report_format(std::string_view text) {
  if (text == "csv") return ReportFormat::Csv;
  if (text == "json") return ReportFormat::Json;
  throw Error(ErrorCode::InvalidConfig, "unknown report format '" + std::string(text) + "'");
}

json to_json(const HorizonSweepResult& result) {
  json rows = json::array();
  for (const auto& r : result.rows) {
    json row = {{"model", r.model},
                {"description", r.description},
                {"scheme", to_string(r.scheme)},
                {"horizon", r.horizon},
                {"course", r.course},
                {"macro_f1", real_or_null(r.metrics.macro_f1)},
                {"weighted_f1", real_or_null(r.metrics.weighted_f1)},
                {"positive_f1", real_or_null(r.positive_f1)},
                {"seed", r.seed},
                {"wall_s", round_to(r.wall_s)},
                {"status", r.status}};
    row["metrics"] = r.ok() ? to_json(r.metrics) : json(nullptr);
    if (!r.ok()) row["error"] = r.error;
    rows.push_back(std::move(row));
  }
  return {{"columns", kReportColumns}, {"rows", rows}};
}

HorizonSweepResult sweep_from_json(const json& j) {
  HorizonSweepResult result;
  try {
    for (const auto& row : j.at("rows")) {
      SweepRow r;
      r.model = row.at("model").get<std::string>();
      r.description = row.value("description", "");
      r.scheme = parse_label_scheme(row.at("scheme").get<std::string>());
      r.horizon = row.at("horizon").get<std::size_t>();
      r.course = row.at("course").get<std::string>();
      r.seed = row.at("seed").get<std::uint64_t>();
      r.wall_s = row.at("wall_s").get<double>();
      r.status = row.at("status").get<std::string>();
      r.error = row.value("error", "");
      if (!row.at("metrics").is_null()) r.metrics = metrics_from_json(row.at("metrics"));
      r.metrics.macro_f1 = real_from(row.at("macro_f1"));
      r.metrics.weighted_f1 = real_from(row.at("weighted_f1"));
      r.positive_f1 = real_from(row.at("positive_f1"));
      if (!r.ok()) r.metrics.micro_f1 = r.metrics.accuracy = std::numeric_limits<double>::quiet_NaN();
      result.rows.push_back(std::move(r));
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::SchemaError, std::string("report json: ") + e.what());
  }
  return result;
}

void export_report(const HorizonSweepResult& result, ReportFormat format, const fs::path& path) {
  if (result.empty()) throw Error(ErrorCode::IoError, "refusing to write an empty report to " + path.string());
  write_file(path, format == ReportFormat::Csv ? csv_report(result) : to_json(result).dump(2) + "\n");
}

HorizonSweepResult import_report(const fs::path& path) {
  if (path.extension() == ".csv") return import_csv(path);
  if (path.extension() == ".json") {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::MissingFile, path.string());
    try {
      return sweep_from_json(json::parse(in));
    } catch (const json::parse_error& e) {
      throw Error(ErrorCode::ParseError, path.string() + ": " + e.what());
    }
  }
  throw Error(ErrorCode::InvalidConfig, "report must end in .csv or .json: " + path.string());
}

void export_plot_data(const HorizonSweepResult& result, const fs::path& path) {
  if (result.empty()) throw Error(ErrorCode::IoError, "refusing to write empty plot data to " + path.string());
  std::vector<std::string> models;
  for (const auto& r : result.rows) {
    if (std::find(models.begin(), models.end(), r.model) == models.end()) models.push_back(r.model);
  }
  // (course, scheme, horizon) -> weighted F1 per model, in first-seen order.
  using Key = std::tuple<std::string, std::string, std::size_t>;
  std::vector<Key> keys;
  std::map<Key, std::map<std::string, double>> cells;
  for (const auto& r : result.rows) {
    Key key{r.course, to_string(r.scheme), r.horizon};
    if (!cells.contains(key)) keys.push_back(key);
    cells[key][r.model] = r.metrics.weighted_f1;
  }
  std::ostringstream os;
  os << "course,scheme,horizon";
  for (const auto& m : models) os << ',' << m;
  os << '\n';
  for (const auto& key : keys) {
    os << std::get<0>(key) << ',' << std::get<1>(key) << ',' << std::get<2>(key);
    const auto& row = cells[key];
    for (const auto& m : models) {
      const auto it = row.find(m);
      os << ',' << (it == row.end() ? std::string() : fixed6(it->second));
    }
    os << '\n';
  }
  write_file(path, os.str());
}

}  // namespace earlywarn
