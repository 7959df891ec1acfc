#include <fstream>

#include <json.hpp>

#include "earlywarn/binary_io.hpp"
#include "earlywarn/error.hpp"
#include "earlywarn/series.hpp"

namespace earlywarn {

namespace fs = std::filesystem;
using nlohmann::json;

void save_dataset(const LabeledDataset& ds, const fs::path& dir) {
  ds.validate();
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::IoError, "cannot create " + dir.string() + ": " + ec.message());

  write_f64_le(dir / "tensor.bin", ds.tensor.values);

  json meta;
  meta["builder_version"] = kBuilderVersion;
  meta["course"] = ds.course;
  meta["shape"] = {ds.tensor.n_samples, ds.tensor.n_weeks, ds.tensor.n_activities};
  meta["vocab"] = ds.vocab.names;
  json ids = json::array();
  for (const auto& id : ds.tensor.sample_ids) ids.push_back({id.student_id, id.presentation_code});
  meta["sample_ids"] = ids;
  meta["cohorts"] = ds.cohort;
  json outcomes = json::array();
  for (auto r : ds.outcomes) outcomes.push_back(to_string(r));
  meta["outcomes"] = outcomes;
  if (ds.normalization) {
    meta["normalization"] = {{"channels", ds.normalization->channels},
                             {"min", ds.normalization->min},
                             {"max", ds.normalization->max}};
  } else {
    meta["normalization"] = nullptr;
  }
  std::ofstream out(dir / "meta.json", std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + (dir / "meta.json").string());
  out << meta.dump(2) << '\n';
}

LabeledDataset load_dataset(const fs::path& dir) {
  std::ifstream in(dir / "meta.json");
  if (!in) throw Error(ErrorCode::MissingFile, (dir / "meta.json").string());
  LabeledDataset ds;
  try {
    const json meta = json::parse(in);
    const auto shape = meta.at("shape").get<std::vector<std::size_t>>();
    if (shape.size() != 3) throw Error(ErrorCode::SchemaError, "meta.json: shape must have 3 axes");
    ds.course = meta.value("course", "");
    ds.tensor = SeriesTensor(shape[0], shape[1], shape[2]);
    ds.vocab.names = meta.at("vocab").get<std::vector<std::string>>();
    const auto& ids = meta.at("sample_ids");
    if (ids.size() != shape[0]) throw Error(ErrorCode::ShapeMismatch, "meta.json: sample_ids length");
    for (std::size_t i = 0; i < ids.size(); ++i) {
      ds.tensor.sample_ids[i] = {ids[i].at(0).get<std::int32_t>(), ids[i].at(1).get<std::string>()};
    }
    ds.cohort = meta.at("cohorts").get<std::vector<std::string>>();
    for (const auto& o : meta.at("outcomes")) ds.outcomes.push_back(parse_final_result(o.get<std::string>()));
    const auto& norm = meta.at("normalization");
    if (!norm.is_null()) {
      ds.normalization = NormalizationStats{norm.at("channels").get<std::vector<std::string>>(),
                                            norm.at("min").get<std::vector<double>>(),
                                            norm.at("max").get<std::vector<double>>()};
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::SchemaError, (dir / "meta.json").string() + ": " + e.what());
  }
  ds.tensor.values = read_f64_le(dir / "tensor.bin");
  ds.validate();
  return ds;
}

}  // namespace earlywarn
