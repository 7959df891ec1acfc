#include "earlywarn/numkit/checkpoint.hpp"

#include <fstream>

#include <json.hpp>

#include "earlywarn/binary_io.hpp"

namespace earlywarn::numkit {

namespace fs = std::filesystem;
using nlohmann::json;

const NamedArray& Checkpoint::find(const std::string& name) const {
  for (const auto& a : arrays) {
    if (a.name == name) return a;
  }
  throw Error(ErrorCode::SchemaError, "checkpoint has no array '" + name + "'");
}

void save_checkpoint(const Checkpoint& ckpt, const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::IoError, "cannot create " + dir.string() + ": " + ec.message());

  std::vector<double> flat;
  json layers = json::array();
  for (const auto& a : ckpt.arrays) {
    if (a.values.size() != element_count(a.shape)) {
      throw Error(ErrorCode::ShapeMismatch, "checkpoint array " + a.name + " size/shape mismatch");
    }
    layers.push_back({{"name", a.name}, {"shape", a.shape}, {"offset", flat.size()},
                      {"count", a.values.size()}});
    flat.insert(flat.end(), a.values.begin(), a.values.end());
  }
  write_f64_le(dir / "params.bin", flat);

  json manifest = {{"format", kCheckpointFormat},
                   {"precision", to_string(ckpt.precision)},
                   {"seed", ckpt.seed},
                   {"total_values", flat.size()},
                   {"layers", layers}};
  std::ofstream out(dir / "manifest.json", std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + (dir / "manifest.json").string());
  out << manifest.dump(2) << '\n';
}

Checkpoint load_checkpoint(const fs::path& dir) {
  std::ifstream in(dir / "manifest.json");
  if (!in) throw Error(ErrorCode::MissingFile, (dir / "manifest.json").string());
  const std::vector<double> flat = read_f64_le(dir / "params.bin");
  Checkpoint ckpt;
  try {
    const json manifest = json::parse(in);
    if (manifest.at("format") != kCheckpointFormat) {
      throw Error(ErrorCode::SchemaError, "unsupported checkpoint format");
    }
    ckpt.precision = parse_precision(manifest.at("precision").get<std::string>());
    ckpt.seed = manifest.at("seed").get<std::uint64_t>();
    for (const auto& layer : manifest.at("layers")) {
      NamedArray a;
      a.name = layer.at("name").get<std::string>();
      a.shape = layer.at("shape").get<std::vector<std::size_t>>();
      const auto offset = layer.at("offset").get<std::size_t>();
      const auto count = layer.at("count").get<std::size_t>();
      if (count != element_count(a.shape) || offset + count > flat.size()) {
        throw Error(ErrorCode::SchemaError, "checkpoint layer " + a.name + " out of range");
      }
      a.values.assign(flat.begin() + static_cast<std::ptrdiff_t>(offset),
                      flat.begin() + static_cast<std::ptrdiff_t>(offset + count));
      ckpt.arrays.push_back(std::move(a));
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::SchemaError, (dir / "manifest.json").string() + ": " + e.what());
  }
  return ckpt;
}

}  // namespace earlywarn::numkit
