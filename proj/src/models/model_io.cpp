#include <fstream>

#include "earlywarn/error.hpp"
#include "earlywarn/models.hpp"

namespace earlywarn {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kModelFormat = "earlywarn-model-1";

json fit_to_json(const FitMetadata& f) {
  return {{"scheme", to_string(f.scheme)},
          {"horizon", f.horizon},
          {"channels", f.channels},
          {"vocab", f.vocab},
          {"vocab_hash", vocab_hash(f.vocab)},
          {"seed", f.seed},
          {"train_samples", f.train_samples},
          {"epochs_run", f.epochs_run},
          {"best_epoch", f.best_epoch},
          {"best_validation_f1", f.best_validation_f1},
          {"train_loss", f.train_loss},
          {"validation_f1", f.validation_f1}};
}

FitMetadata fit_from_json(const json& j) {
  FitMetadata f;
  f.scheme = parse_label_scheme(j.at("scheme").get<std::string>());
  f.horizon = j.at("horizon").get<std::size_t>();
  f.channels = j.at("channels").get<std::size_t>();
  f.vocab = j.at("vocab").get<std::vector<std::string>>();
  if (j.at("vocab_hash").get<std::string>() != vocab_hash(f.vocab)) {
    throw Error(ErrorCode::SchemaError, "model.json: vocab_hash does not match vocab");
  }
  f.seed = j.at("seed").get<std::uint64_t>();
  f.train_samples = j.at("train_samples").get<std::size_t>();
  f.epochs_run = j.at("epochs_run").get<std::size_t>();
  f.best_epoch = j.at("best_epoch").get<std::size_t>();
  f.best_validation_f1 = j.at("best_validation_f1").get<double>();
  f.train_loss = j.at("train_loss").get<std::vector<double>>();
  f.validation_f1 = j.at("validation_f1").get<std::vector<double>>();
  return f;
}

}  // namespace

// FNV-1a over the names, each terminated by a NUL byte.
std::string vocab_hash(const std::vector<std::string>& vocab) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&h](unsigned char c) {
    h ^= c;
    h *= 0x100000001b3ULL;
  };
  for (const auto& name : vocab) {
    for (unsigned char c : name) mix(c);
    mix(0);
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i, h >>= 4) out[static_cast<std::size_t>(i)] = kHex[h & 0xf];
  return out;
}

void save_model(const ModelState& state, const fs::path& dir, const json& metrics) {
  numkit::Checkpoint ckpt;
  ckpt.arrays = state.arrays;
  ckpt.precision = state.train_config.precision;
  ckpt.seed = state.fit.seed;
  numkit::save_checkpoint(ckpt, dir);

  const json model = {{"format", kModelFormat},
                      {"kind", to_string(state.kind())},
                      {"model", state.spec.to_json()},
                      {"train_config", state.train_config.to_json()},
                      {"num_classes", state.num_classes},
                      {"fit", fit_to_json(state.fit)},
                      {"metrics_at_fit", metrics}};
  std::ofstream out(dir / "model.json", std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + (dir / "model.json").string());
  out << model.dump(2) << '\n';
}

ModelState load_model(const fs::path& dir) {
  std::ifstream in(dir / "model.json");
  if (!in) throw Error(ErrorCode::MissingFile, (dir / "model.json").string());
  ModelState state;
  try {
    const json model = json::parse(in);
    if (model.at("format") != kModelFormat) throw Error(ErrorCode::SchemaError, "unsupported model format");
    state.spec = ModelSpec::from_json(model.at("model"));
    state.train_config = TrainConfig::from_json(model.at("train_config"));
    state.num_classes = model.at("num_classes").get<std::size_t>();
    state.fit = fit_from_json(model.at("fit"));
  } catch (const json::exception& e) {
    throw Error(ErrorCode::SchemaError, (dir / "model.json").string() + ": " + e.what());
  }
  numkit::Checkpoint ckpt = numkit::load_checkpoint(dir);
  state.arrays = std::move(ckpt.arrays);
  return state;
}

}  // namespace earlywarn
