#include <algorithm>
#include <cmath>

#include "earlywarn/error.hpp"
#include "earlywarn/models.hpp"
#include "models/trainer.hpp"

namespace earlywarn {

using numkit::NamedArray;

namespace {

constexpr const char* kKnnValues = "knn.train_values";
constexpr const char* kKnnLabels = "knn.train_labels";
constexpr const char* kMajorityCounts = "majority.class_counts";

const NamedArray& find_array(const ModelState& state, const std::string& name) {
  for (const auto& a : state.arrays) {
    if (a.name == name) return a;
  }
  throw Error(ErrorCode::SchemaError, "model state has no array '" + name + "'");
}

ModelState empty_state(const LabeledDataset& train, const ModelSpec& spec, LabelScheme scheme) {
  ModelState s;
  s.spec = spec;
  s.num_classes = num_classes(scheme);
  s.fit.scheme = scheme;
  s.fit.horizon = train.tensor.n_weeks;
  s.fit.channels = train.tensor.n_activities;
  s.fit.vocab = train.vocab.names;
  s.fit.train_samples = train.size();
  return s;
}

std::vector<int> labels_from(const NamedArray& a) {
  std::vector<int> out;
  out.reserve(a.values.size());
  for (double v : a.values) out.push_back(static_cast<int>(v));
  return out;
}

}  // namespace

const char* to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::Majority: return "majority";
    case ModelKind::Knn: return "knn";
    case ModelKind::Mlp: return "mlp";
    case ModelKind::Fcn: return "fcn";
    case ModelKind::Lstm: return "lstm";
  }
  return "?";
}

FcnConfig::FcnConfig(std::vector<ConvBlock> b) : blocks(std::move(b)) { validate(); }

void FcnConfig::validate() const {
  if (blocks.empty()) throw Error(ErrorCode::InvalidConfig, "fcn needs at least one block");
  for (const auto& blk : blocks) {
    if (blk.filters == 0 || blk.kernel_size == 0) {
      throw Error(ErrorCode::InvalidConfig, "fcn block filters and kernel_size must be >= 1");
    }
  }
}

LstmConfig::LstmConfig(std::size_t hidden) : hidden_size(hidden) { validate(); }

void LstmConfig::validate() const {
  if (hidden_size == 0) throw Error(ErrorCode::InvalidConfig, "lstm hidden_size must be >= 1");
}

MlpConfig::MlpConfig(std::vector<std::size_t> widths) : hidden_layers(std::move(widths)) { validate(); }

void MlpConfig::validate() const {
  if (hidden_layers.empty()) throw Error(ErrorCode::InvalidConfig, "mlp needs at least one hidden layer");
  if (std::find(hidden_layers.begin(), hidden_layers.end(), 0u) != hidden_layers.end()) {
    throw Error(ErrorCode::InvalidConfig, "mlp hidden widths must be >= 1");
  }
}

ModelSpec ModelSpec::parse(std::string_view name) {
  ModelSpec s;
  if (name == "fcn") s.kind = ModelKind::Fcn;
  else if (name == "lstm") s.kind = ModelKind::Lstm;
  else if (name == "mlp") s.kind = ModelKind::Mlp;
  else if (name == "majority") s.kind = ModelKind::Majority;
  else if (name == "knn" || name == "knn-euclidean") s.kind = ModelKind::Knn;
  else if (name == "knn-dtw") {
    s.kind = ModelKind::Knn;
    s.knn.distance = Distance::Dtw;
  } else {
    throw Error(ErrorCode::InvalidConfig, "unknown model '" + std::string(name) +
                                              "' (expected fcn, lstm, mlp, knn, knn-dtw, majority)");
  }
  return s;
}

std::string ModelSpec::name() const {
  if (kind == ModelKind::Knn) return knn.distance == Distance::Dtw ? "knn-dtw" : "knn-euclidean";
  return to_string(kind);
}

bool ModelSpec::operator==(const ModelSpec& other) const {
  if (kind != other.kind) return false;
  switch (kind) {
    case ModelKind::Fcn: return fcn == other.fcn;
    case ModelKind::Lstm: return lstm == other.lstm;
    case ModelKind::Mlp: return mlp == other.mlp;
    case ModelKind::Knn: return knn == other.knn;
    case ModelKind::Majority: return true;
  }
  return false;
}

nlohmann::json ModelSpec::to_json() const {
  nlohmann::json j{{"kind", name()}};
  switch (kind) {
    case ModelKind::Fcn: {
      auto blocks = nlohmann::json::array();
      for (const auto& b : fcn.blocks) blocks.push_back({{"filters", b.filters}, {"kernel_size", b.kernel_size}});
      j["blocks"] = blocks;
      break;
    }
    case ModelKind::Lstm: j["hidden_size"] = lstm.hidden_size; break;
    case ModelKind::Mlp: j["hidden_layers"] = mlp.hidden_layers; break;
    case ModelKind::Knn: j["k"] = knn.k; break;
    case ModelKind::Majority: break;
  }
  return j;
}

ModelSpec ModelSpec::from_json(const nlohmann::json& j) {
  if (j.is_string()) return parse(j.get<std::string>());
  ModelSpec s = parse(j.at("kind").get<std::string>());
  if (j.contains("blocks")) {
    std::vector<ConvBlock> blocks;
    for (const auto& b : j.at("blocks")) {
      if (b.is_array()) blocks.push_back({b.at(0).get<std::size_t>(), b.at(1).get<std::size_t>()});
      else blocks.push_back({b.at("filters").get<std::size_t>(), b.at("kernel_size").get<std::size_t>()});
    }
    s.fcn = FcnConfig(std::move(blocks));
  }
  if (j.contains("hidden_size")) s.lstm = LstmConfig(j.at("hidden_size").get<std::size_t>());
  if (j.contains("hidden_layers")) s.mlp = MlpConfig(j.at("hidden_layers").get<std::vector<std::size_t>>());
  if (j.contains("k")) s.knn.k = j.at("k").get<std::size_t>();
  if (s.kind == ModelKind::Knn && s.knn.k == 0) throw Error(ErrorCode::InvalidConfig, "knn k must be >= 1");
  return s;
}

void TrainConfig::validate() const {
  if (!(lr > 0.0) || !std::isfinite(lr)) throw Error(ErrorCode::InvalidConfig, "lr must be positive");
  if (batch_size < 2) throw Error(ErrorCode::InvalidConfig, "batch_size must be >= 2");
  if (max_epochs == 0) throw Error(ErrorCode::InvalidConfig, "max_epochs must be >= 1");
  if (early_stop_patience == 0) throw Error(ErrorCode::InvalidConfig, "early_stop_patience must be >= 1");
  if (!(validation_fraction > 0.0 && validation_fraction < 1.0)) {
    throw Error(ErrorCode::InvalidConfig, "validation_fraction must lie in (0, 1)");
  }
}

nlohmann::json TrainConfig::to_json() const {
  return {{"lr", lr},
          {"batch_size", batch_size},
          {"max_epochs", max_epochs},
          {"early_stop_patience", early_stop_patience},
          {"validation_fraction", validation_fraction},
          {"seed", seed},
          {"precision", numkit::to_string(precision)},
          {"class_weights", class_weights}};
}

TrainConfig TrainConfig::from_json(const nlohmann::json& j) {
  TrainConfig tc;
  tc.lr = j.value("lr", tc.lr);
  tc.batch_size = j.value("batch_size", tc.batch_size);
  tc.max_epochs = j.value("max_epochs", tc.max_epochs);
  tc.early_stop_patience = j.value("early_stop_patience", tc.early_stop_patience);
  tc.validation_fraction = j.value("validation_fraction", tc.validation_fraction);
  tc.seed = j.value("seed", tc.seed);
  if (j.contains("precision")) tc.precision = numkit::parse_precision(j.at("precision").get<std::string>());
  tc.class_weights = j.value("class_weights", tc.class_weights);
  tc.validate();
  return tc;
}

ModelState train_fcn(const LabeledDataset& train, const FcnConfig& cfg, const TrainConfig& tc,
                     LabelScheme scheme) {
  ModelSpec spec;
  spec.kind = ModelKind::Fcn;
  spec.fcn = cfg;
  return detail::train_network(train, spec, tc, scheme);
}

ModelState train_mlp(const LabeledDataset& train, const MlpConfig& cfg, const TrainConfig& tc,
                     LabelScheme scheme) {
  ModelSpec spec;
  spec.kind = ModelKind::Mlp;
  spec.mlp = cfg;
  return detail::train_network(train, spec, tc, scheme);
}

ModelState train_lstm(const LabeledDataset& train, const LstmConfig& cfg, const TrainConfig& tc,
                      LabelScheme scheme) {
  ModelSpec spec;
  spec.kind = ModelKind::Lstm;
  spec.lstm = cfg;
  return detail::train_network(train, spec, tc, scheme);
}

ModelState fit_knn(const LabeledDataset& train, const KnnConfig& cfg, LabelScheme scheme) {
  train.validate();
  if (train.size() == 0) throw Error(ErrorCode::EmptyCourse, "knn: empty training set");
  if (cfg.k == 0 || cfg.k > train.size()) {
    throw Error(ErrorCode::InvalidConfig, "knn: k=" + std::to_string(cfg.k) + " outside [1, " +
                                              std::to_string(train.size()) + "]");
  }
  ModelSpec spec;
  spec.kind = ModelKind::Knn;
  spec.knn = cfg;
  ModelState s = empty_state(train, spec, scheme);
  const auto& t = train.tensor;
  s.arrays.push_back({kKnnValues, {t.n_samples, t.n_weeks, t.n_activities}, t.values});
  const auto labels = class_indices(train.outcomes, scheme);
  s.arrays.push_back({kKnnLabels, {labels.size()}, std::vector<double>(labels.begin(), labels.end())});
  return s;
}

ModelState fit_majority(const LabeledDataset& train, LabelScheme scheme) {
  if (train.size() == 0) throw Error(ErrorCode::EmptyCourse, "majority: empty training set");
  ModelSpec spec;
  spec.kind = ModelKind::Majority;
  ModelState s = empty_state(train, spec, scheme);
  std::vector<double> counts(s.num_classes, 0.0);
  for (int c : class_indices(train.outcomes, scheme)) counts[static_cast<std::size_t>(c)] += 1.0;
  s.arrays.push_back({kMajorityCounts, {counts.size()}, counts});
  return s;
}

ModelState train_model(const LabeledDataset& train, const ModelSpec& spec, const TrainConfig& tc,
                       LabelScheme scheme) {
  ModelState s;
  switch (spec.kind) {
    case ModelKind::Majority: s = fit_majority(train, scheme); break;
    case ModelKind::Knn: s = fit_knn(train, spec.knn, scheme); break;
    default: return detail::train_network(train, spec, tc, scheme);
  }
  s.train_config = tc;
  s.fit.seed = tc.seed;
  return s;
}

std::vector<int> predict(const ModelState& state, const LabeledDataset& ds) {
  ds.validate();
  if (ds.tensor.n_weeks != state.fit.horizon || ds.tensor.n_activities != state.fit.channels) {
    throw Error(ErrorCode::ShapeMismatch,
                "predict: input has " + std::to_string(ds.tensor.n_weeks) + " weeks x " +
                    std::to_string(ds.tensor.n_activities) + " channels, model was fit on " +
                    std::to_string(state.fit.horizon) + " x " + std::to_string(state.fit.channels));
  }
  std::vector<int> preds;
  switch (state.kind()) {
    case ModelKind::Majority: {
      const auto& counts = find_array(state, kMajorityCounts).values;
      const auto best = std::max_element(counts.begin(), counts.end()) - counts.begin();
      preds.assign(ds.size(), static_cast<int>(best));
      break;
    }
    case ModelKind::Knn: {
      const auto& values = find_array(state, kKnnValues);
      SeriesTensor train(values.shape.at(0), values.shape.at(1), values.shape.at(2));
      train.values = values.values;
      preds = knn_predict(train, labels_from(find_array(state, kKnnLabels)), ds.tensor, state.spec.knn);
      break;
    }
    default:
      preds = detail::predict_network(state, ds);
  }
  for (int p : preds) {
    if (p < 0 || static_cast<std::size_t>(p) >= state.num_classes) {
      throw Error(ErrorCode::ClassOutOfRange, "predict produced class " + std::to_string(p));
    }
  }
  return preds;
}

}  // namespace earlywarn
