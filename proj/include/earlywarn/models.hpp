#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "earlywarn/numkit/checkpoint.hpp"
#include "earlywarn/numkit/tensor.hpp"
#include "earlywarn/series.hpp"

namespace earlywarn {

enum class ModelKind { Majority, Knn, Mlp, Fcn, Lstm };

const char* to_string(ModelKind kind);

struct ConvBlock {
  std::size_t filters = 0;
  std::size_t kernel_size = 0;
  bool operator==(const ConvBlock&) const = default;
};

struct FcnConfig {
  std::vector<ConvBlock> blocks{{128, 8}, {256, 5}, {128, 3}};

  FcnConfig() = default;
  explicit FcnConfig(std::vector<ConvBlock> b);
  void validate() const;
  bool operator==(const FcnConfig&) const = default;
};

// "DOPP-style": one LSTM layer over weekly activity vectors, final hidden
// state into a softmax head.
struct LstmConfig {
  std::size_t hidden_size = 64;

  LstmConfig() = default;
  explicit LstmConfig(std::size_t hidden);
  void validate() const;
  bool operator==(const LstmConfig&) const = default;
};

struct MlpConfig {
  std::vector<std::size_t> hidden_layers{256, 128};

  MlpConfig() = default;
  // Throws InvalidConfig for an empty list or a zero width.
  explicit MlpConfig(std::vector<std::size_t> widths);
  void validate() const;
  bool operator==(const MlpConfig&) const = default;
};

enum class Distance { Euclidean, Dtw };

struct KnnConfig {
  std::size_t k = 5;
  Distance distance = Distance::Euclidean;
  bool operator==(const KnnConfig&) const = default;
};

// A model family plus its configuration; only the member matching `kind` is used.
struct ModelSpec {
  ModelKind kind = ModelKind::Fcn;
  FcnConfig fcn;
  LstmConfig lstm;
  MlpConfig mlp;
  KnnConfig knn;

  // fcn | lstm | mlp | knn (Euclidean) | knn-euclidean | knn-dtw | majority
  static ModelSpec parse(std::string_view name);
  std::string name() const;
  nlohmann::json to_json() const;
  static ModelSpec from_json(const nlohmann::json& j);
  // Compares the kind and the active member only.
  bool operator==(const ModelSpec& other) const;
};

struct TrainConfig {
  double lr = 1e-3;
  std::size_t batch_size = 64;
  std::size_t max_epochs = 100;
  std::size_t early_stop_patience = 10;
  double validation_fraction = 0.2;
  std::uint64_t seed = 0;
  numkit::Precision precision = numkit::Precision::F64;
  bool class_weights = false;  // inverse-frequency loss weights

  void validate() const;
  nlohmann::json to_json() const;
  static TrainConfig from_json(const nlohmann::json& j);
  bool operator==(const TrainConfig&) const = default;
};

struct FitMetadata {
  LabelScheme scheme = LabelScheme::Binary;
  std::size_t horizon = 0;   // weeks seen at fit time
  std::size_t channels = 0;
  std::vector<std::string> vocab;
  std::uint64_t seed = 0;
  std::size_t train_samples = 0;
  std::size_t epochs_run = 0;
  std::size_t best_epoch = 0;
  double best_validation_f1 = 0.0;
  std::vector<double> train_loss;      // per epoch
  std::vector<double> validation_f1;   // weighted F1 per epoch

  bool operator==(const FitMetadata&) const = default;
};

struct ModelState {
  ModelSpec spec;
  TrainConfig train_config;
  std::size_t num_classes = 0;
  std::vector<numkit::NamedArray> arrays;
  FitMetadata fit;

  ModelKind kind() const { return spec.kind; }
  bool operator==(const ModelState&) const = default;
};

// Classic unconstrained DTW with |a_i - b_j| local cost. Throws EmptySeries.
double dtw_distance(std::span<const double> a, std::span<const double> b);

// Sum over channels of univariate DTW between sample `i` of `a` and sample `j` of `b`.
double dtw_channelwise(const SeriesTensor& a, std::size_t i, const SeriesTensor& b, std::size_t j);
double euclidean_distance(std::span<const double> a, std::span<const double> b);

// Majority vote among the k nearest training samples; ties go to the class
// with the smaller summed neighbor distance, then the smaller class index.
std::vector<int> knn_predict(const SeriesTensor& train, std::span<const int> train_labels,
                             const SeriesTensor& query, const KnnConfig& cfg);

// Most frequent training class for every query; ties go to the smaller index.
std::vector<int> majority_predict(std::span<const int> train_labels, std::size_t query_size);

// Mini-batch Adam with stratified validation hold-out and early stopping on
// weighted F1. Throws SingleClassTrainingSet when fewer than two classes occur.
ModelState train_fcn(const LabeledDataset& train, const FcnConfig& cfg, const TrainConfig& tc,
                     LabelScheme scheme);
ModelState train_mlp(const LabeledDataset& train, const MlpConfig& cfg, const TrainConfig& tc,
                     LabelScheme scheme);
ModelState train_lstm(const LabeledDataset& train, const LstmConfig& cfg, const TrainConfig& tc,
                      LabelScheme scheme);
ModelState fit_knn(const LabeledDataset& train, const KnnConfig& cfg, LabelScheme scheme);
ModelState fit_majority(const LabeledDataset& train, LabelScheme scheme);

ModelState train_model(const LabeledDataset& train, const ModelSpec& spec, const TrainConfig& tc,
                       LabelScheme scheme);

// Class index per sample, always < num_classes. Throws ShapeMismatch when
// the (weeks, channels) shape differs from fit time.
std::vector<int> predict(const ModelState& state, const LabeledDataset& ds);

std::string vocab_hash(const std::vector<std::string>& vocab);

// Checkpoint (params.bin + manifest.json) plus model.json. `metrics` is
// stored verbatim under "metrics_at_fit".
void save_model(const ModelState& state, const std::filesystem::path& dir,
                const nlohmann::json& metrics = nlohmann::json::object());
ModelState load_model(const std::filesystem::path& dir);

}  // namespace earlywarn
