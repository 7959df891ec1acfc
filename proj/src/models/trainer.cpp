#include "models/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "earlywarn/error.hpp"
#include "earlywarn/eval.hpp"
#include "earlywarn/numkit/adam.hpp"
#include "models/networks.hpp"

namespace earlywarn::detail {

using numkit::Mode;
using numkit::Tensor;

namespace {

constexpr std::size_t kPredictChunk = 256;

// Stream ids for Rng::derive, one per independent consumer of the seed.
constexpr std::uint64_t kSplitStream = 1;
constexpr std::uint64_t kInitStream = 2;
constexpr std::uint64_t kShuffleStream = 3;

template <class T>
Tensor<T> gather(const SeriesTensor& t, std::span<const std::size_t> rows) {
  const std::size_t stride = t.n_weeks * t.n_activities;
  Tensor<T> x({rows.size(), t.n_weeks, t.n_activities});
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const double* src = t.values.data() + rows[i] * stride;
    std::transform(src, src + stride, x.data.begin() + static_cast<std::ptrdiff_t>(i * stride),
                   [](double v) { return static_cast<T>(v); });
  }
  return x;
}

template <class T>
std::vector<int> argmax_rows(const Tensor<T>& logits) {
  const std::size_t b = logits.dim(0), k = logits.dim(1);
  std::vector<int> out(b);
  for (std::size_t r = 0; r < b; ++r) {
    const T* row = logits.data.data() + r * k;
    out[r] = static_cast<int>(std::max_element(row, row + k) - row);
  }
  return out;
}

template <class T>
std::vector<int> predict_rows(Network<T>& net, const SeriesTensor& t, std::span<const std::size_t> rows) {
  std::vector<int> out;
  out.reserve(rows.size());
  for (std::size_t start = 0; start < rows.size(); start += kPredictChunk) {
    const auto chunk = rows.subspan(start, std::min(kPredictChunk, rows.size() - start));
    const auto preds = argmax_rows(net.forward(gather<T>(t, chunk), Mode::Eval));
    out.insert(out.end(), preds.begin(), preds.end());
  }
  return out;
}

std::vector<double> inverse_frequency_weights(std::span<const int> labels,
                                              std::span<const std::size_t> rows, std::size_t k) {
  std::vector<double> counts(k, 0.0);
  for (auto r : rows) counts[static_cast<std::size_t>(labels[r])] += 1.0;
  std::vector<double> w(k, 0.0);
  for (std::size_t c = 0; c < k; ++c) {
    w[c] = counts[c] > 0.0 ? static_cast<double>(rows.size()) / (static_cast<double>(k) * counts[c]) : 0.0;
  }
  return w;
}

template <class T>
ModelState fit(const LabeledDataset& train, const ModelSpec& spec, const TrainConfig& tc,
               LabelScheme scheme) {
  const auto labels = class_indices(train.outcomes, scheme);
  const std::size_t k = num_classes(scheme);
  const SeriesTensor& data = train.tensor;

  Rng split_rng = Rng::derive(tc.seed, kSplitStream);
  StratifiedSplit split = stratified_split(labels, tc.validation_fraction, split_rng);
  if (split.fit.size() < 2) {
    throw Error(ErrorCode::TrainingFailed, "fewer than two samples left for fitting");
  }
  if (split.validation.empty()) split.validation = split.fit;

  auto net = make_network<T>(spec, data.n_weeks, data.n_activities, k);
  Rng init_rng = Rng::derive(tc.seed, kInitStream);
  net->init(init_rng);
  auto params = net->params();

  numkit::AdamState<T> adam;
  adam.config.lr = tc.lr;
  const std::vector<double> class_weights =
      tc.class_weights ? inverse_frequency_weights(labels, split.fit, k) : std::vector<double>{};

  std::vector<int> val_truth;
  for (auto r : split.validation) val_truth.push_back(labels[r]);

  ModelState state;
  state.spec = spec;
  state.train_config = tc;
  state.num_classes = k;
  FitMetadata& meta = state.fit;
  meta.best_validation_f1 = -1.0;

  Rng shuffle_rng = Rng::derive(tc.seed, kShuffleStream);
  std::vector<std::size_t> order = split.fit;
  std::size_t since_best = 0;
  std::vector<int> batch_labels;
  for (std::size_t epoch = 1; epoch <= tc.max_epochs; ++epoch) {
    shuffle_rng.shuffle(order);
    double epoch_loss = 0.0;
    for (const auto& batch : make_batches(order, tc.batch_size)) {
      batch_labels.clear();
      for (auto r : batch) batch_labels.push_back(labels[r]);
      for (auto* p : params) p->zero_grad();
      const Tensor<T> logits = net->forward(gather<T>(data, batch), Mode::Train);
      const auto xent = numkit::softmax_xent(logits, batch_labels, class_weights);
      net->backward(numkit::softmax_xent_backward(xent.probs, batch_labels, class_weights));
      numkit::adam_step<T>(params, adam);
      epoch_loss += xent.loss * static_cast<double>(batch.size());
    }
    epoch_loss /= static_cast<double>(order.size());
    if (!std::isfinite(epoch_loss)) {
      throw Error(ErrorCode::NumericFailure, "training loss diverged at epoch " + std::to_string(epoch));
    }

    const auto val_pred = predict_rows(*net, data, split.validation);
    const double val_f1 = f1_metrics(confusion(val_pred, val_truth, k)).weighted_f1;
    meta.train_loss.push_back(epoch_loss);
    meta.validation_f1.push_back(val_f1);
    meta.epochs_run = epoch;
    if (val_f1 > meta.best_validation_f1) {
      meta.best_validation_f1 = val_f1;
      meta.best_epoch = epoch;
      state.arrays = net->export_arrays();
      since_best = 0;
    } else if (++since_best >= tc.early_stop_patience) {
      break;
    }
  }
  return state;
}

template <class T>
std::vector<int> predict_with(const ModelState& state, const LabeledDataset& ds) {
  auto net = make_network<T>(state.spec, ds.tensor.n_weeks, ds.tensor.n_activities, state.num_classes);
  net->import_arrays(state.arrays);
  std::vector<std::size_t> rows(ds.size());
  for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = i;
  return predict_rows(*net, ds.tensor, rows);
}

}  // namespace

StratifiedSplit stratified_split(std::span<const int> labels, double fraction, Rng& rng) {
  std::map<int, std::vector<std::size_t>> by_class;
  for (std::size_t i = 0; i < labels.size(); ++i) by_class[labels[i]].push_back(i);
  StratifiedSplit split;
  for (auto& [label, members] : by_class) {
    rng.shuffle(members);
    std::size_t n_val = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(members.size())));
    if (members.size() >= 2) n_val = std::clamp<std::size_t>(n_val, 1, members.size() - 1);
    else n_val = 0;
    split.validation.insert(split.validation.end(), members.begin(),
                            members.begin() + static_cast<std::ptrdiff_t>(n_val));
    split.fit.insert(split.fit.end(), members.begin() + static_cast<std::ptrdiff_t>(n_val),
                     members.end());
  }
  std::sort(split.fit.begin(), split.fit.end());
  std::sort(split.validation.begin(), split.validation.end());
  return split;
}

std::vector<std::vector<std::size_t>> make_batches(const std::vector<std::size_t>& order,
                                                   std::size_t batch_size) {
  std::vector<std::vector<std::size_t>> batches;
  for (std::size_t start = 0; start < order.size(); start += batch_size) {
    const std::size_t end = std::min(order.size(), start + batch_size);
    batches.emplace_back(order.begin() + static_cast<std::ptrdiff_t>(start),
                         order.begin() + static_cast<std::ptrdiff_t>(end));
  }
  if (batches.size() >= 2 && batches.back().size() == 1) {
    batches[batches.size() - 2].push_back(batches.back().front());
    batches.pop_back();
  }
  return batches;
}

ModelState train_network(const LabeledDataset& train, const ModelSpec& spec, const TrainConfig& tc,
                         LabelScheme scheme) {
  tc.validate();
  train.validate();
  const auto labels = class_indices(train.outcomes, scheme);
  if (std::set<int>(labels.begin(), labels.end()).size() < 2) {
    throw Error(ErrorCode::SingleClassTrainingSet, "training set has fewer than two classes");
  }
  ModelState state = tc.precision == numkit::Precision::F32 ? fit<float>(train, spec, tc, scheme)
                                                            : fit<double>(train, spec, tc, scheme);
  state.fit.scheme = scheme;
  state.fit.horizon = train.tensor.n_weeks;
  state.fit.channels = train.tensor.n_activities;
  state.fit.vocab = train.vocab.names;
  state.fit.seed = tc.seed;
  state.fit.train_samples = train.size();
  return state;
}

std::vector<int> predict_network(const ModelState& state, const LabeledDataset& ds) {
  return state.train_config.precision == numkit::Precision::F32 ? predict_with<float>(state, ds)
                                                                : predict_with<double>(state, ds);
}

}  // namespace earlywarn::detail
