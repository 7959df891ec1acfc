#include <cmath>
#include <numeric>

#include "earlywarn/error.hpp"
#include "earlywarn/eval.hpp"
#include "earlywarn/models.hpp"

namespace earlywarn {

std::uint64_t ConfusionMatrix::total() const {
  return std::accumulate(counts.begin(), counts.end(), std::uint64_t{0});
}

std::uint64_t ConfusionMatrix::false_positives(std::size_t k) const {
  std::uint64_t n = 0;
  for (std::size_t t = 0; t < num_classes; ++t) {
    if (t != k) n += at(t, k);
  }
  return n;
}

std::uint64_t ConfusionMatrix::false_negatives(std::size_t k) const {
  std::uint64_t n = 0;
  for (std::size_t p = 0; p < num_classes; ++p) {
    if (p != k) n += at(k, p);
  }
  return n;
}

std::uint64_t ConfusionMatrix::true_negatives(std::size_t k) const {
  return total() - true_positives(k) - false_positives(k) - false_negatives(k);
}

ConfusionMatrix confusion(std::span<const int> preds, std::span<const int> truths,
                          std::size_t num_classes, std::vector<std::string> class_names) {
  if (preds.size() != truths.size()) {
    throw Error(ErrorCode::LengthMismatch, "confusion: " + std::to_string(preds.size()) +
                                               " predictions vs " + std::to_string(truths.size()) +
                                               " truths");
  }
  if (!class_names.empty() && class_names.size() != num_classes) {
    throw Error(ErrorCode::LengthMismatch, "confusion: class name count differs from K");
  }
  ConfusionMatrix cm;
  cm.num_classes = num_classes;
  cm.class_names = std::move(class_names);
  if (cm.class_names.empty()) {
    for (std::size_t k = 0; k < num_classes; ++k) cm.class_names.push_back(std::to_string(k));
  }
  cm.counts.assign(num_classes * num_classes, 0);
  for (std::size_t i = 0; i < preds.size(); ++i) {
    if (preds[i] < 0 || truths[i] < 0 || static_cast<std::size_t>(preds[i]) >= num_classes ||
        static_cast<std::size_t>(truths[i]) >= num_classes) {
      throw Error(ErrorCode::ClassOutOfRange, "confusion: sample " + std::to_string(i) +
                                                  " has class outside [0, " +
                                                  std::to_string(num_classes) + ")");
    }
    ++cm.counts[static_cast<std::size_t>(truths[i]) * num_classes + static_cast<std::size_t>(preds[i])];
  }
  return cm;
}

double f1_score(double precision, double recall) {
  const double denom = precision + recall;
  return denom == 0.0 ? 0.0 : 2.0 * precision * recall / denom;
}

MetricsReport f1_metrics(const ConfusionMatrix& cm) {
  MetricsReport r;
  const std::size_t k = cm.num_classes;
  r.class_names = cm.class_names;
  r.total = cm.total();
  std::uint64_t correct = 0, fp_total = 0, fn_total = 0;
  for (std::size_t c = 0; c < k; ++c) {
    const std::uint64_t tp = cm.true_positives(c), fp = cm.false_positives(c),
                        fn = cm.false_negatives(c);
    const double precision = tp + fp == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fp);
    const double recall = tp + fn == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fn);
    r.precision.push_back(precision);
    r.recall.push_back(recall);
    r.f1.push_back(f1_score(precision, recall));
    r.support.push_back(tp + fn);
    correct += tp;
    fp_total += fp;
    fn_total += fn;
  }
  if (k > 0) {
    r.macro_f1 = std::accumulate(r.f1.begin(), r.f1.end(), 0.0) / static_cast<double>(k);
  }
  if (r.total > 0) {
    double weighted = 0.0;
    for (std::size_t c = 0; c < k; ++c) weighted += static_cast<double>(r.support[c]) * r.f1[c];
    r.weighted_f1 = weighted / static_cast<double>(r.total);
    r.accuracy = static_cast<double>(correct) / static_cast<double>(r.total);
    const double micro_p = static_cast<double>(correct) / static_cast<double>(correct + fp_total);
    const double micro_r = static_cast<double>(correct) / static_cast<double>(correct + fn_total);
    r.micro_f1 = f1_score(micro_p, micro_r);
  }
  return r;
}

double positive_class_f1(std::span<const int> preds, std::span<const int> truths, LabelScheme scheme) {
  const auto positive = static_cast<std::size_t>(BinaryLabel::Positive);
  if (scheme == LabelScheme::Binary) return f1_metrics(confusion(preds, truths, 2)).f1[positive];
  std::vector<int> p, t;
  p.reserve(preds.size());
  t.reserve(truths.size());
  for (int v : preds) p.push_back(binary_index_of_multiclass(v));
  for (int v : truths) t.push_back(binary_index_of_multiclass(v));
  return f1_metrics(confusion(p, t, 2)).f1[positive];
}

BaselineReport baseline_report(std::span<const FinalResult> train, std::span<const FinalResult> test,
                               LabelScheme scheme) {
  if (train.empty() || test.empty()) {
    throw Error(ErrorCode::InvalidConfig, "baseline_report: train and test must be non-empty");
  }
  const auto train_labels = class_indices(train, scheme);
  const auto test_labels = class_indices(test, scheme);
  const auto preds = majority_predict(train_labels, test_labels.size());
  const auto names = class_names(scheme);

  BaselineReport b;
  b.scheme = scheme;
  b.majority_class = preds.front();
  b.majority_name = names[static_cast<std::size_t>(b.majority_class)];
  b.metrics = f1_metrics(confusion(preds, test_labels, num_classes(scheme), names));
  b.f1 = {b.metrics.macro_f1, b.metrics.weighted_f1, positive_class_f1(preds, test_labels, scheme)};
  return b;
}

double round_to(double value, int places) {
  if (!std::isfinite(value)) return value;
  const double scale = std::pow(10.0, places);
  return std::round(value * scale) / scale;
}

nlohmann::json to_json(const MetricsReport& m) {
  auto rounded = [](const std::vector<double>& v) {
    std::vector<double> out;
    for (double x : v) out.push_back(round_to(x));
    return out;
  };
  return {{"class_names", m.class_names},
          {"precision", rounded(m.precision)},
          {"recall", rounded(m.recall)},
          {"f1", rounded(m.f1)},
          {"support", m.support},
          {"macro_f1", round_to(m.macro_f1)},
          {"weighted_f1", round_to(m.weighted_f1)},
          {"micro_f1", round_to(m.micro_f1)},
          {"accuracy", round_to(m.accuracy)},
          {"total", m.total}};
}

MetricsReport metrics_from_json(const nlohmann::json& j) {
  MetricsReport m;
  m.class_names = j.at("class_names").get<std::vector<std::string>>();
  m.precision = j.at("precision").get<std::vector<double>>();
  m.recall = j.at("recall").get<std::vector<double>>();
  m.f1 = j.at("f1").get<std::vector<double>>();
  m.support = j.at("support").get<std::vector<std::uint64_t>>();
  m.macro_f1 = j.at("macro_f1").get<double>();
  m.weighted_f1 = j.at("weighted_f1").get<double>();
  m.micro_f1 = j.at("micro_f1").get<double>();
  m.accuracy = j.at("accuracy").get<double>();
  m.total = j.at("total").get<std::uint64_t>();
  return m;
}

nlohmann::json to_json(const BaselineReport& b) {
  return {{"scheme", to_string(b.scheme)},
          {"majority_class", b.majority_name},
          {"macro_f1", round_to(b.f1.macro)},
          {"weighted_f1", round_to(b.f1.weighted)},
          {"positive_f1", round_to(b.f1.positive)},
          {"metrics", to_json(b.metrics)}};
}

}  // namespace earlywarn
