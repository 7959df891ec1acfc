#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "earlywarn/series.hpp"

namespace earlywarn {

// K x K counts, rows = true class, columns = predicted class.
struct ConfusionMatrix {
  std::size_t num_classes = 0;
  std::vector<std::string> class_names;
  std::vector<std::uint64_t> counts;

  std::uint64_t at(std::size_t truth, std::size_t pred) const {
    return counts[truth * num_classes + pred];
  }
  std::uint64_t total() const;
  std::uint64_t true_positives(std::size_t k) const { return at(k, k); }
  std::uint64_t false_positives(std::size_t k) const;  // column k off-diagonal
  std::uint64_t false_negatives(std::size_t k) const;  // row k off-diagonal
  std::uint64_t true_negatives(std::size_t k) const;
  bool operator==(const ConfusionMatrix&) const = default;
};

// Throws LengthMismatch / ClassOutOfRange.
ConfusionMatrix confusion(std::span<const int> preds, std::span<const int> truths,
                          std::size_t num_classes, std::vector<std::string> class_names = {});

struct MetricsReport {
  std::vector<std::string> class_names;
  std::vector<double> precision;
  std::vector<double> recall;
  std::vector<double> f1;
  std::vector<std::uint64_t> support;
  double macro_f1 = 0.0;
  double weighted_f1 = 0.0;
  double micro_f1 = 0.0;
  double accuracy = 0.0;
  std::uint64_t total = 0;

  bool operator==(const MetricsReport&) const = default;
};

// 2PR / (P + R), defined as 0 when P + R = 0.
double f1_score(double precision, double recall);

// Per-class one-vs-rest precision = TP / (TP + FP), recall = TP / (TP + FN),
// each 0 when its denominator is 0; macro = unweighted mean of F1,
// weighted = support-weighted mean.
MetricsReport f1_metrics(const ConfusionMatrix& cm);

// F1 of the Positive (Pass or Distinction) class; multiclass predictions and
// truths are collapsed to the binary scheme first.
double positive_class_f1(std::span<const int> preds, std::span<const int> truths, LabelScheme scheme);

struct F1Conventions {
  double macro = 0.0;
  double weighted = 0.0;
  double positive = 0.0;
};

struct BaselineReport {
  LabelScheme scheme = LabelScheme::Binary;
  int majority_class = 0;
  std::string majority_name;
  MetricsReport metrics;
  F1Conventions f1;
};

// Majority-class predictor fit on `train`, scored on `test` under every
// averaging convention.
BaselineReport baseline_report(std::span<const FinalResult> train, std::span<const FinalResult> test,
                               LabelScheme scheme);

nlohmann::json to_json(const MetricsReport& m);
MetricsReport metrics_from_json(const nlohmann::json& j);
nlohmann::json to_json(const BaselineReport& b);

// Rounds to `places` decimals (reports store six).
double round_to(double value, int places = 6);

}  // namespace earlywarn
