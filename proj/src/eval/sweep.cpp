#include <atomic>
#include <charconv>
#include <chrono>
#include <limits>
#include <thread>

#include "earlywarn/error.hpp"
#include "earlywarn/sweep.hpp"

namespace earlywarn {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

std::size_t parse_count(std::string_view text, std::string_view whole) {
  text = trim(text);
  std::size_t v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (text.empty() || ec != std::errc{} || ptr != text.data() + text.size()) {
    throw Error(ErrorCode::InvalidHorizon, "cannot parse horizons '" + std::string(whole) + "'");
  }
  return v;
}

void check_horizons(const std::vector<std::size_t>& h) {
  if (h.empty()) throw Error(ErrorCode::InvalidHorizon, "horizon list is empty");
  for (std::size_t i = 0; i < h.size(); ++i) {
    if (h[i] == 0) throw Error(ErrorCode::InvalidHorizon, "horizon 0 is not allowed");
    if (i > 0 && h[i] <= h[i - 1]) {
      throw Error(ErrorCode::InvalidHorizon, "horizons must be strictly ascending");
    }
  }
}

SweepRow failed_row(SweepRow row, const std::string& message) {
  constexpr double nan = std::numeric_limits<double>::quiet_NaN();
  row.status = "failed";
  row.error = message;
  row.metrics = MetricsReport{};
  row.metrics.macro_f1 = row.metrics.weighted_f1 = row.metrics.micro_f1 = row.metrics.accuracy = nan;
  row.positive_f1 = nan;
  return row;
}

}  // namespace

std::vector<std::size_t> default_horizons() { return {5, 10, 15, 20, 25, 30, 35, 40}; }

std::vector<std::size_t> parse_horizons(std::string_view text) {
  std::vector<std::size_t> out;
  if (text.find(':') != std::string_view::npos) {
    std::vector<std::size_t> parts;
    std::string_view rest = text;
    while (true) {
      const auto pos = rest.find(':');
      parts.push_back(parse_count(rest.substr(0, pos), text));
      if (pos == std::string_view::npos) break;
      rest.remove_prefix(pos + 1);
    }
    if (parts.size() != 3 || parts[2] == 0 || parts[0] > parts[1]) {
      throw Error(ErrorCode::InvalidHorizon, "expected start:end:step with step >= 1, got '" +
                                                 std::string(text) + "'");
    }
    for (std::size_t h = parts[0]; h <= parts[1]; h += parts[2]) out.push_back(h);
  } else {
    std::string_view rest = text;
    while (true) {
      const auto pos = rest.find(',');
      out.push_back(parse_count(rest.substr(0, pos), text));
      if (pos == std::string_view::npos) break;
      rest.remove_prefix(pos + 1);
    }
  }
  check_horizons(out);
  return out;
}

void SweepConfig::validate() const {
  if (models.empty()) throw Error(ErrorCode::InvalidConfig, "sweep needs at least one model");
  if (schemes.empty()) throw Error(ErrorCode::InvalidConfig, "sweep needs at least one label scheme");
  if (workers == 0) throw Error(ErrorCode::InvalidConfig, "workers must be >= 1");
  check_horizons(horizons);
  split.validate();
  train.validate();
}

std::string model_description(const ModelSpec& spec) {
  switch (spec.kind) {
    case ModelKind::Fcn: return "FCN (conv-BN-ReLU blocks, global average pooling)";
    case ModelKind::Lstm: return "DOPP-style LSTM (hidden " + std::to_string(spec.lstm.hidden_size) + ")";
    case ModelKind::Mlp: return "MLP on flattened weeks x channels";
    case ModelKind::Knn:
      return "KNN k=" + std::to_string(spec.knn.k) +
             (spec.knn.distance == Distance::Dtw ? " (channel-wise DTW)" : " (Euclidean)");
    case ModelKind::Majority: return "majority class";
  }
  return {};
}

SweepRow run_sweep_job(const LabeledDataset& ds, const ModelSpec& model, LabelScheme scheme,
                       std::size_t horizon, const SweepConfig& cfg) {
  SweepRow row;
  row.model = model.name();
  row.description = model_description(model);
  row.scheme = scheme;
  row.horizon = horizon;
  row.course = ds.course;
  row.seed = cfg.train.seed;
  const auto start = std::chrono::steady_clock::now();
  try {
    auto [train, test] = split_by_cohort(truncate_horizon(ds, horizon), cfg.split);
    if (!train.normalization) {
      const NormalizationStats stats = fit_minmax(train);
      train = apply_minmax(std::move(train), stats);
      test = apply_minmax(std::move(test), stats);
    }
    if (test.size() == 0) throw Error(ErrorCode::EmptyCourse, "no test samples");
    const ModelState state = train_model(train, model, cfg.train, scheme);
    const auto preds = predict(state, test);
    const auto truths = class_indices(test.outcomes, scheme);
    row.metrics = f1_metrics(confusion(preds, truths, num_classes(scheme), class_names(scheme)));
    row.positive_f1 = positive_class_f1(preds, truths, scheme);
  } catch (const std::exception& e) {
    row = failed_row(std::move(row), e.what());
  }
  if (cfg.record_wall_time) {
    row.wall_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }
  return row;
}

HorizonSweepResult horizon_sweep(const std::map<std::string, LabeledDataset>& datasets,
                                 const SweepConfig& cfg) {
  cfg.validate();
  struct Job {
    const std::string* course;
    const LabeledDataset* ds;
    const ModelSpec* model;
    LabelScheme scheme;
    std::size_t horizon;
  };
  std::vector<Job> jobs;
  for (const auto& [course, ds] : datasets) {
    for (const auto& model : cfg.models) {
      for (auto scheme : cfg.schemes) {
        for (auto h : cfg.horizons) jobs.push_back({&course, &ds, &model, scheme, h});
      }
    }
  }

  HorizonSweepResult result;
  result.rows.resize(jobs.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < jobs.size(); i = next++) {
      const Job& j = jobs[i];
      result.rows[i] = run_sweep_job(*j.ds, *j.model, j.scheme, j.horizon, cfg);
      result.rows[i].course = *j.course;
    }
  };
  const std::size_t n_threads = std::min(cfg.workers, jobs.size());
  if (n_threads <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < n_threads; ++t) pool.emplace_back(work);
  }
  return result;
}

}  // namespace earlywarn
