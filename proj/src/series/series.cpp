#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "earlywarn/error.hpp"
#include "earlywarn/series.hpp"

namespace earlywarn {

const char* to_string(LabelScheme scheme) {
  return scheme == LabelScheme::Binary ? "binary" : "multiclass";
}

LabelScheme parse_label_scheme(std::string_view text) {
  if (text == "binary") return LabelScheme::Binary;
  if (text == "multiclass") return LabelScheme::Multiclass;
  throw Error(ErrorCode::InvalidConfig, "unknown label scheme '" + std::string(text) + "'");
}

std::size_t num_classes(LabelScheme scheme) { return scheme == LabelScheme::Binary ? 2 : 4; }

std::vector<std::string> class_names(LabelScheme scheme) {
  if (scheme == LabelScheme::Binary) return {"Positive", "Negative"};
  return {"Distinction", "Pass", "Fail", "Withdrawn"};
}

std::vector<BinaryLabel> binarize_labels(std::span<const FinalResult> outcomes) {
  std::vector<BinaryLabel> out;
  out.reserve(outcomes.size());
  for (auto r : outcomes) {
    const bool positive = r == FinalResult::Pass || r == FinalResult::Distinction;
    out.push_back(positive ? BinaryLabel::Positive : BinaryLabel::Negative);
  }
  return out;
}

std::vector<int> class_indices(std::span<const FinalResult> outcomes, LabelScheme scheme) {
  std::vector<int> out;
  out.reserve(outcomes.size());
  if (scheme == LabelScheme::Binary) {
    for (auto b : binarize_labels(outcomes)) out.push_back(static_cast<int>(b));
  } else {
    for (auto r : outcomes) out.push_back(static_cast<int>(r));
  }
  return out;
}

int binary_index_of_multiclass(int multiclass_index) {
  return multiclass_index <= static_cast<int>(FinalResult::Pass)
             ? static_cast<int>(BinaryLabel::Positive)
             : static_cast<int>(BinaryLabel::Negative);
}

std::optional<std::size_t> ActivityVocab::index_of(std::string_view name) const {
  const auto it = std::lower_bound(names.begin(), names.end(), name);
  if (it == names.end() || *it != name) return std::nullopt;
  return static_cast<std::size_t>(it - names.begin());
}

void LabeledDataset::validate() const {
  const std::size_t n = tensor.n_samples;
  if (tensor.values.size() != n * tensor.n_weeks * tensor.n_activities ||
      tensor.sample_ids.size() != n || outcomes.size() != n || cohort.size() != n ||
      vocab.size() != tensor.n_activities) {
    throw Error(ErrorCode::ShapeMismatch, "dataset arrays disagree with tensor shape");
  }
}

void SplitSpec::validate() const {
  if (train_presentations.empty() || test_presentations.empty()) {
    throw Error(ErrorCode::InvalidConfig, "train and test presentation sets must be non-empty");
  }
  for (const auto& p : train_presentations) {
    if (test_presentations.contains(p)) {
      throw Error(ErrorCode::InvalidConfig, "presentation " + p + " is in both train and test");
    }
  }
}

std::size_t assign_week(std::int32_t day_offset) {
  return day_offset < 0 ? 0 : static_cast<std::size_t>(day_offset / 7);
}

std::size_t default_n_weeks(const OuladTables& tables, std::string_view course,
                            const SplitSpec& split) {
  std::int32_t longest = 0;
  for (const auto& [offering, days] : tables.course_lengths) {
    if (offering.course_code != course) continue;
    if (split.train_presentations.contains(offering.presentation_code) ||
        split.test_presentations.contains(offering.presentation_code)) {
      longest = std::max(longest, days);
    }
  }
  if (longest <= 0) return kMaxWeeks;
  return std::min<std::size_t>(kMaxWeeks, static_cast<std::size_t>((longest + 6) / 7));
}

LabeledDataset build_tensor(const OuladTables& tables, std::string_view course,
                            const SplitSpec& split, std::optional<std::size_t> n_weeks,
                            BuildStats* stats) {
  split.validate();
  const std::size_t weeks = n_weeks.value_or(default_n_weeks(tables, course, split));
  if (weeks == 0) throw Error(ErrorCode::InvalidHorizon, "n_weeks must be positive");

  LabeledDataset ds;
  ds.course = std::string(course);

  std::set<std::string> vocab_set;
  for (const auto& item : tables.items) {
    if (item.course_code == course && split.train_presentations.contains(item.presentation_code)) {
      vocab_set.insert(item.activity_type);
    }
  }
  ds.vocab.names.assign(vocab_set.begin(), vocab_set.end());

  std::vector<int> channel_of(tables.activity_types.size(), -1);
  for (std::size_t a = 0; a < tables.activity_types.size(); ++a) {
    if (auto idx = ds.vocab.index_of(tables.activity_types[a])) channel_of[a] = static_cast<int>(*idx);
  }

  // Sample index per (offering, student).
  std::vector<std::unordered_map<std::int32_t, std::size_t>> sample_of(tables.offerings.size());
  std::set<std::string> presentations = split.train_presentations;
  presentations.insert(split.test_presentations.begin(), split.test_presentations.end());
  std::vector<StudentRecord> learners;
  for (const auto& pres : presentations) {
    const auto off = tables.find_offering(course, pres);
    if (!off) continue;
    for (auto& s : filter_participants(tables, course, pres)) {
      sample_of[*off].emplace(s.student_id, learners.size());
      learners.push_back(std::move(s));
    }
  }
  if (learners.empty()) {
    throw Error(ErrorCode::EmptyCourse, "no participants for course " + std::string(course));
  }

  ds.tensor = SeriesTensor(learners.size(), weeks, ds.vocab.size());
  for (std::size_t i = 0; i < learners.size(); ++i) {
    ds.tensor.sample_ids[i] = {learners[i].student_id, learners[i].presentation_code};
    ds.outcomes.push_back(learners[i].final_result);
    ds.cohort.push_back(learners[i].presentation_code);
  }

  BuildStats local;
  std::set<std::string> dropped_types;
  for (const auto& row : tables.interactions) {
    const auto& index = sample_of[row.offering];
    if (index.empty()) continue;
    const auto it = index.find(row.student_id);
    if (it == index.end()) continue;
    const int channel = channel_of[row.activity];
    if (channel < 0) {
      local.clicks_unknown_activity += row.click_count;
      dropped_types.insert(tables.activity_types[row.activity]);
      continue;
    }
    const std::size_t week = assign_week(row.day_offset);
    if (week >= weeks) {
      local.clicks_beyond_horizon += row.click_count;
      continue;
    }
    ds.tensor.at(it->second, week, static_cast<std::size_t>(channel)) += row.click_count;
    local.clicks_retained += row.click_count;
  }
  local.dropped_activity_types.assign(dropped_types.begin(), dropped_types.end());
  local.n_weeks = weeks;
  if (stats) *stats = std::move(local);
  return ds;
}

NormalizationStats fit_minmax(const LabeledDataset& train) {
  train.validate();
  const auto& t = train.tensor;
  if (t.n_samples == 0 || t.n_weeks == 0) {
    throw Error(ErrorCode::ShapeMismatch, "cannot fit normalization on an empty dataset");
  }
  NormalizationStats stats;
  stats.channels = train.vocab.names;
  stats.min.assign(t.n_activities, INFINITY);
  stats.max.assign(t.n_activities, -INFINITY);
  for (std::size_t i = 0; i < t.values.size(); ++i) {
    const std::size_t c = i % t.n_activities;
    stats.min[c] = std::min(stats.min[c], t.values[i]);
    stats.max[c] = std::max(stats.max[c], t.values[i]);
  }
  return stats;
}

LabeledDataset apply_minmax(LabeledDataset ds, const NormalizationStats& stats) {
  ds.validate();
  if (ds.vocab.names != stats.channels || stats.min.size() != ds.tensor.n_activities ||
      stats.max.size() != ds.tensor.n_activities) {
    throw Error(ErrorCode::ShapeMismatch, "normalization channels differ from dataset vocabulary");
  }
  if (ds.normalization) {
    throw Error(ErrorCode::InvalidConfig, "dataset is already normalized");
  }
  auto& values = ds.tensor.values;
  const std::size_t channels = ds.tensor.n_activities;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const std::size_t c = i % channels;
    const double range = stats.max[c] - stats.min[c];
    if (range <= 0.0) {
      values[i] = 0.0;
      continue;
    }
    values[i] = std::clamp((values[i] - stats.min[c]) / range, 0.0, 1.0);
  }
  ds.normalization = stats;
  return ds;
}

LabeledDataset truncate_horizon(const LabeledDataset& ds, std::size_t horizon_weeks) {
  if (horizon_weeks == 0) throw Error(ErrorCode::InvalidHorizon, "horizon must be >= 1 week");
  ds.validate();
  const auto& src = ds.tensor;
  const std::size_t weeks = std::min(horizon_weeks, src.n_weeks);
  if (weeks == src.n_weeks) return ds;

  LabeledDataset out;
  out.course = ds.course;
  out.outcomes = ds.outcomes;
  out.cohort = ds.cohort;
  out.vocab = ds.vocab;
  out.normalization = ds.normalization;
  out.tensor = SeriesTensor(src.n_samples, weeks, src.n_activities);
  out.tensor.sample_ids = src.sample_ids;
  const std::size_t row = weeks * src.n_activities;
  for (std::size_t s = 0; s < src.n_samples; ++s) {
    const auto from = src.values.begin() + static_cast<std::ptrdiff_t>(s * src.n_weeks * src.n_activities);
    std::copy(from, from + static_cast<std::ptrdiff_t>(row),
              out.tensor.values.begin() + static_cast<std::ptrdiff_t>(s * row));
  }
  return out;
}

LabeledDataset subset(const LabeledDataset& ds, std::span<const std::size_t> indices) {
  const auto& src = ds.tensor;
  LabeledDataset out;
  out.course = ds.course;
  out.vocab = ds.vocab;
  out.normalization = ds.normalization;
  out.tensor = SeriesTensor(indices.size(), src.n_weeks, src.n_activities);
  const std::size_t stride = src.n_weeks * src.n_activities;
  for (std::size_t i = 0; i < indices.size(); ++i) {
    const std::size_t s = indices[i];
    if (s >= src.n_samples) throw Error(ErrorCode::ShapeMismatch, "subset index out of range");
    std::copy_n(src.values.begin() + static_cast<std::ptrdiff_t>(s * stride), stride,
                out.tensor.values.begin() + static_cast<std::ptrdiff_t>(i * stride));
    out.tensor.sample_ids[i] = src.sample_ids[s];
    out.outcomes.push_back(ds.outcomes[s]);
    out.cohort.push_back(ds.cohort[s]);
  }
  return out;
}

std::pair<LabeledDataset, LabeledDataset> split_by_cohort(const LabeledDataset& ds,
                                                          const SplitSpec& spec) {
  spec.validate();
  ds.validate();
  std::vector<std::size_t> train, test;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    if (spec.train_presentations.contains(ds.cohort[i])) {
      train.push_back(i);
    } else if (spec.test_presentations.contains(ds.cohort[i])) {
      test.push_back(i);
    } else {
      throw Error(ErrorCode::UnassignedCohort,
                  "sample " + std::to_string(i) + " has cohort " + ds.cohort[i]);
    }
  }
  return {subset(ds, train), subset(ds, test)};
}

}  // namespace earlywarn
