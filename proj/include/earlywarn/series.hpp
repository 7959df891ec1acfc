#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "earlywarn/ingest.hpp"

namespace earlywarn {

inline constexpr std::size_t kMaxWeeks = 40;
inline constexpr const char* kBuilderVersion = "earlywarn-series-1";

enum class LabelScheme { Binary, Multiclass };
enum class BinaryLabel : std::uint8_t { Positive, Negative };

const char* to_string(LabelScheme scheme);
LabelScheme parse_label_scheme(std::string_view text);

// Class indices used by every model: binary {Positive=0, Negative=1},
// multiclass {Distinction=0, Pass=1, Fail=2, Withdrawn=3}.
std::size_t num_classes(LabelScheme scheme);
std::vector<std::string> class_names(LabelScheme scheme);
std::vector<int> class_indices(std::span<const FinalResult> outcomes, LabelScheme scheme);
// Collapses a multiclass index onto the binary index space.
int binary_index_of_multiclass(int multiclass_index);

std::vector<BinaryLabel> binarize_labels(std::span<const FinalResult> outcomes);

struct ActivityVocab {
  std::vector<std::string> names;  // sorted, unique

  std::size_t size() const { return names.size(); }
  std::optional<std::size_t> index_of(std::string_view name) const;
  bool operator==(const ActivityVocab&) const = default;
};

struct SampleId {
  std::int32_t student_id = 0;
  std::string presentation_code;
  auto operator<=>(const SampleId&) const = default;
};

// Row-major (sample, week, channel) array of click counts or normalized values.
struct SeriesTensor {
  std::size_t n_samples = 0;
  std::size_t n_weeks = 0;
  std::size_t n_activities = 0;
  std::vector<double> values;
  std::vector<SampleId> sample_ids;

  SeriesTensor() = default;
  SeriesTensor(std::size_t samples, std::size_t weeks, std::size_t activities)
      : n_samples(samples), n_weeks(weeks), n_activities(activities),
        values(samples * weeks * activities, 0.0), sample_ids(samples) {}

  double& at(std::size_t s, std::size_t w, std::size_t c) {
    return values[(s * n_weeks + w) * n_activities + c];
  }
  double at(std::size_t s, std::size_t w, std::size_t c) const {
    return values[(s * n_weeks + w) * n_activities + c];
  }
  std::span<const double> sample(std::size_t s) const {
    return {values.data() + s * n_weeks * n_activities, n_weeks * n_activities};
  }
  bool operator==(const SeriesTensor&) const = default;
};

struct NormalizationStats {
  std::vector<std::string> channels;
  std::vector<double> min;
  std::vector<double> max;
  bool operator==(const NormalizationStats&) const = default;
};

struct LabeledDataset {
  std::string course;
  SeriesTensor tensor;
  std::vector<FinalResult> outcomes;
  std::vector<std::string> cohort;
  ActivityVocab vocab;
  std::optional<NormalizationStats> normalization;

  std::size_t size() const { return tensor.n_samples; }
  // Throws ShapeMismatch when the parallel arrays disagree.
  void validate() const;
  bool operator==(const LabeledDataset&) const = default;
};

struct SplitSpec {
  std::set<std::string> train_presentations{"2013B", "2013J"};
  std::set<std::string> test_presentations{"2014B", "2014J"};

  // Throws InvalidConfig unless both sets are non-empty and disjoint.
  void validate() const;
  bool operator==(const SplitSpec&) const = default;
};

// Week index of a day offset; pre-start activity is folded into week 0.
std::size_t assign_week(std::int32_t day_offset);

struct BuildStats {
  std::int64_t clicks_retained = 0;
  std::int64_t clicks_beyond_horizon = 0;
  std::int64_t clicks_unknown_activity = 0;
  std::vector<std::string> dropped_activity_types;
  std::size_t n_weeks = 0;
};

// ceil(max presentation length / 7) over the split's presentations, capped at 40.
std::size_t default_n_weeks(const OuladTables& tables, std::string_view course,
                            const SplitSpec& split);

// Samples ordered by (presentation, student_id). The channel vocabulary comes
// from the vle items of the training presentations; activity types that only
// occur in test presentations are dropped and listed in `stats`.
LabeledDataset build_tensor(const OuladTables& tables, std::string_view course,
                            const SplitSpec& split, std::optional<std::size_t> n_weeks = {},
                            BuildStats* stats = nullptr);

NormalizationStats fit_minmax(const LabeledDataset& train);
LabeledDataset apply_minmax(LabeledDataset ds, const NormalizationStats& stats);

LabeledDataset truncate_horizon(const LabeledDataset& ds, std::size_t horizon_weeks);

LabeledDataset subset(const LabeledDataset& ds, std::span<const std::size_t> indices);

std::pair<LabeledDataset, LabeledDataset> split_by_cohort(const LabeledDataset& ds,
                                                          const SplitSpec& spec);

struct SyntheticConfig {
  std::size_t n_per_class = 50;
  std::size_t n_weeks = 40;
  std::size_t n_activities = 10;
  LabelScheme scheme = LabelScheme::Binary;
  std::uint64_t seed = 0;
  std::size_t dropout_week = 5;
};

// Archetype generator: Pass holds steady around per-channel base rates,
// Distinction runs at 1.5x base, Fail decays geometrically after a drawn
// dropout week and Withdrawn goes silent after it. Cohorts alternate between
// the default train and test presentations within each class.
LabeledDataset gen_synthetic(const SyntheticConfig& config);

// tensor.bin (little-endian float64, sample-week-channel order) + meta.json.
void save_dataset(const LabeledDataset& ds, const std::filesystem::path& dir);
LabeledDataset load_dataset(const std::filesystem::path& dir);

}  // namespace earlywarn
