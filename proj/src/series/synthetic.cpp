#include <array>
#include <cmath>
#include <cstdio>

#include "earlywarn/error.hpp"
#include "earlywarn/rng.hpp"
#include "earlywarn/series.hpp"

namespace earlywarn {

namespace {

constexpr double kFailDecay = 0.75;
constexpr double kDistinctionBoost = 1.5;
constexpr std::array<const char*, 4> kCohortCycle = {"2013B", "2014B", "2013J", "2014J"};

FinalResult archetype_for(LabelScheme scheme, std::size_t class_index, std::size_t j) {
  if (scheme == LabelScheme::Multiclass) return static_cast<FinalResult>(class_index);
  if (class_index == static_cast<std::size_t>(BinaryLabel::Positive)) {
    return j % 4 == 3 ? FinalResult::Distinction : FinalResult::Pass;
  }
  return j % 2 == 1 ? FinalResult::Withdrawn : FinalResult::Fail;
}

double activity_factor(FinalResult archetype, std::size_t week, std::size_t dropout) {
  switch (archetype) {
    case FinalResult::Pass: return 1.0;
    case FinalResult::Distinction: return kDistinctionBoost;
    case FinalResult::Fail:
      return week < dropout ? 1.0 : std::pow(kFailDecay, static_cast<double>(week - dropout + 1));
    case FinalResult::Withdrawn: return week < dropout ? 1.0 : 0.0;
  }
  return 1.0;
}

}  // namespace

LabeledDataset gen_synthetic(const SyntheticConfig& config) {
  if (config.n_per_class < 1 || config.n_weeks < 1 || config.n_activities < 1) {
    throw Error(ErrorCode::InvalidConfig, "synthetic sizes must be >= 1");
  }
  Rng rng(config.seed);
  const std::size_t classes = num_classes(config.scheme);
  const std::size_t n = classes * config.n_per_class;

  LabeledDataset ds;
  ds.course = "SYN";
  for (std::size_t c = 0; c < config.n_activities; ++c) {
    char name[32];
    std::snprintf(name, sizeof name, "activity_%02zu", c);
    ds.vocab.names.emplace_back(name);
  }
  std::vector<double> base_rate(config.n_activities);
  for (auto& r : base_rate) r = rng.uniform(1.0, 8.0);

  ds.tensor = SeriesTensor(n, config.n_weeks, config.n_activities);
  std::size_t s = 0;
  for (std::size_t j = 0; j < config.n_per_class; ++j) {
    for (std::size_t k = 0; k < classes; ++k, ++s) {
      const FinalResult archetype = archetype_for(config.scheme, k, j);
      const std::string cohort = kCohortCycle[j % kCohortCycle.size()];
      ds.outcomes.push_back(archetype);
      ds.cohort.push_back(cohort);
      ds.tensor.sample_ids[s] = {static_cast<std::int32_t>(s + 1), cohort};

      const double engagement = rng.uniform(0.6, 1.4);
      const std::int64_t drawn = static_cast<std::int64_t>(config.dropout_week) + rng.between(-2, 2);
      const std::size_t dropout = static_cast<std::size_t>(std::max<std::int64_t>(1, drawn));
      for (std::size_t w = 0; w < config.n_weeks; ++w) {
        const double factor = activity_factor(archetype, w, dropout);
        for (std::size_t c = 0; c < config.n_activities; ++c) {
          ds.tensor.at(s, w, c) = static_cast<double>(rng.poisson(base_rate[c] * engagement * factor));
        }
      }
    }
  }
  return ds;
}

}  // namespace earlywarn
