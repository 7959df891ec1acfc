#pragma once

#include <span>
#include <vector>

#include "earlywarn/models.hpp"
#include "earlywarn/rng.hpp"

namespace earlywarn::detail {

struct StratifiedSplit {
  std::vector<std::size_t> fit;
  std::vector<std::size_t> validation;
};

// Per class, a shuffled round(fraction * n_c) samples go to validation, kept
// within [1, n_c - 1] whenever the class has at least two members.
StratifiedSplit stratified_split(std::span<const int> labels, double fraction, Rng& rng);

// Mini-batches over a shuffled index order; a trailing batch of one sample is
// merged into its predecessor so batch norm always sees >= 2 samples.
std::vector<std::vector<std::size_t>> make_batches(const std::vector<std::size_t>& order,
                                                   std::size_t batch_size);

ModelState train_network(const LabeledDataset& train, const ModelSpec& spec, const TrainConfig& tc,
                         LabelScheme scheme);
std::vector<int> predict_network(const ModelState& state, const LabeledDataset& ds);

}  // namespace earlywarn::detail
