#include <algorithm>
#include <map>
#include <numeric>

#include "earlywarn/error.hpp"
#include "earlywarn/models.hpp"
#include "models/distance.hpp"

namespace earlywarn {

std::vector<int> knn_predict(const SeriesTensor& train, std::span<const int> train_labels,
                             const SeriesTensor& query, const KnnConfig& cfg) {
  if (train.n_samples == 0) throw Error(ErrorCode::InvalidConfig, "knn: empty training set");
  if (train_labels.size() != train.n_samples) {
    throw Error(ErrorCode::LengthMismatch, "knn: label count differs from training samples");
  }
  if (train.n_weeks != query.n_weeks || train.n_activities != query.n_activities) {
    throw Error(ErrorCode::ShapeMismatch, "knn: query shape (" + std::to_string(query.n_weeks) +
                                              ", " + std::to_string(query.n_activities) +
                                              ") differs from training shape (" +
                                              std::to_string(train.n_weeks) + ", " +
                                              std::to_string(train.n_activities) + ")");
  }
  if (cfg.k < 1 || cfg.k > train.n_samples) {
    throw Error(ErrorCode::InvalidConfig, "knn: k must be in [1, training size]");
  }
  const int classes = *std::max_element(train_labels.begin(), train_labels.end()) + 1;
  const std::size_t weeks = train.n_weeks, channels = train.n_activities;

  std::vector<double> train_cm, query_cm;
  if (cfg.distance == Distance::Dtw) {
    train_cm = detail::channel_major(train);
    query_cm = detail::channel_major(query);
  }

  std::vector<int> out(query.n_samples);
  std::vector<double> dist(train.n_samples);
  std::vector<std::size_t> order(train.n_samples);
  std::vector<double> scratch;
  std::vector<std::size_t> votes(static_cast<std::size_t>(classes));
  std::vector<double> vote_distance(static_cast<std::size_t>(classes));

  for (std::size_t q = 0; q < query.n_samples; ++q) {
    for (std::size_t s = 0; s < train.n_samples; ++s) {
      if (cfg.distance == Distance::Euclidean) {
        dist[s] = euclidean_distance(query.sample(q), train.sample(s));
      } else {
        double total = 0.0;
        for (std::size_t c = 0; c < channels; ++c) {
          total += detail::dtw_rolling(query_cm.data() + (q * channels + c) * weeks, weeks,
                                       train_cm.data() + (s * channels + c) * weeks, weeks, scratch);
        }
        dist[s] = total;
      }
    }
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(cfg.k), order.end(),
                      [&](std::size_t a, std::size_t b) {
                        return dist[a] < dist[b] || (dist[a] == dist[b] && a < b);
                      });
    std::fill(votes.begin(), votes.end(), 0);
    std::fill(vote_distance.begin(), vote_distance.end(), 0.0);
    for (std::size_t n = 0; n < cfg.k; ++n) {
      const auto label = static_cast<std::size_t>(train_labels[order[n]]);
      ++votes[label];
      vote_distance[label] += dist[order[n]];
    }
    int best = -1;
    for (int c = 0; c < classes; ++c) {
      const auto ci = static_cast<std::size_t>(c);
      if (votes[ci] == 0) continue;
      if (best < 0) {
        best = c;
        continue;
      }
      const auto bi = static_cast<std::size_t>(best);
      if (votes[ci] > votes[bi] || (votes[ci] == votes[bi] && vote_distance[ci] < vote_distance[bi])) {
        best = c;
      }
    }
    out[q] = best;
  }
  return out;
}

std::vector<int> majority_predict(std::span<const int> train_labels, std::size_t query_size) {
  if (train_labels.empty()) throw Error(ErrorCode::InvalidConfig, "majority: empty training labels");
  std::map<int, std::size_t> counts;
  for (int y : train_labels) ++counts[y];
  int best = counts.begin()->first;
  std::size_t best_count = 0;
  for (const auto& [label, n] : counts) {
    if (n > best_count) {
      best = label;
      best_count = n;
    }
  }
  return std::vector<int>(query_size, best);
}

}  // namespace earlywarn
