#include <algorithm>
#include <cmath>
#include <vector>

#include "earlywarn/error.hpp"
#include "earlywarn/models.hpp"
#include "models/distance.hpp"

namespace earlywarn {

namespace detail {

double dtw_rolling(const double* a, std::size_t n, const double* b, std::size_t m,
                   std::vector<double>& scratch) {
  scratch.resize(2 * m);
  double* prev = scratch.data();
  double* cur = scratch.data() + m;
  prev[0] = std::abs(a[0] - b[0]);
  for (std::size_t j = 1; j < m; ++j) prev[j] = prev[j - 1] + std::abs(a[0] - b[j]);
  for (std::size_t i = 1; i < n; ++i) {
    cur[0] = prev[0] + std::abs(a[i] - b[0]);
    for (std::size_t j = 1; j < m; ++j) {
      cur[j] = std::abs(a[i] - b[j]) + std::min({prev[j], cur[j - 1], prev[j - 1]});
    }
    std::swap(prev, cur);
  }
  return prev[m - 1];
}

std::vector<double> channel_major(const SeriesTensor& t) {
  std::vector<double> out(t.values.size());
  const std::size_t w = t.n_weeks, c = t.n_activities;
  for (std::size_t s = 0; s < t.n_samples; ++s) {
    for (std::size_t wi = 0; wi < w; ++wi) {
      for (std::size_t ci = 0; ci < c; ++ci) {
        out[(s * c + ci) * w + wi] = t.values[(s * w + wi) * c + ci];
      }
    }
  }
  return out;
}

}  // namespace detail

double dtw_distance(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw Error(ErrorCode::EmptySeries, "dtw_distance: empty sequence");
  std::vector<double> scratch;
  return detail::dtw_rolling(a.data(), a.size(), b.data(), b.size(), scratch);
}

double dtw_channelwise(const SeriesTensor& a, std::size_t i, const SeriesTensor& b, std::size_t j) {
  if (a.n_activities != b.n_activities) {
    throw Error(ErrorCode::ShapeMismatch, "dtw_channelwise: channel counts differ");
  }
  if (a.n_weeks == 0 || b.n_weeks == 0) throw Error(ErrorCode::EmptySeries, "dtw_channelwise");
  std::vector<double> sa(a.n_weeks), sb(b.n_weeks), scratch;
  double total = 0.0;
  for (std::size_t c = 0; c < a.n_activities; ++c) {
    for (std::size_t w = 0; w < a.n_weeks; ++w) sa[w] = a.at(i, w, c);
    for (std::size_t w = 0; w < b.n_weeks; ++w) sb[w] = b.at(j, w, c);
    total += detail::dtw_rolling(sa.data(), sa.size(), sb.data(), sb.size(), scratch);
  }
  return total;
}

double euclidean_distance(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw Error(ErrorCode::ShapeMismatch, "euclidean_distance");
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    sum += d * d;
  }
  return std::sqrt(sum);
}

}  // namespace earlywarn
