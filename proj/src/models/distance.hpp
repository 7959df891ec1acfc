#pragma once

#include <vector>

#include "earlywarn/series.hpp"

namespace earlywarn::detail {

// DTW over raw buffers with a caller-owned two-row scratch; n, m >= 1.
double dtw_rolling(const double* a, std::size_t n, const double* b, std::size_t m,
                   std::vector<double>& scratch);

// (sample, channel, week) copy of a (sample, week, channel) tensor.
std::vector<double> channel_major(const SeriesTensor& t);

}  // namespace earlywarn::detail
