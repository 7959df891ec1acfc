#include "earlywarn/numkit/grad_check.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "earlywarn/error.hpp"
#include "earlywarn/rng.hpp"

namespace earlywarn::numkit {

GradCheckResult grad_check(const std::function<double()>& objective,
                           std::span<const GradTarget> targets, const GradCheckOptions& options) {
  std::size_t total = 0;
  for (const auto& t : targets) {
    if (t.values.size() != t.analytic.size()) {
      throw Error(ErrorCode::ShapeMismatch, "grad_check: gradient size differs for " + t.name);
    }
    total += t.values.size();
  }

  std::vector<std::size_t> coords(total);
  std::iota(coords.begin(), coords.end(), std::size_t{0});
  if (total > options.max_coordinates) {
    Rng rng(options.seed);
    for (std::size_t i = 0; i < options.max_coordinates; ++i) {
      const std::size_t j = i + static_cast<std::size_t>(rng.below(total - i));
      std::swap(coords[i], coords[j]);
    }
    coords.resize(options.max_coordinates);
    std::sort(coords.begin(), coords.end());
  }

  GradCheckResult result;
  std::size_t block = 0, block_start = 0;
  for (const std::size_t global : coords) {
    while (global >= block_start + targets[block].values.size()) {
      block_start += targets[block].values.size();
      ++block;
    }
    const GradTarget& target = targets[block];
    const std::size_t i = global - block_start;
    const double saved = target.values[i];
    target.values[i] = saved + options.step;
    const double plus = objective();
    target.values[i] = saved - options.step;
    const double minus = objective();
    target.values[i] = saved;

    const double numeric = (plus - minus) / (2.0 * options.step);
    const double analytic = target.analytic[i];
    const double denom =
        std::max({std::abs(analytic), std::abs(numeric), options.denominator_floor});
    const double err = std::abs(analytic - numeric) / denom;
    if (err > result.max_relative_error || std::isnan(err)) {
      result.max_relative_error = std::isnan(err) ? INFINITY : err;
      result.worst_target = target.name;
      result.worst_index = i;
    }
    ++result.coordinates_checked;
  }
  return result;
}

}  // namespace earlywarn::numkit
