#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace earlywarn::numkit {

// One block of coordinates to perturb: the live values the objective reads
// and the analytic gradient computed at the unperturbed point.
struct GradTarget {
  std::string name;
  std::span<double> values;
  std::span<const double> analytic;
};

struct GradCheckOptions {
  double step = 1e-5;
  std::size_t max_coordinates = 10000;  // above this, a seeded random subset
  std::uint64_t seed = 0;
  double denominator_floor = 1e-8;
};

struct GradCheckResult {
  double max_relative_error = 0.0;
  std::string worst_target;
  std::size_t worst_index = 0;
  std::size_t coordinates_checked = 0;
};

// Central differences (f(x+h) - f(x-h)) / 2h per coordinate against the
// analytic gradient; relative error |a - n| / max(|a|, |n|, floor).
// `objective` must be deterministic (no running-stat side effects that feed
// back into the value).
GradCheckResult grad_check(const std::function<double()>& objective,
                           std::span<const GradTarget> targets,
                           const GradCheckOptions& options = {});

}  // namespace earlywarn::numkit
