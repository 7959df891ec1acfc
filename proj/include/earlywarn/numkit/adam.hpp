#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "earlywarn/numkit/tensor.hpp"

namespace earlywarn::numkit {

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

template <class T>
struct AdamState {
  AdamConfig config;
  std::vector<std::vector<T>> first_moment;
  std::vector<std::vector<T>> second_moment;
  std::int64_t step_count = 0;
};

// One bias-corrected Adam update over `params` (moments sized on first use):
//   m = b1 m + (1 - b1) g,  v = b2 v + (1 - b2) g^2
//   p -= lr * (m / (1 - b1^t)) / (sqrt(v / (1 - b2^t)) + eps)
template <class T>
void adam_step(std::span<Param<T>* const> params, AdamState<T>& state);

}  // namespace earlywarn::numkit
