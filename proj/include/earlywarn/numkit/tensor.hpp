#pragma once

#include <algorithm>
#include <cstddef>
#include <functional>
#include <numeric>
#include <string>
#include <string_view>
#include <vector>

#include "earlywarn/error.hpp"

namespace earlywarn::numkit {

enum class Precision { F32, F64 };

const char* to_string(Precision p);
Precision parse_precision(std::string_view text);

inline std::size_t element_count(const std::vector<std::size_t>& shape) {
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1}, std::multiplies<>());
}

std::string shape_string(const std::vector<std::size_t>& shape);

// Dense row-major array: (batch, time, channels) or (batch, features).
template <class T>
struct Tensor {
  std::vector<std::size_t> shape;
  std::vector<T> data;

  Tensor() = default;
  explicit Tensor(std::vector<std::size_t> dims, T fill = T(0))
      : shape(std::move(dims)), data(element_count(shape), fill) {}
  Tensor(std::vector<std::size_t> dims, std::vector<T> values)
      : shape(std::move(dims)), data(std::move(values)) {
    if (data.size() != element_count(shape)) {
      throw Error(ErrorCode::ShapeMismatch, "storage does not match shape " + shape_string(shape));
    }
  }

  std::size_t rank() const { return shape.size(); }
  std::size_t dim(std::size_t axis) const { return shape.at(axis); }
  std::size_t size() const { return data.size(); }
};

// Trainable array with a gradient buffer of the same shape.
template <class T>
struct Param {
  std::string name;
  std::vector<std::size_t> shape;
  std::vector<T> value;
  std::vector<T> grad;

  Param() = default;
  Param(std::string n, std::vector<std::size_t> dims)
      : name(std::move(n)), shape(std::move(dims)),
        value(element_count(shape), T(0)), grad(element_count(shape), T(0)) {}

  std::size_t size() const { return value.size(); }
  void zero_grad() { std::fill(grad.begin(), grad.end(), T(0)); }
};

template <class T>
void expect_rank(const Tensor<T>& t, std::size_t rank, const char* who) {
  if (t.rank() != rank) {
    throw Error(ErrorCode::ShapeMismatch, std::string(who) + ": expected rank " +
                                              std::to_string(rank) + ", got " + shape_string(t.shape));
  }
}

}  // namespace earlywarn::numkit
