#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "earlywarn/numkit/tensor.hpp"

namespace earlywarn::numkit {

struct NamedArray {
  std::string name;
  std::vector<std::size_t> shape;
  std::vector<double> values;

  bool operator==(const NamedArray&) const = default;
};

struct Checkpoint {
  std::vector<NamedArray> arrays;
  Precision precision = Precision::F64;
  std::uint64_t seed = 0;

  const NamedArray& find(const std::string& name) const;
  bool operator==(const Checkpoint&) const = default;
};

inline constexpr const char* kCheckpointFormat = "earlywarn-checkpoint-1";

// params.bin: every array's values concatenated as little-endian float64.
// manifest.json: format, precision, seed and per-array name/shape/offset/count.
void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& dir);
Checkpoint load_checkpoint(const std::filesystem::path& dir);

template <class T>
NamedArray to_named_array(const Param<T>& p) {
  return {p.name, p.shape, std::vector<double>(p.value.begin(), p.value.end())};
}

template <class T>
NamedArray to_named_array(const std::string& name, const std::vector<T>& values) {
  return {name, {values.size()}, std::vector<double>(values.begin(), values.end())};
}

template <class T>
void assign_from(const NamedArray& src, std::vector<T>& dst, const std::vector<std::size_t>& shape) {
  if (src.shape != shape || src.values.size() != dst.size()) {
    throw Error(ErrorCode::ShapeMismatch, "checkpoint array " + src.name + " has shape " +
                                              shape_string(src.shape) + ", expected " +
                                              shape_string(shape));
  }
  for (std::size_t i = 0; i < dst.size(); ++i) dst[i] = static_cast<T>(src.values[i]);
}

}  // namespace earlywarn::numkit
