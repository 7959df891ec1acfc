#pragma once

#include <memory>
#include <span>
#include <vector>

#include "earlywarn/models.hpp"
#include "earlywarn/numkit/checkpoint.hpp"
#include "earlywarn/numkit/layers.hpp"
#include "earlywarn/rng.hpp"

namespace earlywarn::detail {

// (b, weeks, channels) -> logits (b, K).
template <class T>
class Network {
 public:
  virtual ~Network() = default;
  virtual void init(Rng& rng) = 0;  // Glorot-uniform weights
  virtual numkit::Tensor<T> forward(const numkit::Tensor<T>& x, numkit::Mode mode) = 0;
  virtual void backward(const numkit::Tensor<T>& dlogits) = 0;
  virtual std::vector<numkit::Param<T>*> params() = 0;

  // Trainable parameters followed by any non-trainable state.
  virtual std::vector<numkit::NamedArray> export_arrays();
  virtual void import_arrays(std::span<const numkit::NamedArray> arrays);

 protected:
  static const numkit::NamedArray& lookup(std::span<const numkit::NamedArray> arrays,
                                          const std::string& name);
};

template <class T>
std::unique_ptr<Network<T>> make_network(const ModelSpec& spec, std::size_t weeks,
                                         std::size_t channels, std::size_t classes);

}  // namespace earlywarn::detail
