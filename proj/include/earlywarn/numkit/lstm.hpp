#pragma once

#include <string>
#include <vector>

#include "earlywarn/numkit/tensor.hpp"
#include "earlywarn/rng.hpp"

namespace earlywarn::numkit {

// Single-layer LSTM consuming (b, t, c_in) one step at a time and returning
// the final hidden state (b, H). Gate blocks along the 4H axis are ordered
// input, forget, cell candidate, output:
//   z = x_t W + h_{t-1} U + bias
//   i = sigmoid(z_i), f = sigmoid(z_f), g = tanh(z_g), o = sigmoid(z_o)
//   c_t = f * c_{t-1} + i * g,   h_t = o * tanh(c_t)
template <class T>
class Lstm {
 public:
  Lstm(const std::string& name, std::size_t input_size, std::size_t hidden_size);

  // Glorot-uniform weights, zero bias except forget gate bias = 1.
  void init(Rng& rng);

  Tensor<T> forward(const Tensor<T>& x);
  // Backpropagation through time from the gradient on the final hidden state.
  // Returns the gradient on x; accumulates parameter gradients.
  Tensor<T> backward(const Tensor<T>& upstream);

  std::vector<Param<T>*> params() { return {&input_weights, &recurrent_weights, &bias}; }
  std::size_t hidden_size() const { return hidden_; }

  Param<T> input_weights;      // (c_in, 4H)
  Param<T> recurrent_weights;  // (H, 4H)
  Param<T> bias;               // (4H)

 private:
  std::size_t input_size_;
  std::size_t hidden_;
  Tensor<T> input_;
  // Per-step caches, each (b, 4H) for gates and (b, H) for states.
  std::vector<std::vector<T>> gates_;
  std::vector<std::vector<T>> cells_;
  std::vector<std::vector<T>> hidden_states_;
};

}  // namespace earlywarn::numkit
