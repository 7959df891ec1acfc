#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "earlywarn/numkit/tensor.hpp"
#include "earlywarn/rng.hpp"

namespace earlywarn::numkit {

enum class Mode { Train, Eval };

// ---------------------------------------------------------------------------
// 1-D convolution, stride 1, zero "same" padding.
//
// x (b, t, c_in), kernel (k, c_in, c_out), bias (c_out) -> (b, t, c_out) with
//   y[b, t, o] = bias[o] + sum_{j, i} kernel[j, i, o] * x[b, t + k/2 - j, i]
// (true convolution: taps run backwards in time; out-of-range steps read 0).
// ---------------------------------------------------------------------------
template <class T>
Tensor<T> conv1d_forward(const Tensor<T>& x, const Param<T>& kernel, const Param<T>& bias);

// Returns the gradient with respect to x and accumulates kernel.grad / bias.grad.
template <class T>
Tensor<T> conv1d_backward(const Tensor<T>& x, Param<T>& kernel, Param<T>& bias,
                          const Tensor<T>& upstream);

template <class T>
class Conv1d {
 public:
  Conv1d(const std::string& name, std::size_t in_channels, std::size_t out_channels,
         std::size_t kernel_size);

  void init(Rng& rng);  // Glorot-uniform kernel, zero bias
  Tensor<T> forward(const Tensor<T>& x);
  Tensor<T> backward(const Tensor<T>& upstream);
  std::vector<Param<T>*> params() { return {&kernel, &bias}; }

  Param<T> kernel;
  Param<T> bias;

 private:
  Tensor<T> input_;
};

// ---------------------------------------------------------------------------
// Batch normalization over every axis but the last (channels).
// Train mode normalizes with batch statistics and updates the running ones:
//   running = momentum * running + (1 - momentum) * batch
// ---------------------------------------------------------------------------
template <class T>
class BatchNorm {
 public:
  BatchNorm(const std::string& name, std::size_t channels, double momentum = 0.9,
            double epsilon = 1e-5);

  // Throws DegenerateBatch when fewer than two samples reach train mode.
  Tensor<T> forward(const Tensor<T>& x, Mode mode);
  Tensor<T> backward(const Tensor<T>& upstream);
  std::vector<Param<T>*> params() { return {&gamma, &beta}; }

  Param<T> gamma;
  Param<T> beta;
  std::vector<T> running_mean;
  std::vector<T> running_var;
  double momentum;
  double epsilon;

 private:
  Mode last_mode_ = Mode::Eval;
  std::vector<T> xhat_;
  std::vector<T> inv_std_;
  std::vector<std::size_t> shape_;
};

template <class T>
Tensor<T> relu_forward(const Tensor<T>& x);
// `output` is the forward result; gradient passes where it is positive.
template <class T>
Tensor<T> relu_backward(const Tensor<T>& output, const Tensor<T>& upstream);

// (b, t, c) -> (b, c), mean over time.
template <class T>
Tensor<T> global_avg_pool_forward(const Tensor<T>& x);
template <class T>
Tensor<T> global_avg_pool_backward(const Tensor<T>& upstream, std::size_t time_steps);

// ---------------------------------------------------------------------------
// Fully connected layer: x (b, f_in), weights (f_in, f_out), bias (f_out).
// ---------------------------------------------------------------------------
template <class T>
Tensor<T> dense_forward(const Tensor<T>& x, const Param<T>& weights, const Param<T>& bias);
template <class T>
Tensor<T> dense_backward(const Tensor<T>& x, Param<T>& weights, Param<T>& bias,
                         const Tensor<T>& upstream);

template <class T>
class Dense {
 public:
  Dense(const std::string& name, std::size_t in_features, std::size_t out_features);

  void init(Rng& rng);
  Tensor<T> forward(const Tensor<T>& x);
  Tensor<T> backward(const Tensor<T>& upstream);
  std::vector<Param<T>*> params() { return {&weights, &bias}; }

  Param<T> weights;
  Param<T> bias;

 private:
  Tensor<T> input_;
};

// ---------------------------------------------------------------------------
// Softmax cross-entropy over logits (b, K). loss = mean_b w[y_b] * -log p[b, y_b];
// logit gradient = w[y_b] * (p - onehot) / b. Class weights default to 1.
// ---------------------------------------------------------------------------
template <class T>
struct XentResult {
  double loss = 0.0;
  Tensor<T> probs;
};

// Row-wise softmax with max subtraction.
template <class T>
Tensor<T> softmax(const Tensor<T>& logits);

// Throws InvalidTarget for a target outside [0, K).
template <class T>
XentResult<T> softmax_xent(const Tensor<T>& logits, std::span<const int> targets,
                           std::span<const double> class_weights = {});
template <class T>
Tensor<T> softmax_xent_backward(const Tensor<T>& probs, std::span<const int> targets,
                                std::span<const double> class_weights = {});

// Dense head fused with the loss.
template <class T>
XentResult<T> dense_softmax_xent(const Tensor<T>& x, const Param<T>& weights, const Param<T>& bias,
                                 std::span<const int> targets);
template <class T>
Tensor<T> dense_softmax_xent_backward(const Tensor<T>& x, Param<T>& weights, Param<T>& bias,
                                      const Tensor<T>& probs, std::span<const int> targets);

void glorot_uniform(std::span<double> values, std::size_t fan_in, std::size_t fan_out, Rng& rng);
void glorot_uniform(std::span<float> values, std::size_t fan_in, std::size_t fan_out, Rng& rng);

}  // namespace earlywarn::numkit
