#include "earlywarn/numkit/layers.hpp"

#include <cmath>
#include <sstream>

#include "numkit/eigen_maps.hpp"

namespace earlywarn::numkit {

using detail::ConstMatrixMap;
using detail::ConstRowVectorMap;
using detail::Matrix;
using detail::MatrixMap;
using detail::RowVectorMap;

const char* to_string(Precision p) { return p == Precision::F32 ? "f32" : "f64"; }

Precision parse_precision(std::string_view text) {
  if (text == "f32" || text == "32") return Precision::F32;
  if (text == "f64" || text == "64") return Precision::F64;
  throw Error(ErrorCode::InvalidConfig, "unknown precision '" + std::string(text) + "'");
}

std::string shape_string(const std::vector<std::size_t>& shape) {
  std::ostringstream os;
  os << '(';
  for (std::size_t i = 0; i < shape.size(); ++i) os << (i ? ", " : "") << shape[i];
  os << ')';
  return os.str();
}

namespace {

template <class T>
Matrix<T> im2col(const Tensor<T>& x, std::size_t k) {
  const std::size_t b = x.dim(0), t = x.dim(1), c = x.dim(2);
  const std::ptrdiff_t left = static_cast<std::ptrdiff_t>(k / 2);
  Matrix<T> cols = Matrix<T>::Zero(static_cast<Eigen::Index>(b * t), static_cast<Eigen::Index>(k * c));
  for (std::size_t bi = 0; bi < b; ++bi) {
    const T* sample = x.data.data() + bi * t * c;
    for (std::size_t ti = 0; ti < t; ++ti) {
      T* row = cols.data() + (bi * t + ti) * k * c;
      for (std::size_t j = 0; j < k; ++j) {
        const std::ptrdiff_t src = static_cast<std::ptrdiff_t>(ti) + left - static_cast<std::ptrdiff_t>(j);
        if (src < 0 || src >= static_cast<std::ptrdiff_t>(t)) continue;
        std::copy_n(sample + static_cast<std::size_t>(src) * c, c, row + j * c);
      }
    }
  }
  return cols;
}

template <class T>
void col2im_add(const Matrix<T>& cols, std::size_t k, Tensor<T>& dx) {
  const std::size_t b = dx.dim(0), t = dx.dim(1), c = dx.dim(2);
  const std::ptrdiff_t left = static_cast<std::ptrdiff_t>(k / 2);
  for (std::size_t bi = 0; bi < b; ++bi) {
    T* sample = dx.data.data() + bi * t * c;
    for (std::size_t ti = 0; ti < t; ++ti) {
      const T* row = cols.data() + (bi * t + ti) * k * c;
      for (std::size_t j = 0; j < k; ++j) {
        const std::ptrdiff_t dst = static_cast<std::ptrdiff_t>(ti) + left - static_cast<std::ptrdiff_t>(j);
        if (dst < 0 || dst >= static_cast<std::ptrdiff_t>(t)) continue;
        T* out = sample + static_cast<std::size_t>(dst) * c;
        const T* in = row + j * c;
        for (std::size_t ci = 0; ci < c; ++ci) out[ci] += in[ci];
      }
    }
  }
}

template <class T>
void check_conv_shapes(const Tensor<T>& x, const Param<T>& kernel, const Param<T>& bias) {
  expect_rank(x, 3, "conv1d");
  if (kernel.shape.size() != 3 || kernel.shape[1] != x.dim(2) || bias.size() != kernel.shape[2] ||
      kernel.shape[0] == 0) {
    throw Error(ErrorCode::ShapeMismatch, "conv1d: input " + shape_string(x.shape) +
                                              " incompatible with kernel " +
                                              shape_string(kernel.shape));
  }
}

template <class T>
void check_dense_shapes(const Tensor<T>& x, const Param<T>& weights, const Param<T>& bias) {
  expect_rank(x, 2, "dense");
  if (weights.shape.size() != 2 || weights.shape[0] != x.dim(1) || bias.size() != weights.shape[1]) {
    throw Error(ErrorCode::ShapeMismatch, "dense: input " + shape_string(x.shape) +
                                              " incompatible with weights " +
                                              shape_string(weights.shape));
  }
}

template <class T>
double class_weight(std::span<const double> weights, int target) {
  return weights.empty() ? 1.0 : weights[static_cast<std::size_t>(target)];
}

template <class T>
void check_targets(const Tensor<T>& logits, std::span<const int> targets,
                   std::span<const double> class_weights) {
  expect_rank(logits, 2, "softmax_xent");
  const std::size_t k = logits.dim(1);
  if (targets.size() != logits.dim(0)) {
    throw Error(ErrorCode::ShapeMismatch, "softmax_xent: targets length differs from batch");
  }
  if (!class_weights.empty() && class_weights.size() != k) {
    throw Error(ErrorCode::ShapeMismatch, "softmax_xent: class weight count differs from K");
  }
  for (int y : targets) {
    if (y < 0 || static_cast<std::size_t>(y) >= k) {
      throw Error(ErrorCode::InvalidTarget, "target " + std::to_string(y) + " outside [0, " +
                                                std::to_string(k) + ")");
    }
  }
}

}  // namespace

// --- conv1d ----------------------------------------------------------------

template <class T>
Tensor<T> conv1d_forward(const Tensor<T>& x, const Param<T>& kernel, const Param<T>& bias) {
  check_conv_shapes(x, kernel, bias);
  const std::size_t b = x.dim(0), t = x.dim(1);
  const std::size_t k = kernel.shape[0], c_in = kernel.shape[1], c_out = kernel.shape[2];
  const Matrix<T> cols = im2col(x, k);
  Tensor<T> y({b, t, c_out});
  MatrixMap<T> out(y.data.data(), static_cast<Eigen::Index>(b * t), static_cast<Eigen::Index>(c_out));
  ConstMatrixMap<T> w(kernel.value.data(), static_cast<Eigen::Index>(k * c_in), static_cast<Eigen::Index>(c_out));
  out.noalias() = cols * w;
  out.rowwise() += ConstRowVectorMap<T>(bias.value.data(), static_cast<Eigen::Index>(c_out));
  return y;
}

template <class T>
Tensor<T> conv1d_backward(const Tensor<T>& x, Param<T>& kernel, Param<T>& bias,
                          const Tensor<T>& upstream) {
  check_conv_shapes(x, kernel, bias);
  const std::size_t b = x.dim(0), t = x.dim(1);
  const std::size_t k = kernel.shape[0], c_in = kernel.shape[1], c_out = kernel.shape[2];
  if (upstream.shape != std::vector<std::size_t>{b, t, c_out}) {
    throw Error(ErrorCode::ShapeMismatch, "conv1d_backward: upstream " + shape_string(upstream.shape));
  }
  const auto rows = static_cast<Eigen::Index>(b * t);
  const Matrix<T> cols = im2col(x, k);
  ConstMatrixMap<T> dy(upstream.data.data(), rows, static_cast<Eigen::Index>(c_out));
  MatrixMap<T> dw(kernel.grad.data(), static_cast<Eigen::Index>(k * c_in), static_cast<Eigen::Index>(c_out));
  ConstMatrixMap<T> w(kernel.value.data(), static_cast<Eigen::Index>(k * c_in), static_cast<Eigen::Index>(c_out));
  dw.noalias() += cols.transpose() * dy;
  detail::add_column_sums(dy, bias.grad.data());

  Matrix<T> dcols(rows, static_cast<Eigen::Index>(k * c_in));
  dcols.noalias() = dy * w.transpose();
  Tensor<T> dx(x.shape);
  col2im_add(dcols, k, dx);
  return dx;
}

template <class T>
Conv1d<T>::Conv1d(const std::string& name, std::size_t in_channels, std::size_t out_channels,
                  std::size_t kernel_size)
    : kernel(name + ".kernel", {kernel_size, in_channels, out_channels}),
      bias(name + ".bias", {out_channels}) {
  if (kernel_size == 0 || in_channels == 0 || out_channels == 0) {
    throw Error(ErrorCode::InvalidConfig, name + ": conv sizes must be >= 1");
  }
}

template <class T>
void Conv1d<T>::init(Rng& rng) {
  const std::size_t k = kernel.shape[0];
  glorot_uniform(std::span<T>(kernel.value), k * kernel.shape[1], k * kernel.shape[2], rng);
  std::fill(bias.value.begin(), bias.value.end(), T(0));
}

template <class T>
Tensor<T> Conv1d<T>::forward(const Tensor<T>& x) {
  input_ = x;
  return conv1d_forward(x, kernel, bias);
}

template <class T>
Tensor<T> Conv1d<T>::backward(const Tensor<T>& upstream) {
  return conv1d_backward(input_, kernel, bias, upstream);
}

// --- batch norm ------------------------------------------------------------

template <class T>
BatchNorm<T>::BatchNorm(const std::string& name, std::size_t channels, double momentum_,
                        double epsilon_)
    : gamma(name + ".gamma", {channels}), beta(name + ".beta", {channels}),
      running_mean(channels, T(0)), running_var(channels, T(1)), momentum(momentum_),
      epsilon(epsilon_) {
  std::fill(gamma.value.begin(), gamma.value.end(), T(1));
}

template <class T>
Tensor<T> BatchNorm<T>::forward(const Tensor<T>& x, Mode mode) {
  const std::size_t c = gamma.size();
  if (x.rank() < 2 || x.shape.back() != c) {
    throw Error(ErrorCode::ShapeMismatch, gamma.name + ": input " + shape_string(x.shape));
  }
  if (mode == Mode::Train && x.dim(0) < 2) {
    throw Error(ErrorCode::DegenerateBatch, gamma.name + ": train mode needs batch >= 2");
  }
  const std::size_t m = x.size() / c;
  last_mode_ = mode;
  shape_ = x.shape;
  inv_std_.assign(c, T(0));
  std::vector<double> mean(c, 0.0), var(c, 0.0);
  if (mode == Mode::Train) {
    for (std::size_t i = 0; i < x.size(); ++i) mean[i % c] += x.data[i];
    for (auto& v : mean) v /= static_cast<double>(m);
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double d = x.data[i] - mean[i % c];
      var[i % c] += d * d;
    }
    for (auto& v : var) v /= static_cast<double>(m);
    for (std::size_t ch = 0; ch < c; ++ch) {
      running_mean[ch] = static_cast<T>(momentum * running_mean[ch] + (1.0 - momentum) * mean[ch]);
      running_var[ch] = static_cast<T>(momentum * running_var[ch] + (1.0 - momentum) * var[ch]);
    }
  } else {
    for (std::size_t ch = 0; ch < c; ++ch) {
      mean[ch] = running_mean[ch];
      var[ch] = running_var[ch];
    }
  }
  for (std::size_t ch = 0; ch < c; ++ch) {
    const double denom = var[ch] + epsilon;
    inv_std_[ch] = denom > 0.0 ? static_cast<T>(1.0 / std::sqrt(denom)) : T(0);
  }

  Tensor<T> y(x.shape);
  xhat_.resize(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const std::size_t ch = i % c;
    xhat_[i] = static_cast<T>((x.data[i] - mean[ch]) * inv_std_[ch]);
    y.data[i] = gamma.value[ch] * xhat_[i] + beta.value[ch];
  }
  return y;
}

template <class T>
Tensor<T> BatchNorm<T>::backward(const Tensor<T>& upstream) {
  const std::size_t c = gamma.size();
  if (upstream.shape != shape_) {
    throw Error(ErrorCode::ShapeMismatch, gamma.name + ": upstream " + shape_string(upstream.shape));
  }
  const std::size_t m = upstream.size() / c;
  std::vector<double> sum_dxhat(c, 0.0), sum_dxhat_xhat(c, 0.0);
  for (std::size_t i = 0; i < upstream.size(); ++i) {
    const std::size_t ch = i % c;
    const double dy = upstream.data[i];
    gamma.grad[ch] += static_cast<T>(dy * xhat_[i]);
    beta.grad[ch] += static_cast<T>(dy);
    const double dxhat = dy * gamma.value[ch];
    sum_dxhat[ch] += dxhat;
    sum_dxhat_xhat[ch] += dxhat * xhat_[i];
  }
  Tensor<T> dx(shape_);
  for (std::size_t i = 0; i < upstream.size(); ++i) {
    const std::size_t ch = i % c;
    const double dxhat = upstream.data[i] * gamma.value[ch];
    if (last_mode_ == Mode::Train) {
      const double mm = static_cast<double>(m);
      dx.data[i] = static_cast<T>(inv_std_[ch] *
                                  (dxhat - sum_dxhat[ch] / mm - xhat_[i] * sum_dxhat_xhat[ch] / mm));
    } else {
      dx.data[i] = static_cast<T>(dxhat * inv_std_[ch]);
    }
  }
  return dx;
}

// --- relu / pooling --------------------------------------------------------

template <class T>
Tensor<T> relu_forward(const Tensor<T>& x) {
  Tensor<T> y(x.shape);
  for (std::size_t i = 0; i < x.size(); ++i) y.data[i] = x.data[i] > T(0) ? x.data[i] : T(0);
  return y;
}

template <class T>
Tensor<T> relu_backward(const Tensor<T>& output, const Tensor<T>& upstream) {
  if (output.shape != upstream.shape) throw Error(ErrorCode::ShapeMismatch, "relu_backward");
  Tensor<T> dx(output.shape);
  for (std::size_t i = 0; i < output.size(); ++i) {
    dx.data[i] = output.data[i] > T(0) ? upstream.data[i] : T(0);
  }
  return dx;
}

template <class T>
Tensor<T> global_avg_pool_forward(const Tensor<T>& x) {
  expect_rank(x, 3, "global_avg_pool");
  const std::size_t b = x.dim(0), t = x.dim(1), c = x.dim(2);
  if (t == 0) throw Error(ErrorCode::ShapeMismatch, "global_avg_pool: empty time axis");
  Tensor<T> y({b, c});
  for (std::size_t bi = 0; bi < b; ++bi) {
    for (std::size_t ti = 0; ti < t; ++ti) {
      const T* row = x.data.data() + (bi * t + ti) * c;
      for (std::size_t ci = 0; ci < c; ++ci) y.data[bi * c + ci] += row[ci];
    }
  }
  for (auto& v : y.data) v /= static_cast<T>(t);
  return y;
}

template <class T>
Tensor<T> global_avg_pool_backward(const Tensor<T>& upstream, std::size_t time_steps) {
  expect_rank(upstream, 2, "global_avg_pool_backward");
  const std::size_t b = upstream.dim(0), c = upstream.dim(1);
  Tensor<T> dx({b, time_steps, c});
  const T scale = T(1) / static_cast<T>(time_steps);
  for (std::size_t bi = 0; bi < b; ++bi) {
    for (std::size_t ti = 0; ti < time_steps; ++ti) {
      T* row = dx.data.data() + (bi * time_steps + ti) * c;
      for (std::size_t ci = 0; ci < c; ++ci) row[ci] = upstream.data[bi * c + ci] * scale;
    }
  }
  return dx;
}

// --- dense -----------------------------------------------------------------

template <class T>
Tensor<T> dense_forward(const Tensor<T>& x, const Param<T>& weights, const Param<T>& bias) {
  check_dense_shapes(x, weights, bias);
  const auto b = static_cast<Eigen::Index>(x.dim(0));
  const auto f_in = static_cast<Eigen::Index>(weights.shape[0]);
  const auto f_out = static_cast<Eigen::Index>(weights.shape[1]);
  Tensor<T> y({x.dim(0), weights.shape[1]});
  MatrixMap<T> out(y.data.data(), b, f_out);
  out.noalias() = ConstMatrixMap<T>(x.data.data(), b, f_in) *
                  ConstMatrixMap<T>(weights.value.data(), f_in, f_out);
  out.rowwise() += ConstRowVectorMap<T>(bias.value.data(), f_out);
  return y;
}

template <class T>
Tensor<T> dense_backward(const Tensor<T>& x, Param<T>& weights, Param<T>& bias,
                         const Tensor<T>& upstream) {
  check_dense_shapes(x, weights, bias);
  const auto b = static_cast<Eigen::Index>(x.dim(0));
  const auto f_in = static_cast<Eigen::Index>(weights.shape[0]);
  const auto f_out = static_cast<Eigen::Index>(weights.shape[1]);
  if (upstream.shape != std::vector<std::size_t>{x.dim(0), weights.shape[1]}) {
    throw Error(ErrorCode::ShapeMismatch, "dense_backward: upstream " + shape_string(upstream.shape));
  }
  ConstMatrixMap<T> xin(x.data.data(), b, f_in);
  ConstMatrixMap<T> dy(upstream.data.data(), b, f_out);
  MatrixMap<T>(weights.grad.data(), f_in, f_out).noalias() += xin.transpose() * dy;
  detail::add_column_sums(dy, bias.grad.data());
  Tensor<T> dx(x.shape);
  MatrixMap<T>(dx.data.data(), b, f_in).noalias() =
      dy * ConstMatrixMap<T>(weights.value.data(), f_in, f_out).transpose();
  return dx;
}

template <class T>
Dense<T>::Dense(const std::string& name, std::size_t in_features, std::size_t out_features)
    : weights(name + ".weights", {in_features, out_features}), bias(name + ".bias", {out_features}) {
  if (in_features == 0 || out_features == 0) {
    throw Error(ErrorCode::InvalidConfig, name + ": dense sizes must be >= 1");
  }
}

template <class T>
void Dense<T>::init(Rng& rng) {
  glorot_uniform(std::span<T>(weights.value), weights.shape[0], weights.shape[1], rng);
  std::fill(bias.value.begin(), bias.value.end(), T(0));
}

template <class T>
Tensor<T> Dense<T>::forward(const Tensor<T>& x) {
  input_ = x;
  return dense_forward(x, weights, bias);
}

template <class T>
Tensor<T> Dense<T>::backward(const Tensor<T>& upstream) {
  return dense_backward(input_, weights, bias, upstream);
}

// --- softmax cross-entropy -------------------------------------------------

template <class T>
Tensor<T> softmax(const Tensor<T>& logits) {
  expect_rank(logits, 2, "softmax");
  const std::size_t b = logits.dim(0), k = logits.dim(1);
  Tensor<T> probs(logits.shape);
  for (std::size_t r = 0; r < b; ++r) {
    const T* z = logits.data.data() + r * k;
    T* p = probs.data.data() + r * k;
    const T top = *std::max_element(z, z + k);
    double total = 0.0;
    for (std::size_t j = 0; j < k; ++j) total += std::exp(static_cast<double>(z[j] - top));
    for (std::size_t j = 0; j < k; ++j) {
      p[j] = static_cast<T>(std::exp(static_cast<double>(z[j] - top)) / total);
    }
  }
  return probs;
}

template <class T>
XentResult<T> softmax_xent(const Tensor<T>& logits, std::span<const int> targets,
                           std::span<const double> class_weights) {
  check_targets(logits, targets, class_weights);
  const std::size_t b = logits.dim(0), k = logits.dim(1);
  XentResult<T> result;
  result.probs = softmax(logits);
  double loss = 0.0;
  for (std::size_t r = 0; r < b; ++r) {
    const T* z = logits.data.data() + r * k;
    const double top = *std::max_element(z, z + k);
    double total = 0.0;
    for (std::size_t j = 0; j < k; ++j) total += std::exp(z[j] - top);
    const double log_p = (z[targets[r]] - top) - std::log(total);
    loss -= class_weight<T>(class_weights, targets[r]) * log_p;
  }
  result.loss = b ? loss / static_cast<double>(b) : 0.0;
  return result;
}

template <class T>
Tensor<T> softmax_xent_backward(const Tensor<T>& probs, std::span<const int> targets,
                                std::span<const double> class_weights) {
  check_targets(probs, targets, class_weights);
  const std::size_t b = probs.dim(0), k = probs.dim(1);
  Tensor<T> dz(probs.shape);
  for (std::size_t r = 0; r < b; ++r) {
    const double w = class_weight<T>(class_weights, targets[r]) / static_cast<double>(b);
    for (std::size_t j = 0; j < k; ++j) {
      const double onehot = static_cast<int>(j) == targets[r] ? 1.0 : 0.0;
      dz.data[r * k + j] = static_cast<T>(w * (probs.data[r * k + j] - onehot));
    }
  }
  return dz;
}

template <class T>
XentResult<T> dense_softmax_xent(const Tensor<T>& x, const Param<T>& weights, const Param<T>& bias,
                                 std::span<const int> targets) {
  return softmax_xent(dense_forward(x, weights, bias), targets);
}

template <class T>
Tensor<T> dense_softmax_xent_backward(const Tensor<T>& x, Param<T>& weights, Param<T>& bias,
                                      const Tensor<T>& probs, std::span<const int> targets) {
  return dense_backward(x, weights, bias, softmax_xent_backward(probs, targets));
}

template <class T>
static void glorot_impl(std::span<T> values, std::size_t fan_in, std::size_t fan_out, Rng& rng) {
  const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  for (auto& v : values) v = static_cast<T>(rng.uniform(-limit, limit));
}

void glorot_uniform(std::span<double> values, std::size_t fan_in, std::size_t fan_out, Rng& rng) {
  glorot_impl(values, fan_in, fan_out, rng);
}
void glorot_uniform(std::span<float> values, std::size_t fan_in, std::size_t fan_out, Rng& rng) {
  glorot_impl(values, fan_in, fan_out, rng);
}

#define EARLYWARN_INSTANTIATE_LAYERS(T)                                                          \
  template Tensor<T> conv1d_forward(const Tensor<T>&, const Param<T>&, const Param<T>&);         \
  template Tensor<T> conv1d_backward(const Tensor<T>&, Param<T>&, Param<T>&, const Tensor<T>&);  \
  template class Conv1d<T>;                                                                      \
  template class BatchNorm<T>;                                                                   \
  template Tensor<T> relu_forward(const Tensor<T>&);                                             \
  template Tensor<T> relu_backward(const Tensor<T>&, const Tensor<T>&);                          \
  template Tensor<T> global_avg_pool_forward(const Tensor<T>&);                                  \
  template Tensor<T> global_avg_pool_backward(const Tensor<T>&, std::size_t);                    \
  template Tensor<T> dense_forward(const Tensor<T>&, const Param<T>&, const Param<T>&);          \
  template Tensor<T> dense_backward(const Tensor<T>&, Param<T>&, Param<T>&, const Tensor<T>&);   \
  template class Dense<T>;                                                                       \
  template Tensor<T> softmax(const Tensor<T>&);                                                  \
  template XentResult<T> softmax_xent(const Tensor<T>&, std::span<const int>,                    \
                                      std::span<const double>);                                  \
  template Tensor<T> softmax_xent_backward(const Tensor<T>&, std::span<const int>,               \
                                           std::span<const double>);                             \
  template XentResult<T> dense_softmax_xent(const Tensor<T>&, const Param<T>&, const Param<T>&,  \
                                            std::span<const int>);                               \
  template Tensor<T> dense_softmax_xent_backward(const Tensor<T>&, Param<T>&, Param<T>&,         \
                                                 const Tensor<T>&, std::span<const int>);

EARLYWARN_INSTANTIATE_LAYERS(float)
EARLYWARN_INSTANTIATE_LAYERS(double)

}  // namespace earlywarn::numkit
