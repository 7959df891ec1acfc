#include "earlywarn/numkit/lstm.hpp"

#include <cmath>

#include "earlywarn/numkit/layers.hpp"
#include "numkit/eigen_maps.hpp"

namespace earlywarn::numkit {

using detail::ConstMatrixMap;
using detail::Matrix;
using detail::MatrixMap;
using detail::RowVectorMap;

namespace {

template <class T>
T sigmoid(T z) {
  return T(1) / (T(1) + std::exp(-z));
}

}  // namespace

template <class T>
Lstm<T>::Lstm(const std::string& name, std::size_t input_size, std::size_t hidden_size)
    : input_weights(name + ".input_weights", {input_size, 4 * hidden_size}),
      recurrent_weights(name + ".recurrent_weights", {hidden_size, 4 * hidden_size}),
      bias(name + ".bias", {4 * hidden_size}),
      input_size_(input_size),
      hidden_(hidden_size) {
  if (input_size == 0 || hidden_size == 0) {
    throw Error(ErrorCode::InvalidConfig, name + ": LSTM sizes must be >= 1");
  }
}

template <class T>
void Lstm<T>::init(Rng& rng) {
  glorot_uniform(std::span<T>(input_weights.value), input_size_, 4 * hidden_, rng);
  glorot_uniform(std::span<T>(recurrent_weights.value), hidden_, 4 * hidden_, rng);
  std::fill(bias.value.begin(), bias.value.end(), T(0));
  std::fill(bias.value.begin() + static_cast<std::ptrdiff_t>(hidden_),
            bias.value.begin() + static_cast<std::ptrdiff_t>(2 * hidden_), T(1));
}

template <class T>
Tensor<T> Lstm<T>::forward(const Tensor<T>& x) {
  expect_rank(x, 3, "lstm");
  if (x.dim(2) != input_size_) {
    throw Error(ErrorCode::ShapeMismatch, "lstm: input " + shape_string(x.shape) +
                                              " expects channels " + std::to_string(input_size_));
  }
  if (x.dim(1) == 0) throw Error(ErrorCode::ShapeMismatch, "lstm: empty sequence");
  const std::size_t b = x.dim(0), t = x.dim(1), h = hidden_, g4 = 4 * hidden_;
  input_ = x;

  Matrix<T> xw = ConstMatrixMap<T>(x.data.data(), static_cast<Eigen::Index>(b * t),
                                   static_cast<Eigen::Index>(input_size_)) *
                 ConstMatrixMap<T>(input_weights.value.data(), static_cast<Eigen::Index>(input_size_),
                                   static_cast<Eigen::Index>(g4));
  ConstMatrixMap<T> u(recurrent_weights.value.data(), static_cast<Eigen::Index>(h),
                      static_cast<Eigen::Index>(g4));

  gates_.assign(t, std::vector<T>(b * g4));
  cells_.assign(t + 1, std::vector<T>(b * h, T(0)));
  hidden_states_.assign(t + 1, std::vector<T>(b * h, T(0)));

  Matrix<T> z(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(g4));
  for (std::size_t step = 0; step < t; ++step) {
    z.noalias() = ConstMatrixMap<T>(hidden_states_[step].data(), static_cast<Eigen::Index>(b),
                                    static_cast<Eigen::Index>(h)) * u;
    auto& gate = gates_[step];
    const auto& c_prev = cells_[step];
    auto& c_next = cells_[step + 1];
    auto& h_next = hidden_states_[step + 1];
    for (std::size_t bi = 0; bi < b; ++bi) {
      const T* xrow = xw.data() + (bi * t + step) * g4;
      const T* zrow = z.data() + bi * g4;
      T* grow = gate.data() + bi * g4;
      for (std::size_t j = 0; j < g4; ++j) grow[j] = zrow[j] + xrow[j] + bias.value[j];
      for (std::size_t j = 0; j < h; ++j) {
        const T i_gate = sigmoid(grow[j]);
        const T f_gate = sigmoid(grow[h + j]);
        const T g_cand = std::tanh(grow[2 * h + j]);
        const T o_gate = sigmoid(grow[3 * h + j]);
        grow[j] = i_gate;
        grow[h + j] = f_gate;
        grow[2 * h + j] = g_cand;
        grow[3 * h + j] = o_gate;
        const T c = f_gate * c_prev[bi * h + j] + i_gate * g_cand;
        c_next[bi * h + j] = c;
        h_next[bi * h + j] = o_gate * std::tanh(c);
      }
    }
  }
  return Tensor<T>({b, h}, hidden_states_[t]);
}

template <class T>
Tensor<T> Lstm<T>::backward(const Tensor<T>& upstream) {
  const std::size_t b = input_.dim(0), t = input_.dim(1), h = hidden_, g4 = 4 * hidden_;
  if (upstream.shape != std::vector<std::size_t>{b, h}) {
    throw Error(ErrorCode::ShapeMismatch, "lstm backward: upstream " + shape_string(upstream.shape));
  }
  ConstMatrixMap<T> u(recurrent_weights.value.data(), static_cast<Eigen::Index>(h),
                      static_cast<Eigen::Index>(g4));
  MatrixMap<T> du(recurrent_weights.grad.data(), static_cast<Eigen::Index>(h),
                  static_cast<Eigen::Index>(g4));

  // dZ for every (sample, step), laid out like the input rows.
  Matrix<T> dz_all(static_cast<Eigen::Index>(b * t), static_cast<Eigen::Index>(g4));
  Matrix<T> dz(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(g4));
  Matrix<T> dh = ConstMatrixMap<T>(upstream.data.data(), static_cast<Eigen::Index>(b),
                                   static_cast<Eigen::Index>(h));
  std::vector<T> dc(b * h, T(0));

  for (std::size_t step = t; step-- > 0;) {
    const auto& gate = gates_[step];
    const auto& c_prev = cells_[step];
    const auto& c_cur = cells_[step + 1];
    for (std::size_t bi = 0; bi < b; ++bi) {
      const T* grow = gate.data() + bi * g4;
      T* dzrow = dz.data() + bi * g4;
      for (std::size_t j = 0; j < h; ++j) {
        const std::size_t cell = bi * h + j;
        const T i_gate = grow[j], f_gate = grow[h + j], g_cand = grow[2 * h + j],
                o_gate = grow[3 * h + j];
        const T tanh_c = std::tanh(c_cur[cell]);
        const T dhv = dh(static_cast<Eigen::Index>(bi), static_cast<Eigen::Index>(j));
        const T d_o = dhv * tanh_c;
        const T dcv = dc[cell] + dhv * o_gate * (T(1) - tanh_c * tanh_c);
        const T d_i = dcv * g_cand;
        const T d_g = dcv * i_gate;
        const T d_f = dcv * c_prev[cell];
        dc[cell] = dcv * f_gate;
        dzrow[j] = d_i * i_gate * (T(1) - i_gate);
        dzrow[h + j] = d_f * f_gate * (T(1) - f_gate);
        dzrow[2 * h + j] = d_g * (T(1) - g_cand * g_cand);
        dzrow[3 * h + j] = d_o * o_gate * (T(1) - o_gate);
      }
      std::copy_n(dzrow, g4, dz_all.data() + (bi * t + step) * g4);
    }
    ConstMatrixMap<T> h_prev(hidden_states_[step].data(), static_cast<Eigen::Index>(b),
                             static_cast<Eigen::Index>(h));
    du.noalias() += h_prev.transpose() * dz;
    detail::add_column_sums(dz, bias.grad.data());
    dh.noalias() = dz * u.transpose();
  }

  ConstMatrixMap<T> x(input_.data.data(), static_cast<Eigen::Index>(b * t),
                      static_cast<Eigen::Index>(input_size_));
  ConstMatrixMap<T> w(input_weights.value.data(), static_cast<Eigen::Index>(input_size_),
                      static_cast<Eigen::Index>(g4));
  MatrixMap<T>(input_weights.grad.data(), static_cast<Eigen::Index>(input_size_),
               static_cast<Eigen::Index>(g4))
      .noalias() += x.transpose() * dz_all;
  Tensor<T> dx(input_.shape);
  MatrixMap<T>(dx.data.data(), static_cast<Eigen::Index>(b * t),
               static_cast<Eigen::Index>(input_size_))
      .noalias() = dz_all * w.transpose();
  return dx;
}

template class Lstm<float>;
template class Lstm<double>;

}  // namespace earlywarn::numkit
