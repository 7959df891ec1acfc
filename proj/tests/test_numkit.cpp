#include <doctest.h>

#include <cmath>
#include <fstream>

#include "earlywarn/error.hpp"
#include "earlywarn/numkit/adam.hpp"
#include "earlywarn/numkit/checkpoint.hpp"
#include "earlywarn/numkit/grad_check.hpp"
#include "earlywarn/numkit/layers.hpp"
#include "earlywarn/numkit/lstm.hpp"
#include "oracles.hpp"

using namespace earlywarn;
using namespace earlywarn::numkit;

namespace {

Param<double> make_param(const std::string& name, std::vector<std::size_t> shape, std::vector<double> v) {
  Param<double> p(name, std::move(shape));
  p.value = std::move(v);
  return p;
}

}  // namespace

TEST_CASE("conv1d: k=1 identity kernel reproduces the input exactly") {
  Rng rng(3);
  Tensor<double> x({2, 9, 1});
  oracle::fill_normal(x.data, rng);
  const auto kernel = make_param("k", {1, 1, 1}, {1.0});
  const auto bias = make_param("b", {1}, {0.0});
  CHECK(conv1d_forward(x, kernel, bias).data == x.data);
}

TEST_CASE("conv1d: [1,2,3] with kernel [1,0,-1] gives [2,2,-2]") {
  Tensor<double> x({1, 3, 1}, std::vector<double>{1, 2, 3});
  const auto kernel = make_param("k", {3, 1, 1}, {1, 0, -1});
  const auto bias = make_param("b", {1}, {0});
  const auto y = conv1d_forward(x, kernel, bias);
  CHECK(y.data == std::vector<double>{2, 2, -2});
}

TEST_CASE("conv1d matches the sliding-window oracle for odd and even kernels") {
  for (std::size_t k : {1u, 2u, 3u, 4u, 5u, 8u}) {
    Rng rng(100 + k);
    const std::size_t b = 2, t = 6, ci = 3, co = 2;
    Tensor<double> x({b, t, ci});
    oracle::fill_normal(x.data, rng);
    Param<double> kernel("k", {k, ci, co}), bias("b", {co});
    oracle::fill_normal(kernel.value, rng);
    oracle::fill_normal(bias.value, rng);
    const auto y = conv1d_forward(x, kernel, bias);
    const auto ref = oracle::conv_sliding_window(x.data, b, t, ci, kernel.value, k, co, bias.value);
    REQUIRE(y.data.size() == ref.size());
    for (std::size_t i = 0; i < ref.size(); ++i) CHECK(y.data[i] == doctest::Approx(ref[i]).epsilon(1e-12));
  }
}

TEST_CASE("conv1d keeps the time length and rejects mismatched channels") {
  Tensor<double> x({1, 5, 2});
  Param<double> kernel("k", {3, 3, 4}), bias("b", {4});
  CHECK_THROWS_AS(conv1d_forward(x, kernel, bias), Error);
  Param<double> ok("k", {3, 2, 4});
  CHECK(conv1d_forward(x, ok, bias).shape == std::vector<std::size_t>{1, 5, 4});
}

TEST_CASE("gradient checks in 64-bit") {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    CAPTURE(seed);
    CHECK(oracle::conv_grad_error(seed) < 1e-6);
    CHECK(oracle::batchnorm_grad_error(seed) < 1e-5);
    CHECK(oracle::dense_xent_grad_error(seed) < 1e-6);
    CHECK(oracle::lstm_grad_error(seed) < 1e-5);
  }
}

TEST_CASE("grad_check flags a corrupted backward") {
  CHECK(oracle::conv_grad_error(1, 1.1) > 1e-2);
}

TEST_CASE("grad_check on a linear op is essentially exact") {
  std::vector<double> x{0.3, -1.2, 2.5};
  const std::vector<double> coeff{1.5, -2.0, 0.25};
  auto f = [&] { return oracle::dot(coeff, x); };
  const std::vector<GradTarget> t{{"x", x, coeff}};
  const auto r = grad_check(f, t);
  CHECK(r.max_relative_error < 1e-9);
  CHECK(r.coordinates_checked == 3);
}

TEST_CASE("grad_check samples a seeded subset above the coordinate cap") {
  std::vector<double> x(50, 1.0), g(50, 2.0);
  auto f = [&] {
    double s = 0;
    for (double v : x) s += 2 * v;
    return s;
  };
  GradCheckOptions opt;
  opt.max_coordinates = 10;
  const std::vector<GradTarget> t{{"x", x, g}};
  CHECK(grad_check(f, t, opt).coordinates_checked == 10);
}

TEST_CASE("relu and dense layers pass finite differences") {
  Rng rng(11);
  Tensor<double> x({3, 4});
  oracle::fill_normal(x.data, rng);
  Param<double> w("w", {4, 2}), b("b", {2});
  oracle::fill_normal(w.value, rng);
  oracle::fill_normal(b.value, rng);
  std::vector<double> r(6);
  oracle::fill_normal(r, rng);
  auto f = [&] { return oracle::dot(r, relu_forward(dense_forward(x, w, b)).data); };
  const auto y = relu_forward(dense_forward(x, w, b));
  const auto dx = dense_backward(x, w, b, relu_backward(y, Tensor<double>({3, 2}, r)));
  const std::vector<GradTarget> t{{"x", x.data, dx.data}, {"w", w.value, w.grad}, {"b", b.value, b.grad}};
  CHECK(grad_check(f, t).max_relative_error < 1e-6);
}

TEST_CASE("batchnorm: constant channel with gamma 1, beta 0 maps to zeros") {
  BatchNorm<double> bn("bn", 1);
  Tensor<double> x({4, 3, 1}, 5.0);
  for (double v : bn.forward(x, Mode::Train).data) CHECK(v == 0.0);
}

TEST_CASE("batchnorm train mode standardizes each channel") {
  Rng rng(5);
  Tensor<double> x({8, 6, 3});
  oracle::fill_normal(x.data, rng, 3.0);
  for (std::size_t i = 0; i < x.size(); i += 3) x.data[i] += 10.0;

  auto channel_stats = [](const Tensor<double>& y, std::size_t c) {
    double mean = 0, var = 0;
    const std::size_t n = y.size() / 3;
    for (std::size_t i = c; i < y.size(); i += 3) mean += y.data[i];
    mean /= static_cast<double>(n);
    for (std::size_t i = c; i < y.size(); i += 3) var += (y.data[i] - mean) * (y.data[i] - mean);
    return std::pair{mean, var / static_cast<double>(n)};
  };

  SUBCASE("eps = 0: mean 0 and variance 1") {
    BatchNorm<double> bn("bn", 3, 0.9, 0.0);
    const auto y = bn.forward(x, Mode::Train);
    for (std::size_t c = 0; c < 3; ++c) {
      const auto [mean, var] = channel_stats(y, c);
      CHECK(std::abs(mean) < 1e-10);
      CHECK(std::abs(var - 1.0) < 1e-8);
    }
  }
  SUBCASE("default eps: variance equals var / (var + eps)") {
    BatchNorm<double> bn("bn", 3);
    const auto y = bn.forward(x, Mode::Train);
    for (std::size_t c = 0; c < 3; ++c) {
      double mean = 0, var = 0;
      const std::size_t n = x.size() / 3;
      for (std::size_t i = c; i < x.size(); i += 3) mean += x.data[i];
      mean /= static_cast<double>(n);
      for (std::size_t i = c; i < x.size(); i += 3) var += (x.data[i] - mean) * (x.data[i] - mean);
      var /= static_cast<double>(n);
      const auto [ymean, yvar] = channel_stats(y, c);
      CHECK(std::abs(ymean) < 1e-10);
      CHECK(std::abs(yvar - var / (var + 1e-5)) < 1e-12);
    }
  }
}

TEST_CASE("batchnorm running statistics, eval determinism and degenerate batches") {
  BatchNorm<double> bn("bn", 1);
  Tensor<double> x({2, 1, 1}, std::vector<double>{1.0, 3.0});
  bn.forward(x, Mode::Train);
  CHECK(bn.running_mean[0] == doctest::Approx(0.9 * 0.0 + 0.1 * 2.0));
  CHECK(bn.running_var[0] == doctest::Approx(0.9 * 1.0 + 0.1 * 1.0));
  Tensor<double> q({3, 1, 1}, std::vector<double>{0.5, 2.0, 4.0});
  const auto a = bn.forward(q, Mode::Eval);
  const auto b = bn.forward(q, Mode::Eval);
  CHECK(a.data == b.data);
  CHECK(bn.running_mean[0] == doctest::Approx(0.2));

  Tensor<double> single({1, 4, 1}, 1.0);
  try {
    bn.forward(single, Mode::Train);
    FAIL("expected DegenerateBatch");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DegenerateBatch);
  }
  CHECK_NOTHROW(bn.forward(single, Mode::Eval));
}

TEST_CASE("global average pooling forward and backward") {
  Tensor<double> x({1, 3, 2}, std::vector<double>{1, 7, 2, 7, 3, 7});
  const auto y = global_avg_pool_forward(x);
  CHECK(y.data == std::vector<double>{2, 7});
  const auto dx = global_avg_pool_backward(Tensor<double>({1, 2}, 1.0), 4);
  CHECK(dx.shape == std::vector<std::size_t>{1, 4, 2});
  for (double v : dx.data) CHECK(v == 0.25);
}

TEST_CASE("softmax cross-entropy spot values") {
  SUBCASE("equal logits, K=4 -> uniform, loss ln 4") {
    Tensor<double> logits({1, 4}, 0.3);
    const std::vector<int> y{2};
    const auto r = softmax_xent(logits, y);
    CHECK(r.loss == doctest::Approx(std::log(4.0)).epsilon(1e-12));
    for (double p : r.probs.data) CHECK(p == doctest::Approx(0.25));
  }
  SUBCASE("dominant target logit -> near-zero loss") {
    Tensor<double> logits({1, 3}, std::vector<double>{1000.0, 0.0, -3.0});
    const std::vector<int> y{0};
    CHECK(softmax_xent(logits, y).loss < 1e-6);
  }
  SUBCASE("out-of-range target") {
    Tensor<double> logits({1, 3}, 0.0);
    const std::vector<int> y{3};
    try {
      softmax_xent(logits, y);
      FAIL("expected InvalidTarget");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::InvalidTarget);
    }
  }
}

TEST_CASE("softmax rows sum to one and stay positive") {
  Rng rng(9);
  Tensor<double> logits({50, 4});
  oracle::fill_normal(logits.data, rng, 30.0);
  const auto p = softmax(logits);
  for (std::size_t r = 0; r < 50; ++r) {
    double s = 0;
    for (std::size_t k = 0; k < 4; ++k) {
      CHECK(p.data[r * 4 + k] > 0.0);
      s += p.data[r * 4 + k];
    }
    CHECK(std::abs(s - 1.0) < 1e-12);
  }
}

TEST_CASE("xent gradient is (probs - onehot) / b") {
  Tensor<double> logits({2, 3}, std::vector<double>{0.1, 0.2, 0.3, -1.0, 0.0, 1.0});
  const std::vector<int> y{1, 2};
  const auto r = softmax_xent(logits, y);
  const auto g = softmax_xent_backward(r.probs, y);
  for (std::size_t i = 0; i < 2; ++i) {
    for (std::size_t k = 0; k < 3; ++k) {
      const double onehot = static_cast<int>(k) == y[i] ? 1.0 : 0.0;
      CHECK(g.data[i * 3 + k] == doctest::Approx((r.probs.data[i * 3 + k] - onehot) / 2.0));
    }
  }
}

TEST_CASE("adam: zero gradients leave parameters fixed, moments decay") {
  Param<double> p("p", {3});
  p.value = {1.0, -2.0, 0.5};
  AdamState<double> st;
  Param<double>* ps[] = {&p};
  p.grad = {1.0, 1.0, 1.0};
  adam_step<double>(ps, st);
  const auto after_first = p.value;
  const auto m1 = st.first_moment[0];
  p.grad = {0.0, 0.0, 0.0};
  adam_step<double>(ps, st);
  CHECK(st.step_count == 2);
  for (std::size_t i = 0; i < 3; ++i) CHECK(st.first_moment[0][i] == doctest::Approx(0.9 * m1[i]));

  Param<double> q("q", {2});
  q.value = {3.0, 4.0};
  AdamState<double> fresh;
  Param<double>* qs[] = {&q};
  for (int step = 0; step < 3; ++step) adam_step<double>(qs, fresh);
  CHECK(q.value == std::vector<double>{3.0, 4.0});
  (void)after_first;
}

TEST_CASE("adam: first step with g=1 moves by -lr") {
  Param<double> p("p", {1});
  p.value = {0.0};
  p.grad = {1.0};
  AdamState<double> st;
  Param<double>* ps[] = {&p};
  adam_step<double>(ps, st);
  CHECK(p.value[0] == doctest::Approx(-0.001).epsilon(1e-6));
}

TEST_CASE("adam: two steps with a fixed gradient follow the hand-unrolled recurrence") {
  const double g = 0.5, lr = 1e-3, b1 = 0.9, b2 = 0.999, eps = 1e-8;
  // Step 1: m = 0.05, v = 0.00025; bias-corrected m = 0.5, v = 0.25.
  const double p1 = 1.0 - lr * (0.05 / (1 - b1)) / (std::sqrt(0.00025 / (1 - b2)) + eps);
  // Step 2: m = 0.9 * 0.05 + 0.1 * 0.5 = 0.095, v = 0.999 * 0.00025 + 0.001 * 0.25 = 0.00049975.
  const double p2 = p1 - lr * (0.095 / (1 - b1 * b1)) / (std::sqrt(0.00049975 / (1 - b2 * b2)) + eps);

  Param<double> p("p", {1});
  p.value = {1.0};
  AdamState<double> st;
  Param<double>* ps[] = {&p};
  p.grad = {g};
  adam_step<double>(ps, st);
  CHECK(p.value[0] == doctest::Approx(p1).epsilon(1e-14));
  p.grad = {g};
  adam_step<double>(ps, st);
  CHECK(p.value[0] == doctest::Approx(p2).epsilon(1e-14));
  CHECK(st.first_moment[0][0] == doctest::Approx(0.095).epsilon(1e-14));
  CHECK(st.second_moment[0][0] == doctest::Approx(0.00049975).epsilon(1e-14));
}

TEST_CASE("lstm consumes any sequence length") {
  Lstm<double> cell("lstm", 3, 5);
  Rng rng(1);
  cell.init(rng);
  CHECK(cell.forward(Tensor<double>({4, 5, 3}, 0.1)).shape == std::vector<std::size_t>{4, 5});
  CHECK(cell.forward(Tensor<double>({2, 1, 3}, 0.1)).shape == std::vector<std::size_t>{2, 5});
  for (std::size_t h = 5; h < 10; ++h) CHECK(cell.bias.value[h] == 1.0);
}

TEST_CASE("checkpoint round trip is exact and little-endian") {
  oracle::TempDir dir("ckpt");
  Checkpoint c;
  c.precision = Precision::F32;
  c.seed = 42;
  c.arrays.push_back({"a.weights", {2, 2}, {1.0, -0.5, 1e-300, 3.25}});
  c.arrays.push_back({"a.bias", {2}, {0.0, 7.0}});
  save_checkpoint(c, dir.path());
  CHECK(load_checkpoint(dir.path()) == c);

  std::ifstream in(dir.path() / "params.bin", std::ios::binary);
  unsigned char bytes[8];
  in.read(reinterpret_cast<char*>(bytes), 8);
  // 1.0 = 0x3FF0000000000000, least-significant byte first.
  CHECK(bytes[0] == 0x00);
  CHECK(bytes[7] == 0x3F);
  CHECK(bytes[6] == 0xF0);
  CHECK(std::filesystem::file_size(dir.path() / "params.bin") == 6 * 8);
}

TEST_CASE("32-bit layers agree with 64-bit within single precision") {
  Rng rng(4);
  Tensor<double> x({2, 5, 2});
  oracle::fill_normal(x.data, rng);
  Param<double> k("k", {3, 2, 2}), b("b", {2});
  oracle::fill_normal(k.value, rng);
  const auto y = conv1d_forward(x, k, b);

  Tensor<float> xf({2, 5, 2}, std::vector<float>(x.data.begin(), x.data.end()));
  Param<float> kf("k", {3, 2, 2}), bf("b", {2});
  kf.value.assign(k.value.begin(), k.value.end());
  const auto yf = conv1d_forward(xf, kf, bf);
  for (std::size_t i = 0; i < y.size(); ++i) CHECK(yf.data[i] == doctest::Approx(y.data[i]).epsilon(1e-5));
}
