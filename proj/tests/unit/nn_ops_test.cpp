#include <cmath>
#include <functional>
#include <random>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "opr/errors.hpp"
#include "opr/nn/graph.hpp"
#include "opr/nn/ops.hpp"

namespace {

using opr::nn::Graph;
using opr::nn::Tensor;
using opr::nn::Var;

Tensor randn(std::vector<int> shape, std::mt19937_64& rng) {
  Tensor t(std::move(shape));
  std::normal_distribution<double> n(0, 1);
  for (double& v : t.values()) v = n(rng);
  return t;
}

// Reduces an op's output to a scalar with fixed random weights so every
// output element contributes to the checked gradient.
using Op = std::function<Var(Graph&, const std::vector<Var>&)>;

double max_grad_error(const Op& op, const std::vector<Tensor>& inputs, std::uint64_t seed = 1) {
  std::mt19937_64 rng(seed);
  Tensor probe;
  auto scalar = [&](Graph& g, const std::vector<Var>& vs) {
    Var y = op(g, vs);
    if (probe.empty()) probe = randn(g.value(y).shape(), rng);
    return opr::nn::sum_all(g, opr::nn::mul(g, y, g.constant(probe)));
  };
  Graph g;
  std::vector<Var> vars;
  for (const Tensor& t : inputs) vars.push_back(g.leaf(t));
  g.backward(scalar(g, vars));
  double worst = 0;
  for (std::size_t k = 0; k < inputs.size(); ++k) {
    std::vector<std::size_t> coords(inputs[k].size());
    for (std::size_t i = 0; i < coords.size(); ++i) coords[i] = i;
    auto fd = oracle::central_diff(
        [&](const Tensor& x) {
          Graph h(false);
          std::vector<Var> vs;
          for (std::size_t j = 0; j < inputs.size(); ++j) vs.push_back(h.constant(j == k ? x : inputs[j]));
          return h.value(scalar(h, vs)).item();
        },
        inputs[k], coords);
    for (std::size_t i = 0; i < coords.size(); ++i) {
      // FD roundoff is ~1e-11 absolute, so tiny entries are compared absolutely
      worst = std::max(worst, oracle::rel_error(g.grad(vars[k])[i], fd[i], 1e-4));
    }
  }
  return worst;
}

class NnOps : public ::testing::Test {
 protected:
  std::mt19937_64 rng{7};
};

TEST_F(NnOps, ElementwiseGradients) {
  const Tensor a = randn({3, 2, 2}, rng), b = randn({3, 2, 2}, rng);
  EXPECT_LT(max_grad_error([](Graph& g, auto& v) { return opr::nn::silu(g, v[0]); }, {a}), 1e-6);
  EXPECT_LT(max_grad_error([](Graph& g, auto& v) { return opr::nn::sigmoid(g, v[0]); }, {a}), 1e-6);
  EXPECT_LT(max_grad_error([](Graph& g, auto& v) { return opr::nn::tanh(g, v[0]); }, {a}), 1e-6);
  EXPECT_LT(max_grad_error([](Graph& g, auto& v) { return opr::nn::mul(g, v[0], v[1]); }, {a, b}), 1e-6);
  EXPECT_LT(max_grad_error([](Graph& g, auto& v) { return opr::nn::mix(g, v[0], v[1], 0.3); }, {a, b}), 1e-6);
  EXPECT_LT(max_grad_error([](Graph& g, auto& v) { return opr::nn::sub(g, v[0], v[1]); }, {a, b}), 1e-6);
}

TEST_F(NnOps, ConvolutionGradients) {
  const Tensor x = randn({5, 5, 2}, rng), w = randn({3, 3, 2, 3}, rng), b = randn({3}, rng);
  for (int stride : {1, 2}) {
    EXPECT_LT(max_grad_error([stride](Graph& g, auto& v) { return opr::nn::conv2d(g, v[0], v[1], v[2], stride, 1); },
                             {x, w, b}),
              1e-6)
        << "stride " << stride;
  }
  const Tensor w1 = randn({1, 1, 2, 2}, rng), b1 = randn({2}, rng);
  EXPECT_LT(max_grad_error([](Graph& g, auto& v) { return opr::nn::conv2d(g, v[0], v[1], v[2], 1, 0); }, {x, w1, b1}),
            1e-6);
}

TEST_F(NnOps, ConvolutionMatchesDirectSum) {
  const Tensor x = randn({4, 4, 2}, rng), w = randn({3, 3, 2, 1}, rng);
  Graph g(false);
  const Tensor& y = g.value(opr::nn::conv2d(g, g.constant(x), g.constant(w), g.constant(Tensor({1}, 0.5)), 2, 1));
  ASSERT_EQ(y.shape(), (std::vector<int>{2, 2, 1}));
  for (int oy = 0; oy < 2; ++oy) {
    for (int ox = 0; ox < 2; ++ox) {
      double s = 0.5;
      for (int ky = 0; ky < 3; ++ky) {
        for (int kx = 0; kx < 3; ++kx) {
          const int iy = oy * 2 + ky - 1, ix = ox * 2 + kx - 1;
          if (iy < 0 || ix < 0 || iy >= 4 || ix >= 4) continue;
          for (int c = 0; c < 2; ++c) s += x.at(iy, ix, c) * w[((ky * 3 + kx) * 2 + c) * 1];
        }
      }
      EXPECT_NEAR(y.at(oy, ox, 0), s, 1e-12);
    }
  }
}

TEST_F(NnOps, DenseAndReductionGradients) {
  const Tensor x = randn({4}, rng), w = randn({3, 4}, rng), b = randn({3}, rng);
  EXPECT_LT(max_grad_error([](Graph& g, auto& v) { return opr::nn::linear(g, v[0], v[1], v[2]); }, {x, w, b}), 1e-6);
  EXPECT_LT(max_grad_error([](Graph& g, auto& v) { return opr::nn::softmax(g, v[0]); }, {x}), 1e-6);
  const Tensor f = randn({2, 3, 4}, rng), f2 = randn({2, 3, 4}, rng);
  EXPECT_LT(max_grad_error([](Graph& g, auto& v) { return opr::nn::global_avg_pool(g, v[0]); }, {f}), 1e-6);
  EXPECT_LT(max_grad_error([](Graph& g, auto& v) { return opr::nn::broadcast_hw(g, v[0], 2, 3); }, {x}), 1e-6);
  EXPECT_LT(max_grad_error([](Graph& g, auto& v) { return opr::nn::concat_channels(g, v[0], v[1]); }, {f, f2}), 1e-6);
  EXPECT_LT(max_grad_error([](Graph& g, auto& v) { return opr::nn::frobenius_norm(g, v[0]); }, {f}), 1e-6);
  EXPECT_LT(max_grad_error([](Graph& g, auto& v) { return opr::nn::layer_norm(g, v[0]); }, {f}), 1e-5);
  EXPECT_LT(max_grad_error([](Graph& g, auto& v) { return opr::nn::reshape(g, v[0], {6, 4}); }, {f}), 1e-6);
  EXPECT_LT(max_grad_error([](Graph& g, auto& v) { return opr::nn::element(g, v[0], 2); }, {x}), 1e-6);
  EXPECT_LT(max_grad_error([](Graph& g, auto& v) { return opr::nn::concat(g, {v[0], v[1]}); }, {x, b}), 1e-6);
}

TEST_F(NnOps, CrossEntropyGradients) {
  Tensor p({3}, std::vector<double>{0.2, 0.7, 0.45});
  EXPECT_LT(max_grad_error(
                [](Graph& g, auto& v) { return opr::nn::binary_cross_entropy(g, v[0], {0.0, 1.0, 0.3}, 1e-7); }, {p}),
            1e-6);
  Tensor q({4}, std::vector<double>{0.1, 0.2, 0.3, 0.4});
  EXPECT_LT(max_grad_error(
                [](Graph& g, auto& v) {
                  return opr::nn::categorical_cross_entropy(g, v[0], {0.0, 0.5, 0.5, 0.0}, 1e-7);
                },
                {q}),
            1e-6);
}

TEST_F(NnOps, BinaryCrossEntropyValue) {
  Graph g(false);
  const double got = g.value(opr::nn::binary_cross_entropy(g, g.constant(Tensor({2}, std::vector<double>{0.25, 0.9})),
                                                          {0.0, 1.0}, 1e-7))
                         .item();
  EXPECT_NEAR(got, -(std::log(0.75) + std::log(0.9)) / 2, 1e-15);
}

TEST_F(NnOps, LayerNormStandardizes) {
  Graph g(false);
  const Tensor& y = g.value(opr::nn::layer_norm(g, g.constant(randn({3, 3, 5}, rng)), 0.0));
  double mean = 0, var = 0;
  for (double v : y.values()) mean += v;
  mean /= static_cast<double>(y.size());
  for (double v : y.values()) var += (v - mean) * (v - mean);
  var /= static_cast<double>(y.size());
  EXPECT_NEAR(mean, 0.0, 1e-12);
  EXPECT_NEAR(var, 1.0, 1e-12);
}

TEST_F(NnOps, DetachBlocksGradient) {
  Graph g;
  Var x = g.leaf(Tensor({2}, 3.0));
  Var y = opr::nn::add(g, opr::nn::detach(g, x), x);
  g.backward(opr::nn::sum_all(g, y));
  EXPECT_EQ(g.grad(x)[0], 1.0);
  EXPECT_EQ(g.grad(x)[1], 1.0);
}

TEST_F(NnOps, ReusedParameterSumsGradients) {
  opr::nn::Parameter p("p", Tensor({1}, 2.0));
  Graph g;
  Var a = g.param(p), b = g.param(p);
  EXPECT_EQ(a.id, b.id);
  g.backward(opr::nn::sum_all(g, opr::nn::mul(g, a, b)));  // d(p^2)/dp
  EXPECT_DOUBLE_EQ(p.grad[0], 4.0);
}

TEST_F(NnOps, ShapeMismatchThrows) {
  Graph g(false);
  EXPECT_THROW(opr::nn::add(g, g.constant(Tensor({2})), g.constant(Tensor({3}))), opr::ShapeMismatchError);
  Graph h;
  EXPECT_THROW(h.backward(h.leaf(Tensor({2}))), opr::ShapeMismatchError);
}

}  // namespace
