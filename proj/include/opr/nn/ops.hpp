#pragma once

#include <vector>

#include "opr/nn/graph.hpp"

// Differentiable operations recorded on a Graph. Shapes follow the Tensor
// conventions: feature maps (h, w, c), vectors (n), linear weights (out, in),
// convolution kernels (k, k, in, out).
namespace opr::nn {

Var add(Graph& g, Var a, Var b);
Var sub(Graph& g, Var a, Var b);
Var mul(Graph& g, Var a, Var b);
Var scale(Graph& g, Var a, double s);
// alpha * a + (1 - alpha) * b
Var mix(Graph& g, Var a, Var b, double alpha);

Var silu(Graph& g, Var x);
Var sigmoid(Graph& g, Var x);
Var tanh(Graph& g, Var x);

// Square kernel, zero padding. x: (H, W, Cin), w: (k, k, Cin, Cout), b: (Cout).
Var conv2d(Graph& g, Var x, Var w, Var b, int stride, int pad);
// x: (n), w: (m, n), b: (m) -> (m)
Var linear(Graph& g, Var x, Var w, Var b);
Var softmax(Graph& g, Var x);

// (H, W, C) -> (C)
Var global_avg_pool(Graph& g, Var x);
// (C) -> (H, W, C)
Var broadcast_hw(Graph& g, Var x, int h, int w);
Var concat_channels(Graph& g, Var a, Var b);
// Concatenates rank-1 tensors.
Var concat(Graph& g, const std::vector<Var>& parts);
Var reshape(Graph& g, Var x, std::vector<int> shape);
// Single element as a (1) tensor.
Var element(Graph& g, Var x, int index);

// Parameter-free standardization over every element of x:
// (x - mean) / sqrt(var + eps), population variance.
Var layer_norm(Graph& g, Var x, double eps = 1e-5);

// Gradient stops here.
Var detach(Graph& g, Var x);

// Scalar reductions, all producing (1) tensors.
Var sum_all(Graph& g, Var x);
Var frobenius_norm(Graph& g, Var x);
Var mean_of(Graph& g, const std::vector<Var>& scalars);

// Binary cross-entropy of probabilities against soft targets, averaged over
// elements. Probabilities are clamped to [eps, 1 - eps]; no gradient flows
// through the clamp where it is active.
Var binary_cross_entropy(Graph& g, Var probs, const std::vector<double>& targets, double eps);
// -sum_k t_k log p_k with the same clamping rule.
Var categorical_cross_entropy(Graph& g, Var probs, const std::vector<double>& targets, double eps);

}  // namespace opr::nn
