#include "opr/nn/ops.hpp"

#include <algorithm>
#include <cmath>

#include "opr/errors.hpp"

namespace opr::nn {
namespace {

double sigmoid_scalar(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

void require_rank(const Tensor& t, int rank, const char* op) {
  if (t.rank() != rank) {
    throw ShapeMismatchError(std::string(op) + ": expected rank " + std::to_string(rank) +
                             ", got shape " + shape_string(t.shape()));
  }
}

}  // namespace

Var add(Graph& g, Var a, Var b) {
  require_same_shape(g.value(a), g.value(b), "add");
  Tensor out = g.value(a);
  const Tensor& bv = g.value(b);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += bv[i];
  Var y{static_cast<int>(g.node_count())};
  return g.record(std::move(out), {a, b}, [a, b, y](Graph& gr) {
    const Tensor& go = gr.grad(y);
    for (Var in : {a, b}) {
      if (!gr.requires_grad(in)) continue;
      Tensor& gi = gr.mutable_grad(in);
      for (std::size_t i = 0; i < go.size(); ++i) gi[i] += go[i];
    }
  });
}

Var sub(Graph& g, Var a, Var b) {
  require_same_shape(g.value(a), g.value(b), "sub");
  Tensor out = g.value(a);
  const Tensor& bv = g.value(b);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] -= bv[i];
  Var y{static_cast<int>(g.node_count())};
  return g.record(std::move(out), {a, b}, [a, b, y](Graph& gr) {
    const Tensor& go = gr.grad(y);
    if (gr.requires_grad(a)) {
      Tensor& ga = gr.mutable_grad(a);
      for (std::size_t i = 0; i < go.size(); ++i) ga[i] += go[i];
    }
    if (gr.requires_grad(b)) {
      Tensor& gb = gr.mutable_grad(b);
      for (std::size_t i = 0; i < go.size(); ++i) gb[i] -= go[i];
    }
  });
}

Var mul(Graph& g, Var a, Var b) {
  require_same_shape(g.value(a), g.value(b), "mul");
  Tensor out = g.value(a);
  const Tensor& bv = g.value(b);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= bv[i];
  Var y{static_cast<int>(g.node_count())};
  return g.record(std::move(out), {a, b}, [a, b, y](Graph& gr) {
    const Tensor& go = gr.grad(y);
    const Tensor& av = gr.value(a);
    const Tensor& bv2 = gr.value(b);
    if (gr.requires_grad(a)) {
      Tensor& ga = gr.mutable_grad(a);
      for (std::size_t i = 0; i < go.size(); ++i) ga[i] += go[i] * bv2[i];
    }
    if (gr.requires_grad(b)) {
      Tensor& gb = gr.mutable_grad(b);
      for (std::size_t i = 0; i < go.size(); ++i) gb[i] += go[i] * av[i];
    }
  });
}

Var scale(Graph& g, Var a, double s) {
  Tensor out = g.value(a);
  for (double& v : out.values()) v *= s;
  Var y{static_cast<int>(g.node_count())};
  return g.record(std::move(out), {a}, [a, y, s](Graph& gr) {
    const Tensor& go = gr.grad(y);
    Tensor& ga = gr.mutable_grad(a);
    for (std::size_t i = 0; i < go.size(); ++i) ga[i] += s * go[i];
  });
}

Var mix(Graph& g, Var a, Var b, double alpha) {
  require_same_shape(g.value(a), g.value(b), "mix");
  const Tensor& av = g.value(a);
  const Tensor& bv = g.value(b);
  Tensor out(av.shape());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = alpha * av[i] + (1.0 - alpha) * bv[i];
  Var y{static_cast<int>(g.node_count())};
  return g.record(std::move(out), {a, b}, [a, b, y, alpha](Graph& gr) {
    const Tensor& go = gr.grad(y);
    if (gr.requires_grad(a)) {
      Tensor& ga = gr.mutable_grad(a);
      for (std::size_t i = 0; i < go.size(); ++i) ga[i] += alpha * go[i];
    }
    if (gr.requires_grad(b)) {
      Tensor& gb = gr.mutable_grad(b);
      for (std::size_t i = 0; i < go.size(); ++i) gb[i] += (1.0 - alpha) * go[i];
    }
  });
}

Var silu(Graph& g, Var x) {
  const Tensor& xv = g.value(x);
  Tensor out(xv.shape());
  for (std::size_t i = 0; i < xv.size(); ++i) out[i] = xv[i] * sigmoid_scalar(xv[i]);
  Var y{static_cast<int>(g.node_count())};
  return g.record(std::move(out), {x}, [x, y](Graph& gr) {
    const Tensor& go = gr.grad(y);
    const Tensor& xv2 = gr.value(x);
    Tensor& gx = gr.mutable_grad(x);
    for (std::size_t i = 0; i < go.size(); ++i) {
      const double s = sigmoid_scalar(xv2[i]);
      gx[i] += go[i] * (s + xv2[i] * s * (1.0 - s));
    }
  });
}

Var sigmoid(Graph& g, Var x) {
  const Tensor& xv = g.value(x);
  Tensor out(xv.shape());
  for (std::size_t i = 0; i < xv.size(); ++i) out[i] = sigmoid_scalar(xv[i]);
  Var y{static_cast<int>(g.node_count())};
  return g.record(std::move(out), {x}, [x, y](Graph& gr) {
    const Tensor& go = gr.grad(y);
    const Tensor& yv = gr.value(y);
    Tensor& gx = gr.mutable_grad(x);
    for (std::size_t i = 0; i < go.size(); ++i) gx[i] += go[i] * yv[i] * (1.0 - yv[i]);
  });
}

Var tanh(Graph& g, Var x) {
  const Tensor& xv = g.value(x);
  Tensor out(xv.shape());
  for (std::size_t i = 0; i < xv.size(); ++i) out[i] = std::tanh(xv[i]);
  Var y{static_cast<int>(g.node_count())};
  return g.record(std::move(out), {x}, [x, y](Graph& gr) {
    const Tensor& go = gr.grad(y);
    const Tensor& yv = gr.value(y);
    Tensor& gx = gr.mutable_grad(x);
    for (std::size_t i = 0; i < go.size(); ++i) gx[i] += go[i] * (1.0 - yv[i] * yv[i]);
  });
}

Var conv2d(Graph& g, Var x, Var w, Var b, int stride, int pad) {
  const Tensor& xv = g.value(x);
  const Tensor& wv = g.value(w);
  const Tensor& bv = g.value(b);
  require_rank(xv, 3, "conv2d input");
  require_rank(wv, 4, "conv2d kernel");
  const int H = xv.dim(0), W = xv.dim(1), Ci = xv.dim(2);
  const int K = wv.dim(0), Co = wv.dim(3);
  if (wv.dim(1) != K || wv.dim(2) != Ci || bv.size() != static_cast<std::size_t>(Co)) {
    throw ShapeMismatchError("conv2d: kernel " + shape_string(wv.shape()) + " / bias " +
                             shape_string(bv.shape()) + " incompatible with input " +
                             shape_string(xv.shape()));
  }
  const int Ho = (H + 2 * pad - K) / stride + 1;
  const int Wo = (W + 2 * pad - K) / stride + 1;
  Tensor out({Ho, Wo, Co});
  const double* xd = xv.data();
  const double* wd = wv.data();
  double* od = out.data();
  for (int oy = 0; oy < Ho; ++oy) {
    for (int ox = 0; ox < Wo; ++ox) {
      double* o = od + (static_cast<std::size_t>(oy) * Wo + ox) * Co;
      for (int co = 0; co < Co; ++co) o[co] = bv[static_cast<std::size_t>(co)];
      for (int ky = 0; ky < K; ++ky) {
        const int iy = oy * stride - pad + ky;
        if (iy < 0 || iy >= H) continue;
        for (int kx = 0; kx < K; ++kx) {
          const int ix = ox * stride - pad + kx;
          if (ix < 0 || ix >= W) continue;
          const double* xp = xd + (static_cast<std::size_t>(iy) * W + ix) * Ci;
          const double* wp = wd + (static_cast<std::size_t>(ky) * K + kx) * Ci * Co;
          for (int ci = 0; ci < Ci; ++ci) {
            const double xval = xp[ci];
            const double* wrow = wp + static_cast<std::size_t>(ci) * Co;
            for (int co = 0; co < Co; ++co) o[co] += xval * wrow[co];
          }
        }
      }
    }
  }
  Var y{static_cast<int>(g.node_count())};
  return g.record(std::move(out), {x, w, b}, [=](Graph& gr) {
    const Tensor& go = gr.grad(y);
    const Tensor& xv2 = gr.value(x);
    const Tensor& wv2 = gr.value(w);
    const bool need_x = gr.requires_grad(x);
    const bool need_w = gr.requires_grad(w);
    const bool need_b = gr.requires_grad(b);
    double* gx = need_x ? gr.mutable_grad(x).data() : nullptr;
    double* gw = need_w ? gr.mutable_grad(w).data() : nullptr;
    double* gb = need_b ? gr.mutable_grad(b).data() : nullptr;
    const double* xd2 = xv2.data();
    const double* wd2 = wv2.data();
    const double* god = go.data();
    for (int oy = 0; oy < Ho; ++oy) {
      for (int ox = 0; ox < Wo; ++ox) {
        const double* gop = god + (static_cast<std::size_t>(oy) * Wo + ox) * Co;
        if (gb) {
          for (int co = 0; co < Co; ++co) gb[co] += gop[co];
        }
        for (int ky = 0; ky < K; ++ky) {
          const int iy = oy * stride - pad + ky;
          if (iy < 0 || iy >= H) continue;
          for (int kx = 0; kx < K; ++kx) {
            const int ix = ox * stride - pad + kx;
            if (ix < 0 || ix >= W) continue;
            const std::size_t xoff = (static_cast<std::size_t>(iy) * W + ix) * Ci;
            const std::size_t woff = (static_cast<std::size_t>(ky) * K + kx) * Ci * Co;
            for (int ci = 0; ci < Ci; ++ci) {
              const double* wrow = wd2 + woff + static_cast<std::size_t>(ci) * Co;
              if (gx) {
                double acc = 0.0;
                for (int co = 0; co < Co; ++co) acc += gop[co] * wrow[co];
                gx[xoff + ci] += acc;
              }
              if (gw) {
                const double xval = xd2[xoff + ci];
                double* gwrow = gw + woff + static_cast<std::size_t>(ci) * Co;
                for (int co = 0; co < Co; ++co) gwrow[co] += xval * gop[co];
              }
            }
          }
        }
      }
    }
  });
}

Var linear(Graph& g, Var x, Var w, Var b) {
  const Tensor& xv = g.value(x);
  const Tensor& wv = g.value(w);
  const Tensor& bv = g.value(b);
  require_rank(wv, 2, "linear weight");
  const int M = wv.dim(0), N = wv.dim(1);
  if (xv.size() != static_cast<std::size_t>(N) || bv.size() != static_cast<std::size_t>(M)) {
    throw ShapeMismatchError("linear: weight " + shape_string(wv.shape()) + " vs input " +
                             shape_string(xv.shape()));
  }
  Tensor out({M});
  for (int m = 0; m < M; ++m) {
    double acc = bv[static_cast<std::size_t>(m)];
    const double* row = wv.data() + static_cast<std::size_t>(m) * N;
    for (int n = 0; n < N; ++n) acc += row[n] * xv[static_cast<std::size_t>(n)];
    out[static_cast<std::size_t>(m)] = acc;
  }
  Var y{static_cast<int>(g.node_count())};
  return g.record(std::move(out), {x, w, b}, [=](Graph& gr) {
    const Tensor& go = gr.grad(y);
    const Tensor& xv2 = gr.value(x);
    const Tensor& wv2 = gr.value(w);
    if (gr.requires_grad(x)) {
      Tensor& gx = gr.mutable_grad(x);
      for (int m = 0; m < M; ++m) {
        const double* row = wv2.data() + static_cast<std::size_t>(m) * N;
        for (int n = 0; n < N; ++n) gx[static_cast<std::size_t>(n)] += go[static_cast<std::size_t>(m)] * row[n];
      }
    }
    if (gr.requires_grad(w)) {
      Tensor& gw = gr.mutable_grad(w);
      for (int m = 0; m < M; ++m) {
        double* row = gw.data() + static_cast<std::size_t>(m) * N;
        for (int n = 0; n < N; ++n) row[n] += go[static_cast<std::size_t>(m)] * xv2[static_cast<std::size_t>(n)];
      }
    }
    if (gr.requires_grad(b)) {
      Tensor& gb = gr.mutable_grad(b);
      for (int m = 0; m < M; ++m) gb[static_cast<std::size_t>(m)] += go[static_cast<std::size_t>(m)];
    }
  });
}

Var softmax(Graph& g, Var x) {
  const Tensor& xv = g.value(x);
  Tensor out(xv.shape());
  double mx = -INFINITY;
  for (double v : xv.values()) mx = std::max(mx, v);
  double z = 0.0;
  for (std::size_t i = 0; i < xv.size(); ++i) {
    out[i] = std::exp(xv[i] - mx);
    z += out[i];
  }
  for (double& v : out.values()) v /= z;
  Var y{static_cast<int>(g.node_count())};
  return g.record(std::move(out), {x}, [x, y](Graph& gr) {
    const Tensor& go = gr.grad(y);
    const Tensor& yv = gr.value(y);
    double dot = 0.0;
    for (std::size_t i = 0; i < yv.size(); ++i) dot += go[i] * yv[i];
    Tensor& gx = gr.mutable_grad(x);
    for (std::size_t i = 0; i < yv.size(); ++i) gx[i] += yv[i] * (go[i] - dot);
  });
}

Var global_avg_pool(Graph& g, Var x) {
  const Tensor& xv = g.value(x);
  require_rank(xv, 3, "global_avg_pool");
  const int H = xv.dim(0), W = xv.dim(1), C = xv.dim(2);
  const double inv = 1.0 / (static_cast<double>(H) * W);
  Tensor out({C});
  for (std::size_t p = 0; p < static_cast<std::size_t>(H) * W; ++p)
    for (int c = 0; c < C; ++c) out[static_cast<std::size_t>(c)] += xv[p * C + c];
  for (double& v : out.values()) v *= inv;
  Var y{static_cast<int>(g.node_count())};
  return g.record(std::move(out), {x}, [x, y, H, W, C, inv](Graph& gr) {
    const Tensor& go = gr.grad(y);
    Tensor& gx = gr.mutable_grad(x);
    for (std::size_t p = 0; p < static_cast<std::size_t>(H) * W; ++p)
      for (int c = 0; c < C; ++c) gx[p * C + c] += go[static_cast<std::size_t>(c)] * inv;
  });
}

Var broadcast_hw(Graph& g, Var x, int h, int w) {
  const Tensor& xv = g.value(x);
  require_rank(xv, 1, "broadcast_hw");
  const int C = xv.dim(0);
  Tensor out({h, w, C});
  for (std::size_t p = 0; p < static_cast<std::size_t>(h) * w; ++p)
    for (int c = 0; c < C; ++c) out[p * C + c] = xv[static_cast<std::size_t>(c)];
  Var y{static_cast<int>(g.node_count())};
  return g.record(std::move(out), {x}, [x, y, h, w, C](Graph& gr) {
    const Tensor& go = gr.grad(y);
    Tensor& gx = gr.mutable_grad(x);
    for (std::size_t p = 0; p < static_cast<std::size_t>(h) * w; ++p)
      for (int c = 0; c < C; ++c) gx[static_cast<std::size_t>(c)] += go[p * C + c];
  });
}

Var concat_channels(Graph& g, Var a, Var b) {
  const Tensor& av = g.value(a);
  const Tensor& bv = g.value(b);
  require_rank(av, 3, "concat_channels");
  require_rank(bv, 3, "concat_channels");
  if (av.dim(0) != bv.dim(0) || av.dim(1) != bv.dim(1)) {
    throw ShapeMismatchError("concat_channels: " + shape_string(av.shape()) + " vs " +
                             shape_string(bv.shape()));
  }
  const int H = av.dim(0), W = av.dim(1), Ca = av.dim(2), Cb = bv.dim(2);
  Tensor out({H, W, Ca + Cb});
  for (std::size_t p = 0; p < static_cast<std::size_t>(H) * W; ++p) {
    for (int c = 0; c < Ca; ++c) out[p * (Ca + Cb) + c] = av[p * Ca + c];
    for (int c = 0; c < Cb; ++c) out[p * (Ca + Cb) + Ca + c] = bv[p * Cb + c];
  }
  Var y{static_cast<int>(g.node_count())};
  return g.record(std::move(out), {a, b}, [=](Graph& gr) {
    const Tensor& go = gr.grad(y);
    const std::size_t P = static_cast<std::size_t>(H) * W;
    if (gr.requires_grad(a)) {
      Tensor& ga = gr.mutable_grad(a);
      for (std::size_t p = 0; p < P; ++p)
        for (int c = 0; c < Ca; ++c) ga[p * Ca + c] += go[p * (Ca + Cb) + c];
    }
    if (gr.requires_grad(b)) {
      Tensor& gb = gr.mutable_grad(b);
      for (std::size_t p = 0; p < P; ++p)
        for (int c = 0; c < Cb; ++c) gb[p * Cb + c] += go[p * (Ca + Cb) + Ca + c];
    }
  });
}

Var concat(Graph& g, const std::vector<Var>& parts) {
  std::vector<double> data;
  std::vector<std::size_t> sizes;
  for (Var p : parts) {
    const Tensor& v = g.value(p);
    data.insert(data.end(), v.values().begin(), v.values().end());
    sizes.push_back(v.size());
  }
  const int n = static_cast<int>(data.size());
  Var y{static_cast<int>(g.node_count())};
  return g.record(Tensor({n}, std::move(data)), parts, [parts, sizes, y](Graph& gr) {
    const Tensor& go = gr.grad(y);
    std::size_t off = 0;
    for (std::size_t k = 0; k < parts.size(); ++k) {
      if (gr.requires_grad(parts[k])) {
        Tensor& gp = gr.mutable_grad(parts[k]);
        for (std::size_t i = 0; i < sizes[k]; ++i) gp[i] += go[off + i];
      }
      off += sizes[k];
    }
  });
}

Var reshape(Graph& g, Var x, std::vector<int> shape) {
  Tensor out = g.value(x).reshaped(std::move(shape));
  Var y{static_cast<int>(g.node_count())};
  return g.record(std::move(out), {x}, [x, y](Graph& gr) {
    const Tensor& go = gr.grad(y);
    Tensor& gx = gr.mutable_grad(x);
    for (std::size_t i = 0; i < go.size(); ++i) gx[i] += go[i];
  });
}

Var element(Graph& g, Var x, int index) {
  const Tensor& xv = g.value(x);
  if (index < 0 || static_cast<std::size_t>(index) >= xv.size()) {
    throw ShapeMismatchError("element: index " + std::to_string(index) + " out of range for " +
                             shape_string(xv.shape()));
  }
  Var y{static_cast<int>(g.node_count())};
  return g.record(Tensor::scalar(xv[static_cast<std::size_t>(index)]), {x}, [x, y, index](Graph& gr) {
    gr.mutable_grad(x)[static_cast<std::size_t>(index)] += gr.grad(y)[0];
  });
}

Var detach(Graph& g, Var x) { return g.constant(g.value(x)); }

Var sum_all(Graph& g, Var x) {
  Var y{static_cast<int>(g.node_count())};
  return g.record(Tensor::scalar(g.value(x).sum()), {x}, [x, y](Graph& gr) {
    const double go = gr.grad(y)[0];
    for (double& v : gr.mutable_grad(x).values()) v += go;
  });
}

Var layer_norm(Graph& g, Var x, double eps) {
  const Tensor& xv = g.value(x);
  const double n = static_cast<double>(xv.size());
  double mean = 0.0;
  for (double v : xv.values()) mean += v;
  mean /= n;
  double var = 0.0;
  for (double v : xv.values()) var += (v - mean) * (v - mean);
  var /= n;
  const double inv = 1.0 / std::sqrt(var + eps);
  Tensor out(xv.shape());
  for (std::size_t i = 0; i < xv.size(); ++i) out[i] = (xv[i] - mean) * inv;
  Var y{static_cast<int>(g.node_count())};
  return g.record(std::move(out), {x}, [x, y, inv, n](Graph& gr) {
    // dx = inv * (go - mean(go) - y * mean(go * y))
    const Tensor& go = gr.grad(y);
    const Tensor& yv = gr.value(y);
    double mg = 0.0, mgy = 0.0;
    for (std::size_t i = 0; i < go.size(); ++i) {
      mg += go[i];
      mgy += go[i] * yv[i];
    }
    mg /= n;
    mgy /= n;
    Tensor& gx = gr.mutable_grad(x);
    for (std::size_t i = 0; i < go.size(); ++i) gx[i] += inv * (go[i] - mg - yv[i] * mgy);
  });
}

Var frobenius_norm(Graph& g, Var x) {
  const Tensor& xv = g.value(x);
  double ss = 0.0;
  for (double v : xv.values()) ss += v * v;
  const double norm = std::sqrt(ss);
  Var y{static_cast<int>(g.node_count())};
  return g.record(Tensor::scalar(norm), {x}, [x, y, norm](Graph& gr) {
    // The norm is not differentiable at 0; use the zero subgradient there.
    if (norm == 0.0) return;
    const double go = gr.grad(y)[0];
    const Tensor& xv2 = gr.value(x);
    Tensor& gx = gr.mutable_grad(x);
    for (std::size_t i = 0; i < xv2.size(); ++i) gx[i] += go * xv2[i] / norm;
  });
}

Var mean_of(Graph& g, const std::vector<Var>& scalars) {
  if (scalars.empty()) return g.constant(Tensor::scalar(0.0));
  double total = 0.0;
  for (Var s : scalars) total += g.value(s).item();
  const double inv = 1.0 / static_cast<double>(scalars.size());
  Var y{static_cast<int>(g.node_count())};
  return g.record(Tensor::scalar(total * inv), scalars, [scalars, y, inv](Graph& gr) {
    const double go = gr.grad(y)[0];
    for (Var s : scalars) {
      if (gr.requires_grad(s)) gr.mutable_grad(s)[0] += go * inv;
    }
  });
}

Var binary_cross_entropy(Graph& g, Var probs, const std::vector<double>& targets, double eps) {
  const Tensor& pv = g.value(probs);
  if (pv.size() != targets.size()) {
    throw ShapeMismatchError("binary_cross_entropy: " + std::to_string(pv.size()) +
                             " predictions vs " + std::to_string(targets.size()) + " targets");
  }
  const double n = static_cast<double>(targets.size());
  double loss = 0.0;
  for (std::size_t i = 0; i < targets.size(); ++i) {
    const double p = std::clamp(pv[i], eps, 1.0 - eps);
    loss -= targets[i] * std::log(p) + (1.0 - targets[i]) * std::log(1.0 - p);
  }
  Var y{static_cast<int>(g.node_count())};
  return g.record(Tensor::scalar(loss / n), {probs}, [probs, y, targets, eps, n](Graph& gr) {
    const double go = gr.grad(y)[0];
    const Tensor& pv2 = gr.value(probs);
    Tensor& gp = gr.mutable_grad(probs);
    for (std::size_t i = 0; i < targets.size(); ++i) {
      const double p = pv2[i];
      if (p < eps || p > 1.0 - eps) continue;
      gp[i] += go * (-targets[i] / p + (1.0 - targets[i]) / (1.0 - p)) / n;
    }
  });
}

Var categorical_cross_entropy(Graph& g, Var probs, const std::vector<double>& targets, double eps) {
  const Tensor& pv = g.value(probs);
  if (pv.size() != targets.size()) {
    throw ShapeMismatchError("categorical_cross_entropy: " + std::to_string(pv.size()) +
                             " predictions vs " + std::to_string(targets.size()) + " targets");
  }
  double loss = 0.0;
  for (std::size_t i = 0; i < targets.size(); ++i) {
    loss -= targets[i] * std::log(std::clamp(pv[i], eps, 1.0 - eps));
  }
  Var y{static_cast<int>(g.node_count())};
  return g.record(Tensor::scalar(loss), {probs}, [probs, y, targets, eps](Graph& gr) {
    const double go = gr.grad(y)[0];
    const Tensor& pv2 = gr.value(probs);
    Tensor& gp = gr.mutable_grad(probs);
    for (std::size_t i = 0; i < targets.size(); ++i) {
      const double p = pv2[i];
      if (p < eps || p > 1.0 - eps) continue;
      gp[i] += -go * targets[i] / p;
    }
  });
}

}  // namespace opr::nn
