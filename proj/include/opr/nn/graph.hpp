#pragma once

#include <functional>
#include <string>
#include <unordered_map>
#include <vector>

#include "opr/nn/tensor.hpp"

namespace opr::nn {

// A trainable tensor plus its accumulated gradient.
struct Parameter {
  std::string name;
  Tensor value;
  // Written by Graph::backward even through const references: accumulating a
  // gradient does not change the parameter's value.
  mutable Tensor grad;

  Parameter() = default;
  Parameter(std::string n, Tensor v) : name(std::move(n)), value(std::move(v)), grad(value.shape()) {}
  void zero_grad() const { grad.fill(0.0); }
};

// Handle to a node on a Graph. Only meaningful together with its graph.
struct Var {
  int id = -1;
  bool valid() const { return id >= 0; }
};

// Reverse-mode tape. Nodes are appended in evaluation order, so walking them
// backwards is a valid topological order. One graph per mini-batch.
class Graph {
 public:
  // When `track_parameters` is false, parameter leaves are treated as
  // constants and backward() is never needed (evaluation mode).
  explicit Graph(bool track_parameters = true) : track_parameters_(track_parameters) {}

  Graph(const Graph&) = delete;
  Graph& operator=(const Graph&) = delete;

  Var constant(Tensor value);
  // A leaf that receives gradients but is not tied to a Parameter; used by
  // finite-difference probes on intermediate inputs.
  Var leaf(Tensor value);
  // Leaf bound to `p`. Repeated calls with the same parameter return the same
  // node, so gradients from every use are summed.
  Var param(const Parameter& p);

  const Tensor& value(Var v) const { return nodes_.at(static_cast<std::size_t>(v.id)).value; }
  const Tensor& grad(Var v) const { return nodes_.at(static_cast<std::size_t>(v.id)).grad; }
  bool requires_grad(Var v) const { return nodes_.at(static_cast<std::size_t>(v.id)).requires_grad; }

  // Seeds d(loss)/d(loss) = 1, back-propagates, and adds leaf gradients into
  // their bound Parameters. `loss` must hold a single element.
  void backward(Var loss);

  std::size_t node_count() const { return nodes_.size(); }

  // Op authoring interface. `backward` receives the graph and reads
  // grad(out) to accumulate into mutable_grad(inputs).
  using BackwardFn = std::function<void(Graph&)>;
  Var record(Tensor value, const std::vector<Var>& inputs, BackwardFn backward);
  Tensor& mutable_grad(Var v);

 private:
  struct Node {
    Tensor value;
    Tensor grad;
    bool requires_grad = false;
    const Parameter* parameter = nullptr;
    BackwardFn backward;
  };

  bool track_parameters_;
  std::vector<Node> nodes_;
  std::unordered_map<const Parameter*, int> param_nodes_;
};

}  // namespace opr::nn
