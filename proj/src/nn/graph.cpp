#include "opr/nn/graph.hpp"

#include "opr/errors.hpp"

namespace opr::nn {

Var Graph::constant(Tensor value) {
  nodes_.push_back(Node{std::move(value), {}, false, nullptr, {}});
  return Var{static_cast<int>(nodes_.size()) - 1};
}

Var Graph::leaf(Tensor value) {
  nodes_.push_back(Node{std::move(value), {}, true, nullptr, {}});
  return Var{static_cast<int>(nodes_.size()) - 1};
}

Var Graph::param(const Parameter& p) {
  if (auto it = param_nodes_.find(&p); it != param_nodes_.end()) return Var{it->second};
  nodes_.push_back(Node{p.value, {}, track_parameters_, track_parameters_ ? &p : nullptr, {}});
  const int id = static_cast<int>(nodes_.size()) - 1;
  param_nodes_.emplace(&p, id);
  return Var{id};
}

Var Graph::record(Tensor value, const std::vector<Var>& inputs, BackwardFn backward) {
  bool needs = false;
  for (Var in : inputs) needs = needs || nodes_.at(static_cast<std::size_t>(in.id)).requires_grad;
  nodes_.push_back(Node{std::move(value), {}, needs, nullptr, needs ? std::move(backward) : BackwardFn{}});
  return Var{static_cast<int>(nodes_.size()) - 1};
}

Tensor& Graph::mutable_grad(Var v) {
  Node& n = nodes_.at(static_cast<std::size_t>(v.id));
  if (n.grad.empty() && !n.value.empty()) n.grad = Tensor(n.value.shape());
  return n.grad;
}

void Graph::backward(Var loss) {
  Node& root = nodes_.at(static_cast<std::size_t>(loss.id));
  if (root.value.size() != 1) {
    throw ShapeMismatchError("backward() requires a scalar loss, got shape " +
                             shape_string(root.value.shape()));
  }
  if (!root.requires_grad) return;
  for (std::size_t i = 0; i <= static_cast<std::size_t>(loss.id); ++i) {
    if (nodes_[i].requires_grad) nodes_[i].grad = Tensor(nodes_[i].value.shape());
  }
  root.grad[0] = 1.0;
  for (int i = loss.id; i >= 0; --i) {
    Node& n = nodes_[static_cast<std::size_t>(i)];
    if (n.requires_grad && n.backward) n.backward(*this);
  }
  for (std::size_t i = 0; i <= static_cast<std::size_t>(loss.id); ++i) {
    Node& n = nodes_[i];
    if (n.parameter == nullptr) continue;
    auto dst = n.parameter->grad.values();
    auto src = n.grad.values();
    for (std::size_t k = 0; k < dst.size(); ++k) dst[k] += src[k];
  }
}

}  // namespace opr::nn
