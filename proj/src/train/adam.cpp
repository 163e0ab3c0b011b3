#include "opr/train/adam.hpp"

#include <cmath>

#include "opr/errors.hpp"

namespace opr::train {

Adam::Adam(std::vector<nn::Parameter*> params, double learning_rate, AdamConfig config)
    : params_(std::move(params)), lr_(learning_rate), config_(config) {
  for (const auto* p : params_) {
    m_.emplace_back(p->value.shape());
    v_.emplace_back(p->value.shape());
  }
}

void Adam::step() {
  ++t_;
  const double b1 = config_.beta1, b2 = config_.beta2;
  const double c1 = 1.0 - std::pow(b1, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(b2, static_cast<double>(t_));
  for (std::size_t i = 0; i < params_.size(); ++i) {
    nn::Parameter& p = *params_[i];
    double* w = p.value.data();
    const double* g = p.grad.data();
    double* m = m_[i].data();
    double* v = v_[i].data();
    for (std::size_t k = 0; k < p.value.size(); ++k) {
      m[k] = b1 * m[k] + (1.0 - b1) * g[k];
      v[k] = b2 * v[k] + (1.0 - b2) * g[k] * g[k];
      w[k] -= lr_ * (m[k] / c1) / (std::sqrt(v[k] / c2) + config_.eps);
    }
  }
}

nlohmann::json Adam::state() const {
  nlohmann::json moments = nlohmann::json::object();
  for (std::size_t i = 0; i < params_.size(); ++i) {
    moments[params_[i]->name] = {{"m", std::vector<double>(m_[i].values().begin(), m_[i].values().end())},
                                 {"v", std::vector<double>(v_[i].values().begin(), v_[i].values().end())}};
  }
  return {{"t", t_},
          {"learning_rate", lr_},
          {"beta1", config_.beta1},
          {"beta2", config_.beta2},
          {"eps", config_.eps},
          {"moments", moments}};
}

void Adam::load_state(const nlohmann::json& j) {
  try {
    t_ = j.at("t").get<long>();
    const auto& moments = j.at("moments");
    for (std::size_t i = 0; i < params_.size(); ++i) {
      const auto& e = moments.at(params_[i]->name);
      auto m = e.at("m").get<std::vector<double>>();
      auto v = e.at("v").get<std::vector<double>>();
      if (m.size() != m_[i].size() || v.size() != v_[i].size()) {
        throw CheckpointMismatchError("optimizer moments for " + params_[i]->name + " have the wrong size");
      }
      m_[i] = nn::Tensor(m_[i].shape(), std::move(m));
      v_[i] = nn::Tensor(v_[i].shape(), std::move(v));
    }
  } catch (const nlohmann::json::exception& e) {
    throw CheckpointError(std::string("corrupt optimizer state: ") + e.what());
  }
}

}  // namespace opr::train
