#pragma once

#include <vector>

#include <nlohmann/json.hpp>

#include "opr/nn/graph.hpp"
#include "opr/train/config.hpp"

namespace opr::train {

// Adam over a fixed, ordered parameter list. Moments are matched to
// parameters by position and checked by name on restore.
class Adam {
 public:
  Adam(std::vector<nn::Parameter*> params, double learning_rate, AdamConfig config = {});

  void step();
  long steps() const { return t_; }
  double learning_rate() const { return lr_; }

  nlohmann::json state() const;
  void load_state(const nlohmann::json& j);

 private:
  std::vector<nn::Parameter*> params_;
  std::vector<nn::Tensor> m_, v_;
  double lr_;
  AdamConfig config_;
  long t_ = 0;
};

}  // namespace opr::train
