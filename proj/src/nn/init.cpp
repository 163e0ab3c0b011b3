#include "opr/nn/init.hpp"

#include <cmath>

namespace opr::nn {

Parameter uniform_parameter(std::string name, std::vector<int> shape, int fan_in, std::mt19937_64& rng,
                            double gain) {
  Tensor t(std::move(shape));
  const double bound = gain * std::sqrt(3.0 / static_cast<double>(fan_in));
  std::uniform_real_distribution<double> dist(-bound, bound);
  for (double& v : t.values()) v = dist(rng);
  return Parameter(std::move(name), std::move(t));
}

Parameter zero_parameter(std::string name, std::vector<int> shape) {
  return Parameter(std::move(name), Tensor(std::move(shape)));
}

}  // namespace opr::nn
