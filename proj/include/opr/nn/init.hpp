#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "opr/nn/graph.hpp"

namespace opr::nn {

// Uniform(-bound, bound) with bound = gain * sqrt(3 / fan_in).
Parameter uniform_parameter(std::string name, std::vector<int> shape, int fan_in, std::mt19937_64& rng,
                            double gain = 1.0);
Parameter zero_parameter(std::string name, std::vector<int> shape);

}  // namespace opr::nn
