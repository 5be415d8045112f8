#pragma once

#include <string>
#include <vector>

#include "nap/nn/layers.hpp"

namespace nap::nn {

enum class OptKind { Adam, Nadam };

const char* optimizer_name(OptKind k);

struct Optimizer {
  OptKind kind = OptKind::Adam;
  double lr = 0.001;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  long t = 0;
  std::vector<Matrix> m, v;

  Optimizer(OptKind k, double learning_rate) : kind(k), lr(learning_rate) {}

  void step(const std::vector<Matrix*>& params, const std::vector<Matrix*>& grads);
};

}  // namespace nap::nn
