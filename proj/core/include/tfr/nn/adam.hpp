#pragma once

#include <vector>

#include "tfr/nn/model.hpp"

namespace tfr::nn {

struct AdamConfig {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

struct AdamState {
  std::vector<Tensor> m;
  std::vector<Tensor> v;
  long step = 0;
};

AdamState make_adam_state(const Parameters& params);

// One bias-corrected Adam update; increments state.step first.
void adam_step(Parameters& params, const Gradients& grads, AdamState& state,
               const AdamConfig& config);

}  // namespace tfr::nn
