#include "tfr/nn/adam.hpp"

#include <cmath>
#include <stdexcept>

namespace tfr::nn {

AdamState make_adam_state(const Parameters& params) {
  AdamState s;
  for (const auto& p : params) {
    s.m.emplace_back(p.value.shape);
    s.v.emplace_back(p.value.shape);
  }
  return s;
}

void adam_step(Parameters& params, const Gradients& grads, AdamState& state,
               const AdamConfig& config) {
  if (grads.size() != params.size() || state.m.size() != params.size())
    throw std::invalid_argument("adam_step: size mismatch");
  ++state.step;
  const double c1 = 1.0 - std::pow(config.beta1, static_cast<double>(state.step));
  const double c2 = 1.0 - std::pow(config.beta2, static_cast<double>(state.step));
  for (std::size_t i = 0; i < params.size(); ++i) {
    auto& w = params[i].value.data;
    const auto& g = grads[i].data;
    auto& m = state.m[i].data;
    auto& v = state.v[i].data;
    if (g.size() != w.size()) throw std::invalid_argument("adam_step: gradient shape mismatch");
    for (std::size_t j = 0; j < w.size(); ++j) {
      m[j] = config.beta1 * m[j] + (1.0 - config.beta1) * g[j];
      v[j] = config.beta2 * v[j] + (1.0 - config.beta2) * g[j] * g[j];
      w[j] -= config.learning_rate * (m[j] / c1) / (std::sqrt(v[j] / c2) + config.epsilon);
    }
  }
}

}  // namespace tfr::nn
