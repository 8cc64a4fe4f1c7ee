#include <benchmark/benchmark.h>

#include <vector>

#include "tfr/nn/adam.hpp"
#include "tfr/nn/model.hpp"
#include "tfr/rng.hpp"

namespace {

using tfr::nn::Architecture;
using tfr::nn::FilterShape;

tfr::nn::Tensor random_batch(int n, int rows, int cols) {
  tfr::Rng rng(3);
  tfr::nn::Tensor t({n, rows, cols});
  for (auto& v : t.data) v = 2.0 * rng.uniform() - 1.0;
  return t;
}

// range(0): batch size. Narrowband input, 10 classes.
void BM_Forward(benchmark::State& state, Architecture arch, FilterShape filter) {
  const tfr::nn::Model model(tfr::nn::ModelConfig::make(arch, filter, 37, 50, 10));
  const auto params = model.init_params(1);
  const auto batch = random_batch(static_cast<int>(state.range(0)), 37, 50);
  for (auto _ : state) benchmark::DoNotOptimize(model.forward(params, batch));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

// Forward, backward and one Adam update in train mode.
void BM_TrainStep(benchmark::State& state, Architecture arch, FilterShape filter) {
  const tfr::nn::Model model(tfr::nn::ModelConfig::make(arch, filter, 37, 50, 10));
  auto params = model.init_params(1);
  auto adam = tfr::nn::make_adam_state(params);
  const int n = static_cast<int>(state.range(0));
  const auto batch = random_batch(n, 37, 50);
  std::vector<int> labels(n);
  for (int i = 0; i < n; ++i) labels[i] = i % 10;
  tfr::Rng rng(5);
  for (auto _ : state) {
    const auto r = model.loss_and_grads(params, batch, labels, &rng);
    tfr::nn::adam_step(params, r.grads, adam, {});
    benchmark::DoNotOptimize(r.loss);
  }
  state.SetItemsProcessed(state.iterations() * n);
}

}  // namespace

BENCHMARK_CAPTURE(BM_Forward, conv3_3x3, Architecture::Conv3, FilterShape::Square3x3)
    ->Arg(100)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Forward, conv5_3x3, Architecture::Conv5, FilterShape::Square3x3)
    ->Arg(100)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_TrainStep, conv3_3x3, Architecture::Conv3, FilterShape::Square3x3)
    ->Arg(100)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_TrainStep, conv3_mx3, Architecture::Conv3, FilterShape::FrequencySpanning)
    ->Arg(100)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_TrainStep, conv5_3x3, Architecture::Conv5, FilterShape::Square3x3)
    ->Arg(100)->Unit(benchmark::kMillisecond);
