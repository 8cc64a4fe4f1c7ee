#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "tfr/nn/adam.hpp"
#include "tfr/nn/model.hpp"

namespace tfr::nn {

struct TrainConfig {
  int batch_size = 100;
  int epochs = 200;
  AdamConfig adam;
  std::uint64_t seed = 1;
  double init_std = 0.05;

  void validate() const;
};

// Flat view over a set of equally-sized single-channel images.
struct ImageBatchSource {
  std::span<const double> pixels;  // n_images * rows * cols
  int rows = 0;
  int cols = 0;
  std::span<const int> labels;

  Tensor gather(std::span<const std::size_t> indices) const;
};

struct EpochStats {
  double mean_loss = 0.0;
  double train_accuracy = 0.0;
};

// Shuffles `order` in place, then runs minibatch Adam over it.
EpochStats train_epoch(const Model& model, Parameters& params, AdamState& state,
                       const TrainConfig& config, const ImageBatchSource& data,
                       std::vector<std::size_t>& order, Rng& rng);

std::vector<int> predict_all(const Model& model, const Parameters& params,
                             const ImageBatchSource& data, std::span<const std::size_t> indices,
                             int batch_size = 100);

}  // namespace tfr::nn
