#include "tfr/nn/training.hpp"

#include <algorithm>
#include <cstring>
#include <stdexcept>

namespace tfr::nn {

void TrainConfig::validate() const {
  if (batch_size < 1) throw std::invalid_argument("train: batch size must be >= 1");
  if (epochs < 1) throw std::invalid_argument("train: epochs must be >= 1");
  if (!(adam.learning_rate > 0.0)) throw std::invalid_argument("train: learning rate must be > 0");
  if (!(init_std > 0.0)) throw std::invalid_argument("train: init std must be > 0");
}

Tensor ImageBatchSource::gather(std::span<const std::size_t> indices) const {
  const std::size_t img = static_cast<std::size_t>(rows) * cols;
  Tensor out({static_cast<int>(indices.size()), rows, cols});
  for (std::size_t i = 0; i < indices.size(); ++i) {
    if ((indices[i] + 1) * img > pixels.size())
      throw std::out_of_range("gather: image index out of range");
    std::memcpy(out.ptr() + i * img, pixels.data() + indices[i] * img, img * sizeof(double));
  }
  return out;
}

EpochStats train_epoch(const Model& model, Parameters& params, AdamState& state,
                       const TrainConfig& config, const ImageBatchSource& data,
                       std::vector<std::size_t>& order, Rng& rng) {
  if (order.empty()) throw std::invalid_argument("train_epoch: no training examples");
  rng.shuffle(std::span<std::size_t>(order));
  EpochStats stats;
  std::size_t correct = 0;
  std::vector<int> labels;
  for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
    const std::size_t end = std::min(order.size(), start + config.batch_size);
    const std::span<const std::size_t> idx(order.data() + start, end - start);
    const Tensor batch = data.gather(idx);
    labels.resize(idx.size());
    for (std::size_t i = 0; i < idx.size(); ++i) labels[i] = data.labels[idx[i]];
    const LossResult r = model.loss_and_grads(params, batch, labels, &rng);
    adam_step(params, r.grads, state, config.adam);
    stats.mean_loss += r.loss * static_cast<double>(idx.size());
    const int c = r.logits.dim(1);
    for (std::size_t i = 0; i < idx.size(); ++i) {
      const double* row = r.logits.ptr() + i * c;
      if (std::max_element(row, row + c) - row == labels[i]) ++correct;
    }
  }
  stats.mean_loss /= static_cast<double>(order.size());
  stats.train_accuracy = static_cast<double>(correct) / static_cast<double>(order.size());
  return stats;
}

std::vector<int> predict_all(const Model& model, const Parameters& params,
                             const ImageBatchSource& data, std::span<const std::size_t> indices,
                             int batch_size) {
  if (batch_size < 1) throw std::invalid_argument("predict_all: batch size must be >= 1");
  std::vector<int> out;
  out.reserve(indices.size());
  for (std::size_t start = 0; start < indices.size(); start += batch_size) {
    const auto idx = indices.subspan(start, std::min<std::size_t>(batch_size, indices.size() - start));
    const auto pred = model.predict(params, data.gather(idx));
    out.insert(out.end(), pred.begin(), pred.end());
  }
  return out;
}

}  // namespace tfr::nn
