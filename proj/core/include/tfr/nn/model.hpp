#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tfr/nn/layers.hpp"
#include "tfr/nn/tensor.hpp"
#include "tfr/rng.hpp"

namespace tfr::nn {

enum class Architecture { Conv3, Conv5 };
// Square 3x3, or M x 3 spanning every frequency row of the input.
enum class FilterShape { Square3x3, FrequencySpanning };

std::string_view to_string(Architecture arch);
std::string_view to_string(FilterShape filter);
Architecture parse_architecture(std::string_view name);
FilterShape parse_filter(std::string_view name);

struct ModelConfig {
  Architecture architecture = Architecture::Conv3;
  FilterShape filter = FilterShape::Square3x3;
  int input_rows = 37;
  int input_cols = 50;
  int num_classes = 10;
  // One entry for conv3, three for conv5.
  std::vector<int> conv_channels{64};
  int dense_units = 512;
  // Pool window edge; collapses to 1 along an axis of extent 1.
  int pool = 4;
  double dropout = 0.5;
  double l2 = 1e-3;

  // conv3: 64 channels, 4x4 pooling, dense 512.
  // conv5: 32-64-64 channels, 2x2 pooling, dense 256.
  static ModelConfig make(Architecture arch, FilterShape filter, int rows, int cols,
                          int num_classes);

  void validate() const;
  std::string describe() const;
  std::uint64_t digest() const;
};

enum class LayerKind { Conv, Relu, Dropout, MaxPool, Dense };

struct LayerSpec {
  LayerKind kind = LayerKind::Relu;
  // [C, H, W] in and out.
  std::vector<int> in_shape;
  std::vector<int> out_shape;
  int kernel_rows = 0;
  int kernel_cols = 0;
  Padding pad;
  int pool_rows = 1;
  int pool_cols = 1;
  double rate = 0.0;
  // Index of the weight parameter; the bias follows it. -1 for no params.
  int param_index = -1;
};

struct Parameter {
  std::string name;
  Tensor value;
  bool regularized = false;  // weights yes, biases no
  friend bool operator==(const Parameter&, const Parameter&) = default;
};

using Parameters = std::vector<Parameter>;
using Gradients = std::vector<Tensor>;

struct LossResult {
  double loss = 0.0;
  double cross_entropy = 0.0;
  double penalty = 0.0;
  Gradients grads;
  Tensor logits;
};

class Model {
 public:
  explicit Model(ModelConfig config);

  const ModelConfig& config() const { return config_; }
  const std::vector<LayerSpec>& layers() const { return layers_; }
  std::size_t num_parameters() const;

  // Weights ~ N(0, init_std) truncated at +-2 init_std, biases zero.
  Parameters init_params(std::uint64_t seed, double init_std = 0.05) const;

  // batch is [N, rows, cols]; returns [N, num_classes] logits. Dropout is
  // applied only when `rng` is non-null (train mode), with inverted scaling.
  Tensor forward(const Parameters& params, const Tensor& batch, Rng* rng = nullptr) const;

  // Mean softmax cross-entropy plus l2 * sum of squared weights, with
  // analytic gradients for every parameter.
  LossResult loss_and_grads(const Parameters& params, const Tensor& batch,
                            std::span<const int> labels, Rng* rng = nullptr) const;

  std::vector<int> predict(const Parameters& params, const Tensor& batch) const;

 private:
  struct Trace;
  Tensor run_forward(const Parameters& params, const Tensor& batch, Rng* rng, Trace* trace) const;

  ModelConfig config_;
  std::vector<LayerSpec> layers_;
  std::vector<std::vector<int>> param_shapes_;
  std::vector<std::string> param_names_;
};

// Softmax cross-entropy averaged over the batch; logits are [N, C].
double softmax_cross_entropy(const Tensor& logits, std::span<const int> labels,
                             Tensor* grad_logits = nullptr);

}  // namespace tfr::nn
