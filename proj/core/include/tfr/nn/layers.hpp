#pragma once

#include <cstddef>
#include <vector>

#include "tfr/nn/tensor.hpp"

namespace tfr::nn {

struct Padding {
  int rows = 0;
  int cols = 0;
};

// Cross-correlation of a [C_in, H, W] input with [C_out, C_in, kh, kw]
// kernels, stride 1, zero padding `pad` on each side. Output is
// [C_out, H + 2 pad.rows - kh + 1, W + 2 pad.cols - kw + 1]. An empty bias
// tensor means no bias.
Tensor conv2d_forward(const Tensor& input, const Tensor& kernels, const Tensor& bias = {},
                      Padding pad = {});

struct Conv2dGrads {
  Tensor input;
  Tensor kernels;
  Tensor bias;
};

Conv2dGrads conv2d_backward(const Tensor& input, const Tensor& kernels, const Tensor& grad_output,
                            Padding pad = {}, bool need_input_grad = true);

struct PoolResult {
  Tensor output;
  // Flat input index of the maximum for every output element.
  std::vector<std::size_t> argmax;
};

// Non-overlapping max pooling of a [C, H, W] tensor with stride equal to the
// window. Ragged edges are pooled over the partial window (equivalent to
// padding with -inf), so the output is [C, ceil(H / ph), ceil(W / pw)].
PoolResult maxpool_forward(const Tensor& input, int pool_rows, int pool_cols);

Tensor maxpool_backward(const Tensor& grad_output, const std::vector<std::size_t>& argmax,
                        const std::vector<int>& input_shape);

}  // namespace tfr::nn
