#pragma once

#include <Eigen/Core>
#include <cstddef>

// Single-sample layer kernels over raw [C, H, W] buffers.
namespace tfr::nn::detail {

using RowMajorMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct ConvGeom {
  int in_channels = 1;
  int height = 0;
  int width = 0;
  int out_channels = 1;
  int kernel_rows = 1;
  int kernel_cols = 1;
  int pad_rows = 0;
  int pad_cols = 0;

  int out_height() const { return height + 2 * pad_rows - kernel_rows + 1; }
  int out_width() const { return width + 2 * pad_cols - kernel_cols + 1; }
  int patch_size() const { return in_channels * kernel_rows * kernel_cols; }
  int positions() const { return out_height() * out_width(); }
  void check() const;
};

// col is patch_size x positions.
void im2col(const double* in, const ConvGeom& g, Eigen::MatrixXd& col);

void conv_forward(const double* in, const double* weights, const double* bias, const ConvGeom& g,
                  double* out, Eigen::MatrixXd& col);

// Accumulates into grad_weights / grad_bias; overwrites grad_in when non-null.
void conv_backward(const double* in, const double* weights, const double* grad_out,
                   const ConvGeom& g, double* grad_in, double* grad_weights, double* grad_bias,
                   Eigen::MatrixXd& col);

struct PoolGeom {
  int channels = 1;
  int height = 0;
  int width = 0;
  int pool_rows = 1;
  int pool_cols = 1;

  int out_height() const { return (height + pool_rows - 1) / pool_rows; }
  int out_width() const { return (width + pool_cols - 1) / pool_cols; }
  std::size_t out_size() const {
    return static_cast<std::size_t>(channels) * out_height() * out_width();
  }
};

void pool_forward(const double* in, const PoolGeom& g, double* out, std::size_t* argmax);
// grad_in must be zeroed by the caller.
void pool_backward(const double* grad_out, const std::size_t* argmax, std::size_t n_out,
                   double* grad_in);

}  // namespace tfr::nn::detail
