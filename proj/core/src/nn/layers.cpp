#include "tfr/nn/layers.hpp"

#include <limits>
#include <stdexcept>
#include <string>

#include "kernels.hpp"

namespace tfr::nn {
namespace detail {

void ConvGeom::check() const {
  if (in_channels < 1 || out_channels < 1 || kernel_rows < 1 || kernel_cols < 1 || pad_rows < 0 ||
      pad_cols < 0) {
    throw std::invalid_argument("conv2d: invalid geometry");
  }
  if (out_height() < 1 || out_width() < 1) {
    throw std::invalid_argument("conv2d: " + std::to_string(kernel_rows) + "x" +
                                std::to_string(kernel_cols) + " kernel larger than " +
                                std::to_string(height) + "x" + std::to_string(width) + " input");
  }
}

void im2col(const double* in, const ConvGeom& g, Eigen::MatrixXd& col) {
  const int ho = g.out_height();
  const int wo = g.out_width();
  col.resize(g.patch_size(), g.positions());
  for (int y = 0; y < ho; ++y) {
    for (int x = 0; x < wo; ++x) {
      double* dst = col.col(y * wo + x).data();
      for (int c = 0; c < g.in_channels; ++c) {
        const double* plane = in + static_cast<std::size_t>(c) * g.height * g.width;
        for (int i = 0; i < g.kernel_rows; ++i) {
          const int yy = y + i - g.pad_rows;
          for (int j = 0; j < g.kernel_cols; ++j) {
            const int xx = x + j - g.pad_cols;
            *dst++ = (yy >= 0 && yy < g.height && xx >= 0 && xx < g.width) ? plane[yy * g.width + xx] : 0.0;
          }
        }
      }
    }
  }
}

void conv_forward(const double* in, const double* weights, const double* bias, const ConvGeom& g,
                  double* out, Eigen::MatrixXd& col) {
  im2col(in, g, col);
  const Eigen::Map<const RowMajorMatrix> w(weights, g.out_channels, g.patch_size());
  Eigen::Map<RowMajorMatrix> y(out, g.out_channels, g.positions());
  y.noalias() = w * col;
  if (bias) {
    y.colwise() += Eigen::Map<const Eigen::VectorXd>(bias, g.out_channels);
  }
}

void conv_backward(const double* in, const double* weights, const double* grad_out,
                   const ConvGeom& g, double* grad_in, double* grad_weights, double* grad_bias,
                   Eigen::MatrixXd& col) {
  im2col(in, g, col);
  const Eigen::Map<const RowMajorMatrix> dy(grad_out, g.out_channels, g.positions());
  Eigen::Map<RowMajorMatrix> dw(grad_weights, g.out_channels, g.patch_size());
  dw.noalias() += dy * col.transpose();
  if (grad_bias) {
    // Plain loop: Eigen's vectorized reductions peel by address, which makes
    // the summation order depend on where the buffer happens to live.
    const std::size_t n = g.positions();
    for (int o = 0; o < g.out_channels; ++o) {
      double acc = 0.0;
      for (std::size_t p = 0; p < n; ++p) acc += grad_out[o * n + p];
      grad_bias[o] += acc;
    }
  }
  if (!grad_in) return;

  const Eigen::Map<const RowMajorMatrix> w(weights, g.out_channels, g.patch_size());
  const Eigen::MatrixXd dcol = w.transpose() * dy;
  const std::size_t in_size = static_cast<std::size_t>(g.in_channels) * g.height * g.width;
  std::fill(grad_in, grad_in + in_size, 0.0);
  const int wo = g.out_width();
  for (int y = 0; y < g.out_height(); ++y) {
    for (int x = 0; x < wo; ++x) {
      const double* src = dcol.col(y * wo + x).data();
      for (int c = 0; c < g.in_channels; ++c) {
        double* plane = grad_in + static_cast<std::size_t>(c) * g.height * g.width;
        for (int i = 0; i < g.kernel_rows; ++i) {
          const int yy = y + i - g.pad_rows;
          for (int j = 0; j < g.kernel_cols; ++j, ++src) {
            const int xx = x + j - g.pad_cols;
            if (yy >= 0 && yy < g.height && xx >= 0 && xx < g.width) plane[yy * g.width + xx] += *src;
          }
        }
      }
    }
  }
}

void pool_forward(const double* in, const PoolGeom& g, double* out, std::size_t* argmax) {
  const int ho = g.out_height();
  const int wo = g.out_width();
  std::size_t o = 0;
  for (int c = 0; c < g.channels; ++c) {
    const std::size_t plane = static_cast<std::size_t>(c) * g.height * g.width;
    for (int y = 0; y < ho; ++y) {
      for (int x = 0; x < wo; ++x, ++o) {
        double best = -std::numeric_limits<double>::infinity();
        std::size_t best_idx = plane;
        const int y1 = std::min(g.height, (y + 1) * g.pool_rows);
        const int x1 = std::min(g.width, (x + 1) * g.pool_cols);
        for (int yy = y * g.pool_rows; yy < y1; ++yy) {
          for (int xx = x * g.pool_cols; xx < x1; ++xx) {
            const std::size_t idx = plane + static_cast<std::size_t>(yy) * g.width + xx;
            if (in[idx] > best) {
              best = in[idx];
              best_idx = idx;
            }
          }
        }
        out[o] = best;
        argmax[o] = best_idx;
      }
    }
  }
}

void pool_backward(const double* grad_out, const std::size_t* argmax, std::size_t n_out,
                   double* grad_in) {
  for (std::size_t o = 0; o < n_out; ++o) grad_in[argmax[o]] += grad_out[o];
}

}  // namespace detail

namespace {

detail::ConvGeom conv_geometry(const Tensor& input, const Tensor& kernels, Padding pad) {
  if (input.rank() != 3) throw std::invalid_argument("conv2d: input must be [C, H, W]");
  if (kernels.rank() != 4) throw std::invalid_argument("conv2d: kernels must be [Cout, Cin, kh, kw]");
  if (kernels.dim(1) != input.dim(0)) throw std::invalid_argument("conv2d: channel mismatch");
  detail::ConvGeom g{input.dim(0), input.dim(1), input.dim(2), kernels.dim(0),
                     kernels.dim(2), kernels.dim(3), pad.rows, pad.cols};
  g.check();
  return g;
}

}  // namespace

Tensor conv2d_forward(const Tensor& input, const Tensor& kernels, const Tensor& bias, Padding pad) {
  const auto g = conv_geometry(input, kernels, pad);
  if (bias.size() != 0 && bias.size() != static_cast<std::size_t>(g.out_channels))
    throw std::invalid_argument("conv2d: bias size mismatch");
  Tensor out({g.out_channels, g.out_height(), g.out_width()});
  Eigen::MatrixXd col;
  detail::conv_forward(input.ptr(), kernels.ptr(), bias.size() ? bias.ptr() : nullptr, g, out.ptr(), col);
  return out;
}

Conv2dGrads conv2d_backward(const Tensor& input, const Tensor& kernels, const Tensor& grad_output,
                            Padding pad, bool need_input_grad) {
  const auto g = conv_geometry(input, kernels, pad);
  if (grad_output.size() != static_cast<std::size_t>(g.out_channels) * g.positions())
    throw std::invalid_argument("conv2d_backward: grad_output size mismatch");
  Conv2dGrads grads{need_input_grad ? Tensor(input.shape) : Tensor{}, Tensor(kernels.shape),
                    Tensor({g.out_channels})};
  Eigen::MatrixXd col;
  detail::conv_backward(input.ptr(), kernels.ptr(), grad_output.ptr(), g,
                        need_input_grad ? grads.input.ptr() : nullptr, grads.kernels.ptr(),
                        grads.bias.ptr(), col);
  return grads;
}

PoolResult maxpool_forward(const Tensor& input, int pool_rows, int pool_cols) {
  if (input.rank() != 3) throw std::invalid_argument("maxpool: input must be [C, H, W]");
  if (pool_rows < 1 || pool_cols < 1) throw std::invalid_argument("maxpool: pool dims must be >= 1");
  const detail::PoolGeom g{input.dim(0), input.dim(1), input.dim(2), pool_rows, pool_cols};
  PoolResult r{Tensor({g.channels, g.out_height(), g.out_width()}), {}};
  r.argmax.resize(g.out_size());
  detail::pool_forward(input.ptr(), g, r.output.ptr(), r.argmax.data());
  return r;
}

Tensor maxpool_backward(const Tensor& grad_output, const std::vector<std::size_t>& argmax,
                        const std::vector<int>& input_shape) {
  if (grad_output.size() != argmax.size())
    throw std::invalid_argument("maxpool_backward: size mismatch");
  Tensor grad(input_shape);
  detail::pool_backward(grad_output.ptr(), argmax.data(), argmax.size(), grad.ptr());
  return grad;
}

}  // namespace tfr::nn
