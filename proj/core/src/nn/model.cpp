#include "tfr/nn/model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "kernels.hpp"

namespace tfr::nn {

std::string_view to_string(Architecture arch) {
  return arch == Architecture::Conv3 ? "conv3" : "conv5";
}

std::string_view to_string(FilterShape filter) {
  return filter == FilterShape::Square3x3 ? "3x3" : "Mx3";
}

Architecture parse_architecture(std::string_view name) {
  if (name == "conv3") return Architecture::Conv3;
  if (name == "conv5") return Architecture::Conv5;
  throw std::invalid_argument("unknown architecture '" + std::string(name) + "'");
}

FilterShape parse_filter(std::string_view name) {
  if (name == "3x3") return FilterShape::Square3x3;
  if (name == "Mx3" || name == "mx3" || name == "MX3") return FilterShape::FrequencySpanning;
  throw std::invalid_argument("unknown filter shape '" + std::string(name) + "'");
}

ModelConfig ModelConfig::make(Architecture arch, FilterShape filter, int rows, int cols,
                              int num_classes) {
  ModelConfig c;
  c.architecture = arch;
  c.filter = filter;
  c.input_rows = rows;
  c.input_cols = cols;
  c.num_classes = num_classes;
  if (arch == Architecture::Conv3) {
    c.conv_channels = {64};
    c.dense_units = 512;
    c.pool = 4;
  } else {
    c.conv_channels = {32, 64, 64};
    c.dense_units = 256;
    c.pool = 2;
  }
  return c;
}

void ModelConfig::validate() const {
  if (input_rows < 1 || input_cols < 1) throw std::invalid_argument("model: empty input shape");
  if (num_classes < 2) throw std::invalid_argument("model: need at least two classes");
  const std::size_t want = architecture == Architecture::Conv3 ? 1 : 3;
  if (conv_channels.size() != want)
    throw std::invalid_argument("model: " + std::string(to_string(architecture)) + " needs " +
                                std::to_string(want) + " conv layer widths");
  for (int ch : conv_channels)
    if (ch < 1) throw std::invalid_argument("model: conv channels must be positive");
  if (dense_units < 1) throw std::invalid_argument("model: dense units must be positive");
  if (pool < 1) throw std::invalid_argument("model: pool must be >= 1");
  if (!(dropout >= 0.0 && dropout < 1.0)) throw std::invalid_argument("model: dropout in [0, 1)");
  if (!(l2 >= 0.0)) throw std::invalid_argument("model: l2 must be >= 0");
}

std::string ModelConfig::describe() const {
  std::ostringstream os;
  os << to_string(architecture) << " filter=" << to_string(filter) << " input=" << input_rows
     << "x" << input_cols << " classes=" << num_classes << " conv=";
  for (std::size_t i = 0; i < conv_channels.size(); ++i) os << (i ? "-" : "") << conv_channels[i];
  os << " dense=" << dense_units << " pool=" << pool;
  return os.str();
}

std::uint64_t ModelConfig::digest() const {
  // FNV-1a over the structural description; dropout and l2 do not change
  // the parameter layout so they are left out.
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : describe()) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

namespace {

std::size_t volume(const std::vector<int>& s) { return Tensor::count(s); }

detail::ConvGeom conv_geom(const LayerSpec& l) {
  return {l.in_shape[0], l.in_shape[1], l.in_shape[2], l.out_shape[0],
          l.kernel_rows, l.kernel_cols, l.pad.rows,    l.pad.cols};
}

detail::PoolGeom pool_geom(const LayerSpec& l) {
  return {l.in_shape[0], l.in_shape[1], l.in_shape[2], l.pool_rows, l.pool_cols};
}

using ColMajorMap = Eigen::Map<Eigen::MatrixXd>;
using ConstColMajorMap = Eigen::Map<const Eigen::MatrixXd>;

}  // namespace

Model::Model(ModelConfig config) : config_(std::move(config)) {
  config_.validate();
  std::vector<int> shape{1, config_.input_rows, config_.input_cols};
  int n_conv = 0;
  int n_dense = 0;

  auto add_params = [&](LayerSpec& l, std::string name, std::vector<int> wshape, int bias) {
    l.param_index = static_cast<int>(param_shapes_.size());
    param_shapes_.push_back(std::move(wshape));
    param_names_.push_back(name + ".weight");
    param_shapes_.push_back({bias});
    param_names_.push_back(name + ".bias");
  };
  auto conv = [&](int out_ch, int kh, int kw, Padding pad) {
    LayerSpec l;
    l.kind = LayerKind::Conv;
    l.in_shape = shape;
    l.kernel_rows = kh;
    l.kernel_cols = kw;
    l.pad = pad;
    const detail::ConvGeom g{shape[0], shape[1], shape[2], out_ch, kh, kw, pad.rows, pad.cols};
    g.check();
    l.out_shape = {out_ch, g.out_height(), g.out_width()};
    add_params(l, "conv" + std::to_string(++n_conv), {out_ch, shape[0], kh, kw}, out_ch);
    shape = l.out_shape;
    layers_.push_back(std::move(l));
  };
  auto unary = [&](LayerKind kind, double rate = 0.0) {
    LayerSpec l;
    l.kind = kind;
    l.in_shape = l.out_shape = shape;
    l.rate = rate;
    layers_.push_back(std::move(l));
  };
  auto pool = [&]() {
    LayerSpec l;
    l.kind = LayerKind::MaxPool;
    l.in_shape = shape;
    l.pool_rows = shape[1] == 1 ? 1 : config_.pool;
    l.pool_cols = shape[2] == 1 ? 1 : config_.pool;
    const auto g = pool_geom(l);
    l.out_shape = {shape[0], g.out_height(), g.out_width()};
    shape = l.out_shape;
    layers_.push_back(std::move(l));
  };
  auto dense = [&](int units) {
    LayerSpec l;
    l.kind = LayerKind::Dense;
    l.in_shape = shape;
    l.out_shape = {units, 1, 1};
    add_params(l, "dense" + std::to_string(++n_dense), {units, static_cast<int>(volume(shape))},
               units);
    shape = l.out_shape;
    layers_.push_back(std::move(l));
  };

  const bool spanning = config_.filter == FilterShape::FrequencySpanning;
  if (config_.architecture == Architecture::Conv3) {
    conv(config_.conv_channels[0], spanning ? shape[1] : 3, 3, {});
    unary(LayerKind::Relu);
    unary(LayerKind::Dropout, config_.dropout);
    pool();
  } else {
    // Same padding: the valid variant cannot fit three 3x3 stages with
    // pooling into the smallest (12 column) input.
    for (std::size_t i = 0; i < config_.conv_channels.size(); ++i) {
      const int kh = (i == 0 && spanning) ? shape[1] : std::min(3, shape[1]);
      conv(config_.conv_channels[i], kh, 3, {kh == 3 ? 1 : 0, 1});
      unary(LayerKind::Relu);
      if (i == 0) unary(LayerKind::Dropout, config_.dropout);
      pool();
    }
  }
  dense(config_.dense_units);
  unary(LayerKind::Relu);
  unary(LayerKind::Dropout, config_.dropout);
  dense(config_.num_classes);
}

std::size_t Model::num_parameters() const {
  std::size_t n = 0;
  for (const auto& s : param_shapes_) n += volume(s);
  return n;
}

Parameters Model::init_params(std::uint64_t seed, double init_std) const {
  if (!(init_std > 0.0)) throw std::invalid_argument("init_params: init_std must be positive");
  Rng rng(seed);
  Parameters params;
  params.reserve(param_shapes_.size());
  for (std::size_t i = 0; i < param_shapes_.size(); ++i) {
    Parameter p{param_names_[i], Tensor(param_shapes_[i]), i % 2 == 0};
    if (p.regularized)
      for (double& w : p.value.data) w = rng.truncated_normal(init_std);
    params.push_back(std::move(p));
  }
  return params;
}

struct Model::Trace {
  // ReLU and dropout work in place, so several layers share one buffer.
  std::vector<std::vector<double>> buffers;
  std::vector<int> input_buffer;                   // per layer
  std::vector<std::vector<std::uint8_t>> keep;     // dropout masks
  std::vector<std::vector<std::size_t>> argmax;    // pool winners
  int batch = 0;
};

Tensor Model::run_forward(const Parameters& params, const Tensor& batch, Rng* rng,
                          Trace* trace) const {
  if (params.size() != param_shapes_.size())
    throw std::invalid_argument("model: parameter count mismatch");
  for (std::size_t i = 0; i < params.size(); ++i)
    if (params[i].value.shape != param_shapes_[i])
      throw std::invalid_argument("model: parameter " + param_names_[i] + " has shape " +
                                  params[i].value.shape_string());
  if (batch.rank() != 3 || batch.dim(1) != config_.input_rows || batch.dim(2) != config_.input_cols)
    throw std::invalid_argument("model: batch must be [N, " + std::to_string(config_.input_rows) +
                                ", " + std::to_string(config_.input_cols) + "], got " +
                                batch.shape_string());
  const int n = batch.dim(0);

  Trace local;
  Trace& tr = trace ? *trace : local;
  tr.batch = n;
  tr.buffers.clear();
  tr.buffers.push_back(batch.data);
  tr.input_buffer.assign(layers_.size(), 0);
  tr.keep.assign(layers_.size(), {});
  tr.argmax.assign(layers_.size(), {});
  Eigen::MatrixXd col;

  for (std::size_t li = 0; li < layers_.size(); ++li) {
    const LayerSpec& l = layers_[li];
    const std::size_t in_sz = volume(l.in_shape);
    const std::size_t out_sz = volume(l.out_shape);
    tr.input_buffer[li] = static_cast<int>(tr.buffers.size()) - 1;
    std::vector<double>& cur = tr.buffers.back();

    if (l.kind == LayerKind::Relu) {
      for (double& v : cur) v = std::max(v, 0.0);
      continue;
    }
    if (l.kind == LayerKind::Dropout) {
      if (rng && l.rate > 0.0) {
        auto& keep = tr.keep[li];
        keep.resize(cur.size());
        const double scale = 1.0 / (1.0 - l.rate);
        for (std::size_t i = 0; i < cur.size(); ++i) {
          keep[i] = rng->uniform() >= l.rate;
          cur[i] = keep[i] ? cur[i] * scale : 0.0;
        }
      }
      continue;
    }

    std::vector<double> next(out_sz * n);
    switch (l.kind) {
      case LayerKind::Conv: {
        const auto g = conv_geom(l);
        const double* w = params[l.param_index].value.ptr();
        const double* b = params[l.param_index + 1].value.ptr();
        for (int s = 0; s < n; ++s)
          detail::conv_forward(cur.data() + s * in_sz, w, b, g, next.data() + s * out_sz, col);
        break;
      }
      case LayerKind::MaxPool: {
        const auto g = pool_geom(l);
        auto& am = tr.argmax[li];
        am.resize(out_sz * n);
        for (int s = 0; s < n; ++s)
          detail::pool_forward(cur.data() + s * in_sz, g, next.data() + s * out_sz,
                               am.data() + s * out_sz);
        break;
      }
      case LayerKind::Dense: {
        const Eigen::Map<const detail::RowMajorMatrix> w(params[l.param_index].value.ptr(),
                                                         static_cast<Eigen::Index>(out_sz),
                                                         static_cast<Eigen::Index>(in_sz));
        const Eigen::Map<const Eigen::VectorXd> b(params[l.param_index + 1].value.ptr(),
                                                  static_cast<Eigen::Index>(out_sz));
        ColMajorMap y(next.data(), out_sz, n);
        y.noalias() = w * ConstColMajorMap(cur.data(), in_sz, n);
        y.colwise() += b;
        break;
      }
      default:
        break;
    }
    // Without a trace only the newest buffer is needed.
    if (!trace) tr.buffers.clear();
    tr.buffers.push_back(std::move(next));
  }
  Tensor logits({n, config_.num_classes});
  logits.data = tr.buffers.back();
  return logits;
}

Tensor Model::forward(const Parameters& params, const Tensor& batch, Rng* rng) const {
  return run_forward(params, batch, rng, nullptr);
}

std::vector<int> Model::predict(const Parameters& params, const Tensor& batch) const {
  const Tensor logits = forward(params, batch);
  const int n = logits.dim(0);
  const int c = logits.dim(1);
  std::vector<int> out(n);
  for (int s = 0; s < n; ++s) {
    const double* row = logits.ptr() + static_cast<std::size_t>(s) * c;
    out[s] = static_cast<int>(std::max_element(row, row + c) - row);
  }
  return out;
}

double softmax_cross_entropy(const Tensor& logits, std::span<const int> labels,
                             Tensor* grad_logits) {
  if (logits.rank() != 2) throw std::invalid_argument("cross_entropy: logits must be [N, C]");
  const int n = logits.dim(0);
  const int c = logits.dim(1);
  if (labels.size() != static_cast<std::size_t>(n))
    throw std::invalid_argument("cross_entropy: label count mismatch");
  if (n == 0) throw std::invalid_argument("cross_entropy: empty batch");
  if (grad_logits) *grad_logits = Tensor(logits.shape);
  double total = 0.0;
  for (int s = 0; s < n; ++s) {
    const int y = labels[s];
    if (y < 0 || y >= c) throw std::invalid_argument("cross_entropy: label out of range");
    const double* row = logits.ptr() + static_cast<std::size_t>(s) * c;
    const double mx = *std::max_element(row, row + c);
    double z = 0.0;
    for (int k = 0; k < c; ++k) z += std::exp(row[k] - mx);
    const double lse = mx + std::log(z);
    total += lse - row[y];
    if (grad_logits) {
      double* g = grad_logits->ptr() + static_cast<std::size_t>(s) * c;
      for (int k = 0; k < c; ++k) g[k] = std::exp(row[k] - lse) / n;
      g[y] -= 1.0 / n;
    }
  }
  return total / n;
}

LossResult Model::loss_and_grads(const Parameters& params, const Tensor& batch,
                                 std::span<const int> labels, Rng* rng) const {
  Trace tr;
  LossResult r;
  r.logits = run_forward(params, batch, rng, &tr);
  Tensor grad_logits;
  r.cross_entropy = softmax_cross_entropy(r.logits, labels, &grad_logits);

  r.grads.reserve(params.size());
  for (const auto& p : params) r.grads.emplace_back(p.value.shape);
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (!params[i].regularized) continue;
    double sq = 0.0;
    for (double w : params[i].value.data) sq += w * w;
    r.penalty += config_.l2 * sq;
  }
  r.loss = r.cross_entropy + r.penalty;

  const int n = tr.batch;
  std::vector<double> grad = std::move(grad_logits.data);
  std::vector<double> prev;
  Eigen::MatrixXd col;
  for (std::size_t li = layers_.size(); li-- > 0;) {
    const LayerSpec& l = layers_[li];
    const std::size_t in_sz = volume(l.in_shape);
    const std::size_t out_sz = volume(l.out_shape);
    const std::vector<double>& in = tr.buffers[static_cast<std::size_t>(tr.input_buffer[li])];
    const bool need_input = li > 0;
    switch (l.kind) {
      case LayerKind::Relu:
        // The shared buffer may since have been through dropout, which only
        // zeroes entries whose gradient it has already zeroed, so the sign
        // test on the final buffer contents is still exact.
        for (std::size_t i = 0; i < grad.size(); ++i)
          if (!(in[i] > 0.0)) grad[i] = 0.0;
        continue;
      case LayerKind::Dropout:
        if (!tr.keep[li].empty()) {
          const double scale = 1.0 / (1.0 - l.rate);
          for (std::size_t i = 0; i < grad.size(); ++i) grad[i] = tr.keep[li][i] ? grad[i] * scale : 0.0;
        }
        continue;
      case LayerKind::Conv: {
        const auto g = conv_geom(l);
        prev.assign(need_input ? in_sz * n : 0, 0.0);
        double* gw = r.grads[l.param_index].ptr();
        double* gb = r.grads[l.param_index + 1].ptr();
        for (int s = 0; s < n; ++s)
          detail::conv_backward(in.data() + s * in_sz, params[l.param_index].value.ptr(),
                                grad.data() + s * out_sz, g,
                                need_input ? prev.data() + s * in_sz : nullptr, gw, gb, col);
        break;
      }
      case LayerKind::MaxPool:
        prev.assign(in_sz * n, 0.0);
        for (int s = 0; s < n; ++s)
          detail::pool_backward(grad.data() + s * out_sz, tr.argmax[li].data() + s * out_sz,
                                out_sz, prev.data() + s * in_sz);
        break;
      case LayerKind::Dense: {
        const auto rows = static_cast<Eigen::Index>(out_sz);
        const auto cols = static_cast<Eigen::Index>(in_sz);
        const ConstColMajorMap dy(grad.data(), rows, n);
        const ConstColMajorMap x(in.data(), cols, n);
        Eigen::Map<detail::RowMajorMatrix> gw(r.grads[l.param_index].ptr(), rows, cols);
        gw.noalias() += dy * x.transpose();
        double* gb = r.grads[l.param_index + 1].ptr();
        for (int s = 0; s < n; ++s)
          for (std::size_t i = 0; i < out_sz; ++i) gb[i] += grad[s * out_sz + i];
        if (need_input) {
          prev.resize(in_sz * n);
          const Eigen::Map<const detail::RowMajorMatrix> w(params[l.param_index].value.ptr(), rows,
                                                           cols);
          ColMajorMap(prev.data(), cols, n).noalias() = w.transpose() * dy;
        }
        break;
      }
    }
    grad.swap(prev);
  }

  for (std::size_t i = 0; i < params.size(); ++i) {
    if (!params[i].regularized || config_.l2 == 0.0) continue;
    auto& g = r.grads[i].data;
    const auto& w = params[i].value.data;
    for (std::size_t j = 0; j < g.size(); ++j) g[j] += 2.0 * config_.l2 * w[j];
  }
  return r;
}

}  // namespace tfr::nn
