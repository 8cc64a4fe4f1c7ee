#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>

#include "oracles/oracles.hpp"
#include "support/gradcheck.hpp"
#include "tfr/error.hpp"
#include "tfr/nn/adam.hpp"
#include "tfr/nn/checkpoint.hpp"
#include "tfr/nn/layers.hpp"
#include "tfr/nn/model.hpp"
#include "tfr/nn/training.hpp"

using namespace tfr::nn;
namespace fs = std::filesystem;

namespace {

Tensor random_tensor(std::vector<int> shape, std::uint64_t seed) {
  tfr::Rng rng(seed);
  Tensor t(std::move(shape));
  for (auto& v : t.data) v = 2.0 * rng.uniform() - 1.0;
  return t;
}

oracle::T3 to_t3(const Tensor& t) {
  oracle::T3 out(t.dim(0), std::vector<std::vector<double>>(t.dim(1), std::vector<double>(t.dim(2))));
  std::size_t k = 0;
  for (auto& a : out)
    for (auto& b : a)
      for (auto& v : b) v = t.data[k++];
  return out;
}

oracle::T4 to_t4(const Tensor& t) {
  oracle::T4 out;
  const std::size_t per = Tensor::count(std::vector<int>(t.shape.begin() + 1, t.shape.end()));
  for (int o = 0; o < t.dim(0); ++o) {
    Tensor one({t.dim(1), t.dim(2), t.dim(3)});
    std::copy_n(t.data.begin() + o * per, per, one.data.begin());
    out.push_back(to_t3(one));
  }
  return out;
}

double max_abs_diff(const Tensor& a, const oracle::T3& b) {
  double worst = 0.0;
  std::size_t k = 0;
  for (const auto& x : b)
    for (const auto& y : x)
      for (double v : y) worst = std::max(worst, std::abs(a.data[k++] - v));
  return worst;
}

}  // namespace

TEST(Conv2d, Identity1x1AndOnes) {
  const auto x = random_tensor({1, 5, 6}, 1);
  EXPECT_EQ(conv2d_forward(x, Tensor({1, 1, 1, 1}, 1.0)).data, x.data);
  const auto y = conv2d_forward(Tensor({1, 6, 7}, 0.5), Tensor({1, 1, 3, 3}, 1.0));
  EXPECT_EQ(y.shape, (std::vector<int>{1, 4, 5}));
  for (double v : y.data) EXPECT_DOUBLE_EQ(v, 4.5);
}

TEST(Conv2d, MatchesNaiveOracle) {
  for (auto [pr, pc] : {std::pair{0, 0}, {1, 1}, {0, 1}}) {
    const auto x = random_tensor({3, 8, 8}, 2);
    const auto k = random_tensor({4, 3, 3, 3}, 3);
    const auto b = random_tensor({4}, 4);
    const auto y = conv2d_forward(x, k, b, {pr, pc});
    const auto want = oracle::conv2d(to_t3(x), to_t4(k), b.data, pr, pc);
    ASSERT_EQ(y.shape, (std::vector<int>{4, static_cast<int>(want[0].size()),
                                         static_cast<int>(want[0][0].size())}));
    EXPECT_LT(max_abs_diff(y, want), 1e-10);
  }
  // Frequency-spanning kernel: output height collapses to 1.
  const auto x = random_tensor({1, 37, 50}, 5);
  const auto k = random_tensor({2, 1, 37, 3}, 6);
  const auto y = conv2d_forward(x, k);
  EXPECT_EQ(y.shape, (std::vector<int>{2, 1, 48}));
  EXPECT_LT(max_abs_diff(y, oracle::conv2d(to_t3(x), to_t4(k), {}, 0, 0)), 1e-10);
  EXPECT_THROW(conv2d_forward(random_tensor({1, 2, 2}, 7), Tensor({1, 1, 3, 3})),
               std::invalid_argument);
}

TEST(Conv2d, BackwardMatchesFiniteDifferences) {
  const auto x = random_tensor({2, 6, 7}, 8);
  auto k = random_tensor({3, 2, 3, 3}, 9);
  const auto b = random_tensor({3}, 10);
  const auto gy = random_tensor({3, 6, 7}, 11);
  const Padding pad{1, 1};
  auto objective = [&](const Tensor& xx, const Tensor& kk) {
    const auto y = conv2d_forward(xx, kk, b, pad);
    double s = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) s += y.data[i] * gy.data[i];
    return s;
  };
  const auto g = conv2d_backward(x, k, gy, pad);
  const double h = 1e-5;
  auto xx = x;
  for (std::size_t i = 0; i < x.size(); i += 5) {
    xx.data[i] += h;
    const double up = objective(xx, k);
    xx.data[i] -= 2 * h;
    const double down = objective(xx, k);
    xx.data[i] = x.data[i];
    EXPECT_NEAR(g.input.data[i], (up - down) / (2 * h), 1e-7);
  }
  for (std::size_t i = 0; i < k.size(); i += 3) {
    const double keep = k.data[i];
    k.data[i] = keep + h;
    const double up = objective(x, k);
    k.data[i] = keep - h;
    const double down = objective(x, k);
    k.data[i] = keep;
    EXPECT_NEAR(g.kernels.data[i], (up - down) / (2 * h), 1e-7);
  }
  for (int o = 0; o < 3; ++o) {
    double s = 0.0;
    for (int i = 0; i < 42; ++i) s += gy.data[o * 42 + i];
    EXPECT_NEAR(g.bias.data[o], s, 1e-12);
  }
}

TEST(MaxPool, ForwardExamples) {
  Tensor x({1, 2, 2});
  x.data = {1, 2, 3, 4};
  const auto r = maxpool_forward(x, 2, 2);
  EXPECT_EQ(r.output.data, (std::vector<double>{4}));
  EXPECT_EQ(r.argmax, (std::vector<std::size_t>{3}));

  const auto c = maxpool_forward(Tensor({2, 8, 8}, 0.25), 4, 4);
  EXPECT_EQ(c.output.shape, (std::vector<int>{2, 2, 2}));
  for (double v : c.output.data) EXPECT_EQ(v, 0.25);

  // Ragged edge: 5 columns pooled by 2 -> 3 outputs, the last over one column.
  Tensor e({1, 1, 5});
  e.data = {1, 5, 2, 0, -3};
  const auto re = maxpool_forward(e, 1, 2);
  EXPECT_EQ(re.output.data, (std::vector<double>{5, 2, -3}));
}

TEST(MaxPool, GradientRoutesToArgmax) {
  const auto x = random_tensor({2, 7, 9}, 12);
  const auto r = maxpool_forward(x, 2, 3);
  EXPECT_EQ(r.output.shape, (std::vector<int>{2, 4, 3}));
  const auto gy = random_tensor(r.output.shape, 13);
  const auto gx = maxpool_backward(gy, r.argmax, x.shape);
  // Finite differences on every input element.
  const double h = 1e-6;
  auto xx = x;
  for (std::size_t i = 0; i < x.size(); ++i) {
    xx.data[i] = x.data[i] + h;
    const auto up = maxpool_forward(xx, 2, 3).output;
    xx.data[i] = x.data[i] - h;
    const auto down = maxpool_forward(xx, 2, 3).output;
    xx.data[i] = x.data[i];
    double num = 0.0;
    for (std::size_t j = 0; j < gy.size(); ++j) num += gy.data[j] * (up.data[j] - down.data[j]);
    EXPECT_NEAR(gx.data[i], num / (2 * h), 1e-8) << i;
  }
}

TEST(Model, ShapesForEveryPreset) {
  for (auto arch : {Architecture::Conv3, Architecture::Conv5})
    for (auto filter : {FilterShape::Square3x3, FilterShape::FrequencySpanning})
      for (auto [rows, cols] : {std::pair{37, 50}, {154, 12}}) {
        const auto cfg = ModelConfig::make(arch, filter, rows, cols, 10);
        const Model m(cfg);
        const auto params = m.init_params(1);
        const auto logits = m.forward(params, Tensor({3, rows, cols}, 0.1));
        EXPECT_EQ(logits.shape, (std::vector<int>{3, 10}));
        const auto& first = m.layers().front();
        EXPECT_EQ(first.kind, LayerKind::Conv);
        if (filter == FilterShape::FrequencySpanning) {
          EXPECT_EQ(first.kernel_rows, rows);
          EXPECT_EQ(first.out_shape[1], 1) << "Mx3 must collapse the frequency axis";
        } else {
          EXPECT_EQ(first.kernel_rows, 3);
        }
        int convs = 0;
        for (const auto& l : m.layers()) convs += l.kind == LayerKind::Conv;
        EXPECT_EQ(convs, arch == Architecture::Conv3 ? 1 : 3);
      }
}

TEST(Model, Conv3LayerOrder) {
  const Model m(ModelConfig::make(Architecture::Conv3, FilterShape::Square3x3, 37, 50, 50));
  std::vector<LayerKind> kinds;
  for (const auto& l : m.layers()) kinds.push_back(l.kind);
  EXPECT_EQ(kinds, (std::vector<LayerKind>{LayerKind::Conv, LayerKind::Relu, LayerKind::Dropout,
                                           LayerKind::MaxPool, LayerKind::Dense, LayerKind::Relu,
                                           LayerKind::Dropout, LayerKind::Dense}));
  // Valid convolution, then 4x4 pooling with a partial last window.
  EXPECT_EQ(m.layers()[0].out_shape, (std::vector<int>{64, 35, 48}));
  EXPECT_EQ(m.layers()[3].out_shape, (std::vector<int>{64, 9, 12}));
  EXPECT_EQ(m.layers()[4].out_shape, (std::vector<int>{512, 1, 1}));
}

TEST(Model, Conv5LayerOrder) {
  const Model m(ModelConfig::make(Architecture::Conv5, FilterShape::Square3x3, 37, 50, 10));
  std::vector<LayerKind> kinds;
  for (const auto& l : m.layers()) kinds.push_back(l.kind);
  using K = LayerKind;
  EXPECT_EQ(kinds, (std::vector<K>{K::Conv, K::Relu, K::Dropout, K::MaxPool, K::Conv, K::Relu,
                                   K::MaxPool, K::Conv, K::Relu, K::MaxPool, K::Dense, K::Relu,
                                   K::Dropout, K::Dense}));
}

TEST(Model, ConfigValidation) {
  auto cfg = ModelConfig::make(Architecture::Conv5, FilterShape::Square3x3, 37, 50, 10);
  cfg.conv_channels = {8};
  EXPECT_THROW(Model{cfg}, std::invalid_argument);
  cfg = ModelConfig::make(Architecture::Conv3, FilterShape::Square3x3, 37, 50, 1);
  EXPECT_THROW(Model{cfg}, std::invalid_argument);
  cfg.num_classes = 3;
  cfg.dropout = 1.0;
  EXPECT_THROW(Model{cfg}, std::invalid_argument);
  EXPECT_EQ(parse_filter("Mx3"), FilterShape::FrequencySpanning);
  EXPECT_EQ(parse_filter("3x3"), FilterShape::Square3x3);
  EXPECT_EQ(parse_architecture("conv5"), Architecture::Conv5);
  EXPECT_THROW(parse_architecture("conv4"), std::invalid_argument);
}

TEST(Model, ForwardRejectsWrongShapes) {
  const Model m(gradcheck::toy_config(Architecture::Conv3, FilterShape::Square3x3, 0.0));
  const auto p = m.init_params(1);
  EXPECT_THROW(m.forward(p, Tensor({2, 9, 10})), std::invalid_argument);
  auto q = p;
  q.pop_back();
  EXPECT_THROW(m.forward(q, Tensor({2, 8, 10})), std::invalid_argument);
}

TEST(Model, DropoutPaths) {
  auto cfg = gradcheck::toy_config(Architecture::Conv3, FilterShape::Square3x3, 0.0);
  const auto batch = gradcheck::random_batch(5, 8, 10, 20);
  {
    const Model m(cfg);
    const auto p = m.init_params(3, 0.3);
    tfr::Rng rng(1);
    // Rate 0 in train mode is the inference path, bit for bit.
    EXPECT_EQ(m.forward(p, batch, &rng), m.forward(p, batch));
    EXPECT_EQ(m.forward(p, batch), m.forward(p, batch));
  }
  cfg.dropout = 0.5;
  const Model m(cfg);
  const auto p = m.init_params(3, 0.3);
  tfr::Rng a(1), b(1), c(2);
  const auto ya = m.forward(p, batch, &a);
  EXPECT_EQ(ya, m.forward(p, batch, &b));
  EXPECT_NE(ya, m.forward(p, batch, &c));
  EXPECT_NE(ya, m.forward(p, batch));
}

TEST(Model, InitStatistics) {
  auto cfg = ModelConfig::make(Architecture::Conv3, FilterShape::Square3x3, 37, 50, 10);
  const Model m(cfg);
  const auto p = m.init_params(11);
  EXPECT_EQ(p, m.init_params(11));
  EXPECT_NE(p, m.init_params(12));
  const double sigma = 0.05;
  // Truncated at +-2 sigma: sd = sigma * sqrt(1 - 2*2*phi(2) / (2*Phi(2) - 1)).
  const double phi2 = std::exp(-2.0) / std::sqrt(2.0 * oracle::kPi);
  const double mass = std::erf(2.0 / std::sqrt(2.0));
  const double sd_eff = sigma * std::sqrt(1.0 - 4.0 * phi2 / mass);
  EXPECT_NEAR(sd_eff / sigma, 0.880, 5e-3);
  double sum = 0.0, sq = 0.0;
  std::size_t n = 0;
  for (const auto& q : p) {
    if (!q.regularized) {
      for (double v : q.value.data) EXPECT_EQ(v, 0.0);
      continue;
    }
    for (double v : q.value.data) {
      ASSERT_LE(std::abs(v), 2.0 * sigma);
      sum += v;
      sq += v * v;
      ++n;
    }
  }
  ASSERT_GT(n, 100000u);
  const double mean = sum / n;
  const double sd = std::sqrt(sq / n - mean * mean);
  EXPECT_NEAR(sd, sd_eff, 0.05 * sd_eff);
  EXPECT_EQ(p[0].name, "conv1.weight");
  EXPECT_EQ(p[1].name, "conv1.bias");
  EXPECT_EQ(p.back().name, "dense2.bias");
}

TEST(Loss, UniformLogitsAndLimit) {
  Tensor logits({2, 50}, 0.0);
  const std::vector<int> labels{3, 49};
  Tensor grad;
  EXPECT_NEAR(softmax_cross_entropy(logits, labels, &grad), std::log(50.0), 1e-12);
  EXPECT_NEAR(grad.data[3], (1.0 / 50 - 1.0) / 2.0, 1e-15);
  EXPECT_NEAR(grad.data[0], 1.0 / 50 / 2.0, 1e-15);

  double prev = 1e9;
  for (double scale : {1.0, 10.0, 100.0, 1000.0}) {
    Tensor l({1, 4}, 0.0);
    l.data[2] = scale;
    const double ce = softmax_cross_entropy(l, std::vector<int>{2});
    EXPECT_LE(ce, prev);
    EXPECT_TRUE(std::isfinite(ce));
    prev = ce;
  }
  EXPECT_LT(prev, 1e-12);
  EXPECT_THROW(softmax_cross_entropy(logits, std::vector<int>{0, 50}), std::invalid_argument);
}

TEST(Loss, L2Penalty) {
  auto cfg = gradcheck::toy_config(Architecture::Conv3, FilterShape::Square3x3, 0.0);
  const auto batch = gradcheck::random_batch(4, 8, 10, 30);
  const std::vector<int> labels{0, 1, 2, 0};
  cfg.l2 = 0.0;
  const Model plain(cfg);
  const auto p = plain.init_params(5, 0.3);
  const auto r0 = plain.loss_and_grads(p, batch, labels);
  EXPECT_EQ(r0.penalty, 0.0);
  cfg.l2 = 1e-2;
  const Model reg(cfg);
  const auto r1 = reg.loss_and_grads(p, batch, labels);
  EXPECT_EQ(r1.cross_entropy, r0.cross_entropy);
  EXPECT_GT(r1.loss, r0.loss);
  double sw = 0.0;
  for (const auto& q : p)
    if (q.regularized)
      for (double v : q.value.data) sw += v * v;
  EXPECT_NEAR(r1.penalty, 1e-2 * sw, 1e-12);
  EXPECT_NEAR(r1.loss, r1.cross_entropy + r1.penalty, 1e-12);
}

class GradientCheck : public ::testing::TestWithParam<std::tuple<Architecture, FilterShape, double>> {};

TEST_P(GradientCheck, MatchesCentralDifferences) {
  const auto [arch, filter, dropout] = GetParam();
  const auto worst = gradcheck::check(gradcheck::toy_config(arch, filter, dropout), 42);
  EXPECT_GT(worst.checked, 50u);
  EXPECT_LE(worst.kinks * 100, worst.checked);
  EXPECT_LT(worst.rel_error, 1e-4) << worst.param << "[" << worst.index << "]";
}

INSTANTIATE_TEST_SUITE_P(
    Toy, GradientCheck,
    ::testing::Combine(::testing::Values(Architecture::Conv3, Architecture::Conv5),
                       ::testing::Values(FilterShape::Square3x3, FilterShape::FrequencySpanning),
                       ::testing::Values(0.0, 0.5)));

TEST(Adam, ZeroGradientLeavesParams) {
  const Model m(gradcheck::toy_config(Architecture::Conv3, FilterShape::Square3x3, 0.0));
  auto p = m.init_params(1);
  const auto before = p;
  auto st = make_adam_state(p);
  Gradients g;
  for (const auto& q : p) g.emplace_back(q.value.shape, 0.0);
  adam_step(p, g, st, {});
  EXPECT_EQ(p, before);
  EXPECT_EQ(st.step, 1);
}

TEST(Adam, ConstantGradientStepsByLearningRate) {
  Parameters p{{"w", Tensor({3}, 0.0), true}};
  Gradients g{Tensor({3})};
  g[0].data = {0.5, -2.0, 1e-3};
  auto st = make_adam_state(p);
  AdamConfig cfg;
  cfg.learning_rate = 0.01;
  for (int t = 0; t < 200; ++t) {
    const auto before = p[0].value.data;
    adam_step(p, g, st, cfg);
    for (int i = 0; i < 3; ++i) {
      const double step = p[0].value.data[i] - before[i];
      EXPECT_NEAR(step, -cfg.learning_rate * (g[0].data[i] > 0 ? 1.0 : -1.0), 1e-6 * 0.01 + 1e-5);
    }
  }
}

TEST(Training, DeterministicTrajectories) {
  const auto cfg = gradcheck::toy_config(Architecture::Conv3, FilterShape::Square3x3, 0.5);
  const Model m(cfg);
  const auto batch = gradcheck::random_batch(30, 8, 10, 50);
  std::vector<int> labels(30);
  for (int i = 0; i < 30; ++i) labels[i] = i % 3;
  const ImageBatchSource src{batch.data, 8, 10, labels};
  TrainConfig tc;
  tc.batch_size = 7;
  auto run = [&] {
    auto p = m.init_params(9);
    auto st = make_adam_state(p);
    tfr::Rng rng(10);
    std::vector<std::size_t> order(30);
    std::iota(order.begin(), order.end(), 0);
    std::vector<double> losses;
    for (int e = 0; e < 3; ++e) losses.push_back(train_epoch(m, p, st, tc, src, order, rng).mean_loss);
    return std::pair{p, losses};
  };
  EXPECT_EQ(run(), run());
}

TEST(Training, OverfitsTwentySamples) {
  const auto cfg = ModelConfig::make(Architecture::Conv3, FilterShape::Square3x3, 37, 50, 4);
  const Model m(cfg);
  const auto batch = gradcheck::random_batch(20, 37, 50, 60);
  std::vector<int> labels(20);
  for (int i = 0; i < 20; ++i) labels[i] = (i * 7) % 4;
  const ImageBatchSource src{batch.data, 37, 50, labels};
  TrainConfig tc;
  auto p = m.init_params(1);
  auto st = make_adam_state(p);
  tfr::Rng rng(2);
  std::vector<std::size_t> order(20);
  std::iota(order.begin(), order.end(), 0);
  int steps = 0;
  double acc = 0.0;
  while (steps < 500) {
    train_epoch(m, p, st, tc, src, order, rng);  // one step: 20 < batch size
    ++steps;
    const auto pred = predict_all(m, p, src, order);
    int hit = 0;
    for (std::size_t i = 0; i < order.size(); ++i) hit += pred[i] == labels[order[i]];
    acc = hit / 20.0;
    if (acc == 1.0) break;
  }
  EXPECT_EQ(acc, 1.0) << "after " << steps << " steps";
}

TEST(Checkpoint, RoundTripAndErrors) {
  const auto dir = fs::temp_directory_path() / "tfr_nn_ckpt";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const auto cfg = gradcheck::toy_config(Architecture::Conv5, FilterShape::Square3x3, 0.5);
  const Model m(cfg);
  const auto p = m.init_params(4);
  save_checkpoint(dir / "a.nnck", cfg, p);
  const auto back = load_checkpoint(dir / "a.nnck", cfg);
  ASSERT_EQ(back.size(), p.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    EXPECT_EQ(back[i].name, p[i].name);
    EXPECT_EQ(back[i].value.shape, p[i].value.shape);
    EXPECT_EQ(back[i].regularized, p[i].regularized);
    for (std::size_t j = 0; j < p[i].value.size(); ++j)
      ASSERT_EQ(back[i].value.data[j], static_cast<double>(static_cast<float>(p[i].value.data[j])));
  }
  // Dropout and l2 do not change the layout.
  auto same = cfg;
  same.dropout = 0.1;
  EXPECT_NO_THROW(load_checkpoint(dir / "a.nnck", same));
  auto other = cfg;
  other.dense_units = 7;
  EXPECT_THROW(load_checkpoint(dir / "a.nnck", other), tfr::Error);

  std::ifstream in(dir / "a.nnck", std::ios::binary);
  std::string bytes((std::istreambuf_iterator<char>(in)), {});
  auto write = [&](const std::string& s) { std::ofstream(dir / "b.nnck", std::ios::binary) << s; };
  write(bytes.substr(0, bytes.size() - 3));
  EXPECT_THROW(load_checkpoint(dir / "b.nnck", cfg), tfr::Error);
  write("XXCK" + bytes.substr(4));
  EXPECT_THROW(load_checkpoint(dir / "b.nnck", cfg), tfr::Error);
  write(bytes + "z");
  EXPECT_THROW(load_checkpoint(dir / "b.nnck", cfg), tfr::Error);
  EXPECT_THROW(load_checkpoint(dir / "missing.nnck", cfg), tfr::Error);
  fs::remove_all(dir);
}
