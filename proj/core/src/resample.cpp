#include <cmath>
#include <cstdint>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "tfr/audio_io.hpp"
#include "tfr/signal.hpp"

namespace tfr {
namespace {

constexpr double kKaiserBeta = 14.77;
constexpr int kZeroCrossings = 64;
// Above this many distinct phases, kernels are evaluated per output sample.
constexpr std::int64_t kMaxCachedPhases = 4096;

double sinc(double x) {
  if (x == 0.0) return 1.0;
  const double px = std::numbers::pi * x;
  return std::sin(px) / px;
}

class SincKernel {
 public:
  SincKernel(int source_rate, int target_rate)
      : cutoff_(std::min(1.0, static_cast<double>(target_rate) / source_rate)),
        half_width_(kZeroCrossings / cutoff_),
        reach_(static_cast<int>(std::ceil(half_width_))),
        inv_i0_beta_(1.0 / std::cyl_bessel_i(0.0, kKaiserBeta)) {}

  int reach() const { return reach_; }
  std::size_t taps() const { return static_cast<std::size_t>(2 * reach_ + 2); }

  // Taps for input offsets -reach .. reach + 1 around floor(t), where frac is
  // t - floor(t). Normalized to unit sum so DC passes unchanged.
  void fill(double frac, double* out) const {
    double sum = 0.0;
    for (int o = -reach_; o <= reach_ + 1; ++o) {
      const double u = frac - o;
      double h = 0.0;
      if (std::abs(u) < half_width_) {
        const double r = u / half_width_;
        const double window = std::cyl_bessel_i(0.0, kKaiserBeta * std::sqrt(1.0 - r * r)) * inv_i0_beta_;
        h = cutoff_ * sinc(cutoff_ * u) * window;
      }
      out[o + reach_] = h;
      sum += h;
    }
    for (std::size_t i = 0; i < taps(); ++i) out[i] /= sum;
  }

 private:
  double cutoff_;
  double half_width_;
  int reach_;
  double inv_i0_beta_;
};

}  // namespace

AudioClip resample(const AudioClip& clip, int target_rate) {
  if (clip.sample_rate <= 0 || target_rate <= 0)
    throw std::invalid_argument("resample: sample rates must be positive");
  if (clip.sample_rate == target_rate) return clip;

  const std::int64_t src = clip.sample_rate;
  const std::int64_t dst = target_rate;
  const auto len = static_cast<std::int64_t>(clip.samples.size());
  const std::int64_t out_len = (len * dst + src / 2) / src;

  AudioClip out;
  out.sample_rate = target_rate;
  out.samples.assign(static_cast<std::size_t>(out_len), 0.0);
  if (len == 0 || out_len == 0) return out;

  const SincKernel kernel(clip.sample_rate, target_rate);
  const std::size_t taps = kernel.taps();
  const std::int64_t g = std::gcd(src, dst);
  const std::int64_t phases = dst / g;
  const bool cached = phases <= kMaxCachedPhases;

  std::vector<double> table;
  if (cached) {
    table.resize(static_cast<std::size_t>(phases) * taps);
    for (std::int64_t p = 0; p < phases; ++p) {
      kernel.fill(static_cast<double>(p * g) / dst, &table[static_cast<std::size_t>(p) * taps]);
    }
  }
  std::vector<double> scratch(taps);

  // Input position of output n is n * src / dst, split into integer part
  // and phase numerator to stay exact.
  for (std::int64_t n = 0; n < out_len; ++n) {
    const std::int64_t num = n * src;
    const std::int64_t base = num / dst;
    const std::int64_t rem = num % dst;
    const double* h;
    if (cached) {
      h = &table[static_cast<std::size_t>(rem / g) * taps];
    } else {
      kernel.fill(static_cast<double>(rem) / dst, scratch.data());
      h = scratch.data();
    }
    double acc = 0.0;
    const std::int64_t first = base - kernel.reach();
    if (first >= 0 && first + static_cast<std::int64_t>(taps) <= len) {
      const double* x = clip.samples.data() + first;
      for (std::size_t i = 0; i < taps; ++i) acc += x[i] * h[i];
    } else {
      for (std::size_t i = 0; i < taps; ++i) {
        const auto idx = reflect_index(first + static_cast<std::int64_t>(i), len);
        acc += clip.samples[static_cast<std::size_t>(idx)] * h[i];
      }
    }
    out.samples[static_cast<std::size_t>(n)] = acc;
  }
  return out;
}

}  // namespace tfr
