#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

#include "tfr/error.hpp"
#include "tfr/rng.hpp"
#include "tfr/signal.hpp"
#include "tfr/tf_representation.hpp"

namespace tfr {

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t Rng::below(std::uint64_t n) {
  if (n == 0) throw std::invalid_argument("Rng::below: n must be positive");
  // Rejection sampling to avoid modulo bias.
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % n;
  std::uint64_t r;
  do {
    r = engine_();
  } while (r >= limit);
  return r % n;
}

double Rng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u1;
  do {
    u1 = uniform();
  } while (u1 <= 0.0);
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double theta = 2.0 * std::numbers::pi * u2;
  spare_ = r * std::sin(theta);
  has_spare_ = true;
  return r * std::cos(theta);
}

double Rng::truncated_normal(double sigma, double bound) {
  for (;;) {
    const double z = normal();
    if (std::abs(z) <= bound) return z * sigma;
  }
}

std::ptrdiff_t reflect_index(std::ptrdiff_t i, std::ptrdiff_t n) {
  if (n <= 0) throw std::invalid_argument("reflect_index: empty signal");
  if (n == 1) return 0;
  const std::ptrdiff_t period = 2 * (n - 1);
  std::ptrdiff_t r = i % period;
  if (r < 0) r += period;
  return r < n ? r : period - r;
}

std::vector<double> reflect_pad(std::span<const double> x, std::size_t left, std::size_t right) {
  const auto n = static_cast<std::ptrdiff_t>(x.size());
  std::vector<double> out(x.size() + left + right);
  for (std::size_t j = 0; j < out.size(); ++j) {
    const auto i = static_cast<std::ptrdiff_t>(j) - static_cast<std::ptrdiff_t>(left);
    out[j] = x[static_cast<std::size_t>(reflect_index(i, n))];
  }
  return out;
}

std::string_view to_string(TfKind kind) {
  switch (kind) {
    case TfKind::LinearStft: return "linear-stft";
    case TfKind::Mel: return "mel";
    case TfKind::Cqt: return "cqt";
    case TfKind::Cwt: return "cwt";
    case TfKind::Mfcc: return "mfcc";
  }
  return "unknown";
}

TfKind parse_kind(std::string_view name) {
  for (auto k : {TfKind::LinearStft, TfKind::Mel, TfKind::Cqt, TfKind::Cwt, TfKind::Mfcc}) {
    if (to_string(k) == name) return k;
  }
  throw std::invalid_argument("unknown representation kind: " + std::string(name));
}

void validate(const TFRepresentation& tf) {
  if (static_cast<Eigen::Index>(tf.bin_frequencies.size()) != tf.bins())
    throw Error("TFRepresentation: bin_frequencies size mismatch");
  if (static_cast<Eigen::Index>(tf.frame_times.size()) != tf.frames())
    throw Error("TFRepresentation: frame_times size mismatch");
  if (!tf.values.allFinite()) throw Error("TFRepresentation: non-finite values");
  if (tf.kind == TfKind::Mfcc) return;
  if ((tf.values.array() < 0.0).any()) throw Error("TFRepresentation: negative power");
  for (std::size_t i = 1; i < tf.bin_frequencies.size(); ++i) {
    if (!(tf.bin_frequencies[i] > tf.bin_frequencies[i - 1]))
      throw Error("TFRepresentation: bin frequencies not strictly increasing");
  }
}

}  // namespace tfr
