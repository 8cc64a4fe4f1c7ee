#include "tfr/cqt.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "tfr/error.hpp"
#include "tfr/signal.hpp"
#include "tfr/stft.hpp"

namespace tfr {

CqtSpec CqtSpec::wideband() { return {1024, 128, kCqtMinFrequency, kCanonicalRate, 1024}; }
CqtSpec CqtSpec::narrowband() { return {256, 32, kCqtMinFrequency, kCanonicalRate, 256}; }

double CqtSpec::q_factor() const { return 1.0 / (std::exp2(1.0 / bins_per_octave) - 1.0); }

std::size_t CqtSpec::num_frames(std::size_t signal_length) const {
  return 1 + signal_length / static_cast<std::size_t>(hop);
}

void CqtSpec::validate() const {
  if (n_bins < 1 || bins_per_octave < 1 || hop < 1 || sample_rate < 1 || !(f_min > 0.0))
    throw Error("CqtSpec: bins, bins per octave, hop, rate and f_min must be positive");
  const double top = f_min * std::exp2(static_cast<double>(n_bins - 1) / bins_per_octave);
  if (top > sample_rate / 2.0) {
    throw Error("CqtSpec: top bin " + std::to_string(top) + " Hz exceeds Nyquist");
  }
}

std::vector<double> cqt_center_frequencies(const CqtSpec& spec) {
  spec.validate();
  std::vector<double> f(static_cast<std::size_t>(spec.n_bins));
  for (int k = 0; k < spec.n_bins; ++k) {
    f[static_cast<std::size_t>(k)] =
        spec.f_min * std::exp2(static_cast<double>(k) / spec.bins_per_octave);
  }
  return f;
}

CqtKernel::CqtKernel(const CqtSpec& spec)
    : spec_(spec), q_(spec.q_factor()), frequencies_(cqt_center_frequencies(spec)) {
  lengths_.reserve(frequencies_.size());
  for (double fk : frequencies_) {
    lengths_.push_back(static_cast<std::size_t>(std::ceil(q_ * spec.sample_rate / fk)));
  }
}

Eigen::Matrix<double, 2, Eigen::Dynamic> CqtKernel::atom(std::size_t k) const {
  const std::size_t n = lengths_.at(k);
  const std::vector<double> w = hann_window(static_cast<int>(std::max<std::size_t>(n, 2)));
  Eigen::Matrix<double, 2, Eigen::Dynamic> atom(2, static_cast<Eigen::Index>(n));
  const double step = 2.0 * std::numbers::pi * q_ / static_cast<double>(n);
  for (std::size_t m = 0; m < n; ++m) {
    const double a = w[m] / static_cast<double>(n);
    const double phase = step * static_cast<double>(m);
    atom(0, static_cast<Eigen::Index>(m)) = a * std::cos(phase);
    atom(1, static_cast<Eigen::Index>(m)) = -a * std::sin(phase);
  }
  return atom;
}

Eigen::MatrixXcd cqt_coefficients(std::span<const double> samples, const CqtKernel& kernel) {
  const CqtSpec& spec = kernel.spec();
  if (samples.empty()) throw Error("cqt: empty signal");
  const std::size_t frames = spec.num_frames(samples.size());
  const std::size_t hop = static_cast<std::size_t>(spec.hop);
  const std::size_t left = kernel.max_length() / 2;
  const std::size_t right = kernel.max_length() + 1;
  const std::vector<double> padded = reflect_pad(samples, left, right);

  const auto n_bins = static_cast<Eigen::Index>(kernel.lengths().size());
  Eigen::MatrixXcd out(n_bins, static_cast<Eigen::Index>(frames));
  using Segments = Eigen::Map<const Eigen::MatrixXd, 0, Eigen::OuterStride<>>;
  for (Eigen::Index k = 0; k < n_bins; ++k) {
    const std::size_t n = kernel.lengths()[static_cast<std::size_t>(k)];
    // Column t of `segments` is the window of frame t (columns overlap).
    const Segments segments(padded.data() + left - n / 2, static_cast<Eigen::Index>(n),
                            static_cast<Eigen::Index>(frames),
                            Eigen::OuterStride<>(static_cast<Eigen::Index>(hop)));
    const Eigen::Matrix<double, 2, Eigen::Dynamic> prod =
        kernel.atom(static_cast<std::size_t>(k)) * segments;
    for (Eigen::Index t = 0; t < out.cols(); ++t) out(k, t) = {prod(0, t), prod(1, t)};
  }
  return out;
}

TFRepresentation cqt(const AudioClip& clip, const CqtKernel& kernel) {
  if (clip.sample_rate != kernel.spec().sample_rate)
    throw std::invalid_argument("cqt: clip rate does not match the kernel");
  TFRepresentation tf;
  tf.kind = TfKind::Cqt;
  tf.values = cqt_coefficients(clip.samples, kernel).cwiseAbs2();
  tf.bin_frequencies = kernel.frequencies();
  tf.frame_times.resize(static_cast<std::size_t>(tf.values.cols()));
  for (std::size_t t = 0; t < tf.frame_times.size(); ++t) {
    tf.frame_times[t] = static_cast<double>(t) * kernel.spec().hop / clip.sample_rate;
  }
  return tf;
}

TFRepresentation cqt(const AudioClip& clip, const CqtSpec& spec) {
  return cqt(clip, CqtKernel(spec));
}

}  // namespace tfr
