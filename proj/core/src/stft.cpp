#include "tfr/stft.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "fft.hpp"
#include "tfr/error.hpp"
#include "tfr/signal.hpp"

namespace tfr {

StftSpec StftSpec::with_window(int window_length) {
  return {window_length, window_length / 2, window_length, true};
}

StftSpec StftSpec::wideband() { return with_window(2048); }
StftSpec StftSpec::narrowband() { return with_window(512); }

std::size_t StftSpec::num_frames(std::size_t signal_length) const {
  if (centered) return 1 + signal_length / static_cast<std::size_t>(hop);
  if (signal_length < static_cast<std::size_t>(window_length)) return 0;
  return 1 + (signal_length - static_cast<std::size_t>(window_length)) / static_cast<std::size_t>(hop);
}

void StftSpec::validate() const {
  if (window_length < 2 || window_length % 2 != 0)
    throw std::invalid_argument("StftSpec: window length must be even and >= 2");
  if (hop != window_length / 2) throw std::invalid_argument("StftSpec: hop must be L/2");
  if (dft_size != window_length) throw std::invalid_argument("StftSpec: DFT size must equal L");
}

std::vector<double> hann_window(int length) {
  if (length < 2) throw std::invalid_argument("hann_window: length must be >= 2");
  std::vector<double> w(static_cast<std::size_t>(length));
  for (int n = 0; n < length; ++n) {
    w[static_cast<std::size_t>(n)] = 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * n / length));
  }
  return w;
}

StftResult stft(std::span<const double> samples, const StftSpec& spec, int sample_rate) {
  spec.validate();
  const auto L = static_cast<std::size_t>(spec.window_length);
  const auto hop = static_cast<std::size_t>(spec.hop);
  const std::size_t frames = spec.num_frames(samples.size());
  if (frames == 0 || (spec.centered && samples.size() <= L / 2)) {
    throw Error("stft: signal of " + std::to_string(samples.size()) +
                " samples is shorter than one window");
  }

  const std::vector<double> padded =
      spec.centered ? reflect_pad(samples, L / 2, L / 2)
                    : std::vector<double>(samples.begin(), samples.end());
  const std::vector<double> window = hann_window(spec.window_length);

  StftResult result;
  result.spec = spec;
  result.sample_rate = sample_rate;
  result.coefficients.resize(static_cast<Eigen::Index>(spec.num_bins()),
                             static_cast<Eigen::Index>(frames));

  detail::RealFft fft(static_cast<std::size_t>(spec.dft_size));
  std::vector<double> frame(L);
  for (std::size_t t = 0; t < frames; ++t) {
    const double* src = padded.data() + t * hop;
    for (std::size_t m = 0; m < L; ++m) frame[m] = src[m] * window[m];
    auto col = result.coefficients.col(static_cast<Eigen::Index>(t));
    fft.forward(frame, std::span<std::complex<double>>(col.data(), spec.num_bins()));
  }
  return result;
}

StftResult stft(const AudioClip& clip, const StftSpec& spec) {
  return stft(clip.samples, spec, clip.sample_rate);
}

TFRepresentation power_spectrogram(const StftResult& result) {
  TFRepresentation tf;
  tf.kind = TfKind::LinearStft;
  tf.values = result.coefficients.cwiseAbs2();
  tf.bin_frequencies.resize(static_cast<std::size_t>(tf.values.rows()));
  for (std::size_t k = 0; k < tf.bin_frequencies.size(); ++k) {
    tf.bin_frequencies[k] = static_cast<double>(k) * result.sample_rate / result.spec.dft_size;
  }
  tf.frame_times.resize(static_cast<std::size_t>(tf.values.cols()));
  for (std::size_t t = 0; t < tf.frame_times.size(); ++t) {
    tf.frame_times[t] = static_cast<double>(t * static_cast<std::size_t>(result.spec.hop)) /
                        result.sample_rate;
  }
  return tf;
}

}  // namespace tfr
