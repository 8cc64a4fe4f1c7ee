#pragma once

#include <Eigen/Core>
#include <cstddef>
#include <span>
#include <vector>

#include "tfr/audio_io.hpp"
#include "tfr/tf_representation.hpp"

namespace tfr {

struct StftSpec {
  int window_length = 512;
  int hop = 256;
  int dft_size = 512;
  bool centered = true;

  // L = 2048, hop L/2.
  static StftSpec wideband();
  // L = 512, hop L/2.
  static StftSpec narrowband();
  static StftSpec with_window(int window_length);

  std::size_t num_bins() const { return static_cast<std::size_t>(dft_size / 2 + 1); }
  std::size_t num_frames(std::size_t signal_length) const;

  // hop == L/2, N == L, L even and >= 2.
  void validate() const;
};

// Periodic Hann window: w[n] = 0.5 (1 - cos(2 pi n / L)).
std::vector<double> hann_window(int length);

struct StftResult {
  // (N/2 + 1) x frames, one-sided.
  Eigen::MatrixXcd coefficients;
  StftSpec spec;
  int sample_rate = kCanonicalRate;
};

// Frame t is centered on sample t * hop; the signal is reflection padded by
// L/2 on each side, so there are 1 + floor(len / hop) frames.
StftResult stft(std::span<const double> samples, const StftSpec& spec,
                int sample_rate = kCanonicalRate);
StftResult stft(const AudioClip& clip, const StftSpec& spec);

// |X|^2 with bin frequencies k fs / N and frame times t hop / fs.
TFRepresentation power_spectrogram(const StftResult& result);

inline TFRepresentation linear_spectrogram(const AudioClip& clip, const StftSpec& spec) {
  return power_spectrogram(stft(clip, spec));
}

}  // namespace tfr
