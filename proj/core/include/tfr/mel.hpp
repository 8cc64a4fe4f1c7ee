#pragma once

#include <Eigen/Core>
#include <vector>

#include "tfr/audio_io.hpp"
#include "tfr/stft.hpp"
#include "tfr/tf_representation.hpp"

namespace tfr {

// HTK mel scale, 2595 log10(1 + f / 700).
double hz_to_mel(double hz);
double mel_to_hz(double mel);

struct MelFilterbank {
  // n_mels x n_fft_bins, unit-peak triangles.
  Eigen::MatrixXd weights;
  std::vector<double> center_frequencies;
  double f_min = 0.0;
  double f_max = 0.0;
  int sample_rate = kCanonicalRate;

  Eigen::Index num_mels() const { return weights.rows(); }
  Eigen::Index num_fft_bins() const { return weights.cols(); }
};

// Triangles with apexes at mel-equidistant centers between mel(f_min) and
// mel(f_max). A triangle never spans less than one FFT bin on either side of
// its apex, so every filter sees at least one bin. Rejects f_min >= f_max,
// f_max > fs / 2, and more filters than FFT bins.
MelFilterbank build_mel_filterbank(int n_mels, int n_fft_bins, int sample_rate,
                                   double f_min, double f_max);

TFRepresentation mel_spectrogram(const TFRepresentation& linear, const MelFilterbank& fb);

struct MelSpec {
  StftSpec stft = StftSpec::narrowband();
  int n_mels = 128;
  double f_min = 0.0;
  double f_max = 0.0;  // 0 means fs / 2

  // 2048-sample window, 512 bands.
  static MelSpec wideband();
  // 512-sample window, 128 bands.
  static MelSpec narrowband();
};

TFRepresentation mel_spectrogram(const AudioClip& clip, const MelSpec& spec);

struct MfccSpec {
  MelSpec mel = MelSpec::narrowband();
  int n_coeffs = 40;
  double log_floor = 1e-10;
};

// n x n orthonormal DCT-II matrix; row j is the j-th basis vector.
Eigen::MatrixXd dct2_matrix(int n);

// First n_coeffs rows of DCT-II(ln(mel + log_floor)) per frame.
TFRepresentation mfcc(const AudioClip& clip, const MfccSpec& spec = {});
TFRepresentation mfcc_from_mel(const TFRepresentation& mel, int n_coeffs, double log_floor);

}  // namespace tfr
