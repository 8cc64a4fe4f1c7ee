#include "tfr/mel.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "tfr/error.hpp"

namespace tfr {

double hz_to_mel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }

double mel_to_hz(double mel) { return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0); }

MelFilterbank build_mel_filterbank(int n_mels, int n_fft_bins, int sample_rate, double f_min,
                                   double f_max) {
  if (n_mels < 1) throw Error("mel filterbank: need at least one band");
  if (n_fft_bins < 2) throw Error("mel filterbank: need at least two FFT bins");
  if (sample_rate <= 0) throw Error("mel filterbank: sample rate must be positive");
  const double nyquist = sample_rate / 2.0;
  if (f_min < 0.0 || !(f_min < f_max) || f_max > nyquist * (1.0 + 1e-12)) {
    throw Error("mel filterbank: need 0 <= f_min < f_max <= fs/2");
  }
  // Distinct triangles cannot outnumber the bins they are sampled on.
  if (n_mels > n_fft_bins) {
    throw Error("mel filterbank: " + std::to_string(n_mels) + " bands over " +
                std::to_string(n_fft_bins) + " FFT bins leaves empty filters");
  }

  const int dft_size = 2 * (n_fft_bins - 1);
  const double bin_width = static_cast<double>(sample_rate) / dft_size;
  const double mel_lo = hz_to_mel(f_min);
  const double mel_hi = hz_to_mel(f_max);
  std::vector<double> edges(static_cast<std::size_t>(n_mels) + 2);
  for (std::size_t i = 0; i < edges.size(); ++i) {
    edges[i] = mel_to_hz(mel_lo + (mel_hi - mel_lo) * static_cast<double>(i) / (n_mels + 1));
  }

  MelFilterbank fb;
  fb.f_min = f_min;
  fb.f_max = f_max;
  fb.sample_rate = sample_rate;
  fb.weights = Eigen::MatrixXd::Zero(n_mels, n_fft_bins);
  fb.center_frequencies.resize(static_cast<std::size_t>(n_mels));

  for (int m = 0; m < n_mels; ++m) {
    const double center = edges[static_cast<std::size_t>(m) + 1];
    // Below ~1.3 kHz the mel spacing is finer than the FFT grid; each slope
    // is kept at least one bin wide.
    const double lower = std::min(edges[static_cast<std::size_t>(m)], center - bin_width);
    const double upper = std::max(edges[static_cast<std::size_t>(m) + 2], center + bin_width);
    fb.center_frequencies[static_cast<std::size_t>(m)] = center;
    bool any = false;
    for (int k = 0; k < n_fft_bins; ++k) {
      const double f = k * bin_width;
      double w = 0.0;
      if (f > lower && f < center) {
        w = (f - lower) / (center - lower);
      } else if (f >= center && f < upper) {
        w = (upper - f) / (upper - center);
      }
      fb.weights(m, k) = w;
      any = any || w > 0.0;
    }
    if (!any) throw Error("mel filterbank: band " + std::to_string(m) + " is empty");
  }
  return fb;
}

TFRepresentation mel_spectrogram(const TFRepresentation& linear, const MelFilterbank& fb) {
  if (linear.kind != TfKind::LinearStft)
    throw std::invalid_argument("mel_spectrogram: input must be a linear STFT spectrogram");
  if (linear.bins() != fb.num_fft_bins()) {
    throw std::invalid_argument("mel_spectrogram: filterbank has " +
                                std::to_string(fb.num_fft_bins()) + " bins, spectrogram has " +
                                std::to_string(linear.bins()));
  }
  TFRepresentation out;
  out.kind = TfKind::Mel;
  out.values = fb.weights * linear.values;
  out.bin_frequencies = fb.center_frequencies;
  out.frame_times = linear.frame_times;
  return out;
}

MelSpec MelSpec::wideband() { return {StftSpec::wideband(), 512, 0.0, 0.0}; }
MelSpec MelSpec::narrowband() { return {StftSpec::narrowband(), 128, 0.0, 0.0}; }

TFRepresentation mel_spectrogram(const AudioClip& clip, const MelSpec& spec) {
  const double f_max = spec.f_max > 0.0 ? spec.f_max : clip.sample_rate / 2.0;
  const auto fb = build_mel_filterbank(spec.n_mels, static_cast<int>(spec.stft.num_bins()),
                                       clip.sample_rate, spec.f_min, f_max);
  return mel_spectrogram(linear_spectrogram(clip, spec.stft), fb);
}

Eigen::MatrixXd dct2_matrix(int n) {
  if (n < 1) throw std::invalid_argument("dct2_matrix: n must be >= 1");
  Eigen::MatrixXd d(n, n);
  const double s0 = std::sqrt(1.0 / n);
  const double s = std::sqrt(2.0 / n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      d(j, i) = (j == 0 ? s0 : s) * std::cos(std::numbers::pi * j * (2 * i + 1) / (2.0 * n));
    }
  }
  return d;
}

TFRepresentation mfcc_from_mel(const TFRepresentation& mel, int n_coeffs, double log_floor) {
  if (mel.kind != TfKind::Mel) throw std::invalid_argument("mfcc: input must be a mel spectrogram");
  if (n_coeffs < 1 || n_coeffs > mel.bins()) {
    throw std::invalid_argument("mfcc: n_coeffs " + std::to_string(n_coeffs) +
                                " exceeds the " + std::to_string(mel.bins()) + " mel bands");
  }
  const Eigen::MatrixXd basis = dct2_matrix(static_cast<int>(mel.bins())).topRows(n_coeffs);
  Eigen::MatrixXd log_mel = (mel.values.array() + log_floor).log().matrix();
  // Basis rows k >= 1 sum to zero, so the column mean only feeds c0. Taking
  // it out first keeps flat spectra (silence) exactly zero in c1.. instead
  // of rounding noise.
  const Eigen::RowVectorXd mean = log_mel.colwise().mean();
  log_mel.rowwise() -= mean;

  TFRepresentation out;
  out.kind = TfKind::Mfcc;
  out.values = basis * log_mel;
  out.values.row(0) += std::sqrt(static_cast<double>(mel.bins())) * mean;
  out.bin_frequencies.resize(static_cast<std::size_t>(n_coeffs));
  for (int j = 0; j < n_coeffs; ++j) out.bin_frequencies[static_cast<std::size_t>(j)] = j;
  out.frame_times = mel.frame_times;
  return out;
}

TFRepresentation mfcc(const AudioClip& clip, const MfccSpec& spec) {
  if (spec.n_coeffs > spec.mel.n_mels) {
    throw std::invalid_argument("mfcc: n_coeffs exceeds mel band count");
  }
  return mfcc_from_mel(mel_spectrogram(clip, spec.mel), spec.n_coeffs, spec.log_floor);
}

}  // namespace tfr
