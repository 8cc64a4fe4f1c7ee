#pragma once

#include <Eigen/Core>
#include <cstddef>
#include <numbers>
#include <span>
#include <vector>

#include "tfr/audio_io.hpp"
#include "tfr/tf_representation.hpp"

namespace tfr {

inline constexpr double kMorletOmega0 = 5.0;
// Pseudo-frequency of the real Morlet in cycles per unit time.
inline constexpr double kMorletCenterFrequency = kMorletOmega0 / (2.0 * std::numbers::pi);
// The wavelet is evaluated on |t| <= 8 (|psi| < 1.3e-14 beyond).
inline constexpr double kMorletSupport = 8.0;

// Real Morlet, cos(5 t) exp(-t^2 / 2).
double morlet(double t);

struct CwtSpec {
  // Strictly increasing, in samples.
  std::vector<double> scales;
  int sample_rate = kCanonicalRate;
  int time_downsample = 256;

  // n scales whose pseudo-frequencies are log-spaced from f_high down to
  // f_low. Defaults: 256 scales over 20 Hz .. 11025 Hz.
  static CwtSpec log_spaced(int n_scales, double f_low, double f_high,
                            int sample_rate = kCanonicalRate, int time_downsample = 256);
  static CwtSpec preset();

  // f_c fs / a for each scale (decreasing).
  std::vector<double> pseudo_frequencies() const;
  std::size_t num_columns(std::size_t signal_length) const;
  // Half-width in samples of the evaluated support at scale a: floor(8 a).
  static std::size_t half_support(double scale);

  // Scales increasing; pseudo-frequencies within [20 Hz, fs / 2].
  void validate() const;
};

// Pre-squaring coefficients F(a, b) = a^(-1/2) sum_m x[m] psi((m - b) / a)
// with zero padding, at translations b = j * time_downsample. Rows follow
// spec.scales order. Throws tfr::Error when the largest scale's support
// exceeds the signal length.
Eigen::MatrixXd cwt_coefficients(std::span<const double> samples, const CwtSpec& spec);

// Scalogram |F|^2 with rows reordered to increasing pseudo-frequency.
TFRepresentation cwt(const AudioClip& clip, const CwtSpec& spec);

}  // namespace tfr
