#pragma once

#include <Eigen/Core>
#include <cstddef>
#include <span>
#include <vector>

#include "tfr/audio_io.hpp"
#include "tfr/tf_representation.hpp"

namespace tfr {

inline constexpr double kCqtMinFrequency = 32.70;  // C1

struct CqtSpec {
  int n_bins = 256;
  int bins_per_octave = 32;
  double f_min = kCqtMinFrequency;
  int sample_rate = kCanonicalRate;
  int hop = 256;

  // 1024 bins, 128 per octave, hop 1024.
  static CqtSpec wideband();
  // 256 bins, 32 per octave, hop 256.
  static CqtSpec narrowband();

  // Q = 1 / (2^(1/b) - 1).
  double q_factor() const;
  std::size_t num_frames(std::size_t signal_length) const;

  // Throws tfr::Error when the top bin exceeds Nyquist or a field is
  // non-positive.
  void validate() const;
};

// f_k = 2^(k/b) f_min for k in [0, n_bins).
std::vector<double> cqt_center_frequencies(const CqtSpec& spec);

// Per-bin analysis atoms (1/N[k]) w[m] exp(-i 2 pi m Q / N[k]) with a Hann
// window of length N[k] = ceil(Q fs / f_k). Atoms are generated on request;
// the wideband preset would need ~370 MB to hold them all.
class CqtKernel {
 public:
  explicit CqtKernel(const CqtSpec& spec);

  const CqtSpec& spec() const { return spec_; }
  const std::vector<double>& frequencies() const { return frequencies_; }
  const std::vector<std::size_t>& lengths() const { return lengths_; }
  std::size_t max_length() const { return lengths_.empty() ? 0 : lengths_.front(); }

  // Rows 0 and 1 hold the real and imaginary parts of bin k's atom.
  Eigen::Matrix<double, 2, Eigen::Dynamic> atom(std::size_t k) const;

 private:
  CqtSpec spec_;
  double q_;
  std::vector<double> frequencies_;
  std::vector<std::size_t> lengths_;
};

// Complex coefficients, n_bins x (1 + floor(len / hop)). Frame t is centered
// on sample t * hop (window start t * hop - floor(N[k] / 2)), and samples
// outside the signal are taken by reflection.
Eigen::MatrixXcd cqt_coefficients(std::span<const double> samples, const CqtKernel& kernel);

// Squared magnitudes; bin_frequencies are f_k.
TFRepresentation cqt(const AudioClip& clip, const CqtKernel& kernel);
TFRepresentation cqt(const AudioClip& clip, const CqtSpec& spec);

}  // namespace tfr
