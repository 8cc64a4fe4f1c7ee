#include "tfr/cwt.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "tfr/error.hpp"

namespace tfr {

double morlet(double t) { return std::cos(kMorletOmega0 * t) * std::exp(-0.5 * t * t); }

CwtSpec CwtSpec::log_spaced(int n_scales, double f_low, double f_high, int sample_rate,
                            int time_downsample) {
  if (n_scales < 2 || !(f_low > 0.0) || !(f_high > f_low))
    throw std::invalid_argument("CwtSpec::log_spaced: need n >= 2 and 0 < f_low < f_high");
  CwtSpec spec;
  spec.sample_rate = sample_rate;
  spec.time_downsample = time_downsample;
  spec.scales.resize(static_cast<std::size_t>(n_scales));
  const double ratio = std::log(f_low / f_high);
  for (int i = 0; i < n_scales; ++i) {
    const double f = f_high * std::exp(ratio * i / (n_scales - 1));
    spec.scales[static_cast<std::size_t>(i)] = kMorletCenterFrequency * sample_rate / f;
  }
  return spec;
}

CwtSpec CwtSpec::preset() { return log_spaced(256, 20.0, kCanonicalRate / 2.0); }

std::vector<double> CwtSpec::pseudo_frequencies() const {
  std::vector<double> f(scales.size());
  for (std::size_t i = 0; i < scales.size(); ++i) {
    f[i] = kMorletCenterFrequency * sample_rate / scales[i];
  }
  return f;
}

std::size_t CwtSpec::num_columns(std::size_t signal_length) const {
  if (signal_length == 0) return 0;
  return 1 + (signal_length - 1) / static_cast<std::size_t>(time_downsample);
}

std::size_t CwtSpec::half_support(double scale) {
  return static_cast<std::size_t>(std::floor(kMorletSupport * scale));
}

void CwtSpec::validate() const {
  if (scales.empty()) throw Error("CwtSpec: no scales");
  if (sample_rate < 1 || time_downsample < 1)
    throw Error("CwtSpec: sample rate and time downsample must be positive");
  for (std::size_t i = 0; i < scales.size(); ++i) {
    if (!(scales[i] > 0.0)) throw Error("CwtSpec: scales must be positive");
    if (i > 0 && !(scales[i] > scales[i - 1])) throw Error("CwtSpec: scales must increase");
  }
  const double rel = 1e-9;
  const auto f = pseudo_frequencies();
  if (f.front() > sample_rate / 2.0 * (1.0 + rel))
    throw Error("CwtSpec: smallest scale is above Nyquist");
  if (f.back() < 20.0 * (1.0 - rel)) throw Error("CwtSpec: largest scale is below 20 Hz");
}

Eigen::MatrixXd cwt_coefficients(std::span<const double> samples, const CwtSpec& spec) {
  spec.validate();
  const std::size_t len = samples.size();
  const std::size_t reach = CwtSpec::half_support(spec.scales.back());
  if (2 * reach + 1 > len) {
    throw Error("cwt: largest scale needs " + std::to_string(2 * reach + 1) +
                " samples of support, signal has " + std::to_string(len));
  }
  const std::size_t cols = spec.num_columns(len);
  const auto step = static_cast<std::size_t>(spec.time_downsample);

  // Zero-padded copy so every tap window is in range.
  Eigen::VectorXd padded = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(len + 2 * reach));
  for (std::size_t i = 0; i < len; ++i) padded[static_cast<Eigen::Index>(i + reach)] = samples[i];

  Eigen::MatrixXd out(static_cast<Eigen::Index>(spec.scales.size()), static_cast<Eigen::Index>(cols));
  using Segments = Eigen::Map<const Eigen::MatrixXd, 0, Eigen::OuterStride<>>;
  for (std::size_t s = 0; s < spec.scales.size(); ++s) {
    const double a = spec.scales[s];
    const std::size_t half = CwtSpec::half_support(a);
    const auto taps = static_cast<Eigen::Index>(2 * half + 1);
    Eigen::RowVectorXd psi(taps);
    const double norm = 1.0 / std::sqrt(a);
    for (Eigen::Index j = 0; j < taps; ++j) {
      psi[j] = norm * morlet((static_cast<double>(j) - static_cast<double>(half)) / a);
    }
    // Column c covers samples b - half .. b + half with b = c * step.
    const Segments segments(padded.data() + (reach - half), taps, static_cast<Eigen::Index>(cols),
                            Eigen::OuterStride<>(static_cast<Eigen::Index>(step)));
    out.row(static_cast<Eigen::Index>(s)) = psi * segments;
  }
  return out;
}

TFRepresentation cwt(const AudioClip& clip, const CwtSpec& spec) {
  if (clip.sample_rate != spec.sample_rate)
    throw std::invalid_argument("cwt: clip rate does not match the spec");
  const Eigen::MatrixXd coeffs = cwt_coefficients(clip.samples, spec);
  TFRepresentation tf;
  tf.kind = TfKind::Cwt;
  tf.values = coeffs.colwise().reverse().cwiseAbs2();
  auto f = spec.pseudo_frequencies();
  tf.bin_frequencies.assign(f.rbegin(), f.rend());
  tf.frame_times.resize(static_cast<std::size_t>(tf.values.cols()));
  for (std::size_t c = 0; c < tf.frame_times.size(); ++c) {
    tf.frame_times[c] = static_cast<double>(c) * spec.time_downsample / clip.sample_rate;
  }
  return tf;
}

}  // namespace tfr
