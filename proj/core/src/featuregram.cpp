#include "tfr/featuregram.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <type_traits>

namespace tfr {

std::string_view to_string(Band band) { return band == Band::Wide ? "wide" : "narrow"; }

Band parse_band(std::string_view name) {
  if (name == "wide" || name == "wideband") return Band::Wide;
  if (name == "narrow" || name == "narrowband") return Band::Narrow;
  throw std::invalid_argument("unknown band '" + std::string(name) + "' (expected wide|narrow)");
}

std::string_view preset_name(TfKind kind) {
  switch (kind) {
    case TfKind::LinearStft: return "linear-stft";
    case TfKind::Mel: return "mel-stft";
    case TfKind::Cqt: return "cqt";
    case TfKind::Cwt: return "cwt";
    case TfKind::Mfcc: return "mfcc";
  }
  return "unknown";
}

TfKind parse_preset_name(std::string_view name) {
  for (auto k : {TfKind::LinearStft, TfKind::Mel, TfKind::Cqt, TfKind::Cwt, TfKind::Mfcc}) {
    if (preset_name(k) == name) return k;
  }
  throw std::invalid_argument("unknown transform '" + std::string(name) +
                              "' (expected linear-stft|mel-stft|cqt|cwt|mfcc)");
}

TfKind TransformSpec::kind() const {
  return std::visit(
      [](const auto& p) {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, LinearStftParams>) return TfKind::LinearStft;
        else if constexpr (std::is_same_v<T, MelSpec>) return TfKind::Mel;
        else if constexpr (std::is_same_v<T, CqtSpec>) return TfKind::Cqt;
        else if constexpr (std::is_same_v<T, CwtSpec>) return TfKind::Cwt;
        else return TfKind::Mfcc;
      },
      params);
}

ImageShape TransformSpec::output_shape() const {
  return band == Band::Wide ? ImageShape{kWideRows, kWideCols} : ImageShape{kNarrowRows, kNarrowCols};
}

std::string TransformSpec::name() const {
  return std::string(preset_name(kind())) + "/" + std::string(to_string(band));
}

TransformSpec TransformSpec::preset(TfKind kind, Band band) {
  const bool wide = band == Band::Wide;
  TransformSpec spec;
  spec.band = band;
  switch (kind) {
    case TfKind::LinearStft:
      spec.params = LinearStftParams{wide ? StftSpec::wideband() : StftSpec::narrowband()};
      break;
    case TfKind::Mel:
      spec.params = wide ? MelSpec::wideband() : MelSpec::narrowband();
      break;
    case TfKind::Cqt:
      spec.params = wide ? CqtSpec::wideband() : CqtSpec::narrowband();
      break;
    case TfKind::Cwt:
      if (wide) throw std::invalid_argument("cwt has only a narrowband preset");
      spec.params = CwtSpec::preset();
      break;
    case TfKind::Mfcc:
      if (wide) throw std::invalid_argument("mfcc has only a narrowband preset");
      spec.params = MfccSpec{};
      break;
  }
  return spec;
}

TransformSpec TransformSpec::preset(std::string_view kind_name, std::string_view band_name) {
  return preset(parse_preset_name(kind_name), parse_band(band_name));
}

TFRepresentation compute_representation(const AudioClip& clip, const TransformSpec& spec) {
  return std::visit(
      [&clip](const auto& p) -> TFRepresentation {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, LinearStftParams>) return linear_spectrogram(clip, p.stft);
        else if constexpr (std::is_same_v<T, MelSpec>) return mel_spectrogram(clip, p);
        else if constexpr (std::is_same_v<T, CqtSpec>) return cqt(clip, p);
        else if constexpr (std::is_same_v<T, CwtSpec>) return cwt(clip, p);
        else return mfcc(clip, p);
      },
      spec.params);
}

TFRepresentation power_to_db(const TFRepresentation& tf, double floor_db) {
  if (tf.kind == TfKind::Mfcc) throw std::invalid_argument("power_to_db: MFCC is not a power");
  if ((tf.values.array() < 0.0).any()) throw std::invalid_argument("power_to_db: negative power");
  TFRepresentation out = tf;
  const double ref = tf.values.size() ? tf.values.maxCoeff() : 0.0;
  if (!(ref > 0.0)) {
    out.values.setConstant(floor_db);
    return out;
  }
  // Anything under the floor is clamped anyway; this keeps log10 finite.
  const double tiny = ref * std::pow(10.0, (floor_db - 10.0) / 10.0);
  out.values = tf.values.unaryExpr([ref, tiny, floor_db](double p) {
    return std::max(10.0 * std::log10(std::max(p, tiny) / ref), floor_db);
  });
  return out;
}

Eigen::MatrixXd normalize(const Eigen::MatrixXd& values) {
  if (values.size() == 0) return values;
  const double lo = values.minCoeff();
  const double hi = values.maxCoeff();
  if (!(hi > lo)) return Eigen::MatrixXd::Zero(values.rows(), values.cols());
  const double scale = 2.0 / (hi - lo);
  return values.unaryExpr(
      [lo, hi, scale](double x) { return x == hi ? 1.0 : (x - lo) * scale - 1.0; });
}

double lanczos3(double x) {
  if (x == 0.0) return 1.0;
  if (std::abs(x) >= 3.0) return 0.0;
  const double px = std::numbers::pi * x;
  return 3.0 * std::sin(px) * std::sin(px / 3.0) / (px * px);
}

namespace {

// Row i holds the normalized taps of output sample i over the source axis.
Eigen::MatrixXd lanczos_weights(int in_size, int out_size) {
  const double scale = static_cast<double>(in_size) / out_size;
  const double filter_scale = std::max(scale, 1.0);
  const double support = 3.0 * filter_scale;
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(out_size, in_size);
  for (int i = 0; i < out_size; ++i) {
    const double center = (i + 0.5) * scale;
    const int lo = std::max(0, static_cast<int>(std::floor(center - support + 0.5)));
    const int hi = std::min(in_size, static_cast<int>(std::floor(center + support + 0.5)));
    double sum = 0.0;
    for (int j = lo; j < hi; ++j) {
      const double v = lanczos3((j + 0.5 - center) / filter_scale);
      w(i, j) = v;
      sum += v;
    }
    if (sum != 0.0) w.row(i) /= sum;
  }
  return w;
}

}  // namespace

Eigen::MatrixXd lanczos_resize(const Eigen::MatrixXd& src, int target_rows, int target_cols) {
  if (target_rows < 1 || target_cols < 1)
    throw std::invalid_argument("lanczos_resize: target dims must be positive");
  if (src.size() == 0) throw std::invalid_argument("lanczos_resize: empty source");
  Eigen::MatrixXd tmp = src;
  if (target_rows != src.rows()) {
    tmp = lanczos_weights(static_cast<int>(src.rows()), target_rows) * src;
  }
  if (target_cols != src.cols()) {
    tmp = tmp * lanczos_weights(static_cast<int>(src.cols()), target_cols).transpose();
  }
  return tmp;
}

FeatureImage to_feature_image(const TFRepresentation& tf, ImageShape shape) {
  FeatureImage img;
  img.kind = tf.kind;
  const Eigen::MatrixXd scaled =
      tf.kind == TfKind::Mfcc ? normalize(tf.values) : normalize(power_to_db(tf).values);
  img.values = lanczos_resize(scaled, shape.rows, shape.cols).cwiseMax(-1.0).cwiseMin(1.0);
  return img;
}

FeatureImage extract_feature(const AudioClip& clip, const TransformSpec& spec) {
  return to_feature_image(compute_representation(clip, spec), spec.output_shape());
}

}  // namespace tfr
