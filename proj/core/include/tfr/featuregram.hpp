#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "tfr/audio_io.hpp"
#include "tfr/cqt.hpp"
#include "tfr/cwt.hpp"
#include "tfr/mel.hpp"
#include "tfr/stft.hpp"
#include "tfr/tf_representation.hpp"

namespace tfr {

enum class Band { Wide, Narrow };

std::string_view to_string(Band band);
Band parse_band(std::string_view name);

inline constexpr int kNarrowRows = 37;
inline constexpr int kNarrowCols = 50;
inline constexpr int kWideRows = 154;
inline constexpr int kWideCols = 12;

struct ImageShape {
  int rows = 0;
  int cols = 0;
  int size() const { return rows * cols; }
  friend bool operator==(const ImageShape&, const ImageShape&) = default;
};

struct LinearStftParams {
  StftSpec stft;
};

// One of the five representations plus its band preset. The band fixes the
// output image: wideband -> 154 x 12; narrowband, CWT and MFCC -> 37 x 50.
struct TransformSpec {
  using Params = std::variant<LinearStftParams, MelSpec, CqtSpec, CwtSpec, MfccSpec>;

  Band band = Band::Narrow;
  Params params;

  TfKind kind() const;
  ImageShape output_shape() const;
  // e.g. "mel-stft/narrow".
  std::string name() const;

  // Preset names: linear-stft, mel-stft, cqt, cwt, mfcc. cwt and mfcc only
  // exist as narrowband presets; asking for them wideband throws
  // std::invalid_argument.
  static TransformSpec preset(TfKind kind, Band band);
  static TransformSpec preset(std::string_view kind_name, std::string_view band_name);
};

std::string_view preset_name(TfKind kind);
TfKind parse_preset_name(std::string_view name);

struct FeatureImage {
  // rows x cols in [-1, 1]; row 0 is the lowest frequency.
  Eigen::MatrixXd values;
  TfKind kind = TfKind::LinearStft;

  ImageShape shape() const {
    return {static_cast<int>(values.rows()), static_cast<int>(values.cols())};
  }
};

// Untransformed representation (power, or cepstral coefficients for MFCC).
TFRepresentation compute_representation(const AudioClip& clip, const TransformSpec& spec);

inline constexpr double kDbFloor = -80.0;

// 10 log10(max(p, tiny) / max(p)), floored at -80 dB. An all-zero input
// maps to a uniform -80 dB.
TFRepresentation power_to_db(const TFRepresentation& tf, double floor_db = kDbFloor);

// Affine map min -> -1, max -> +1; constant input maps to zeros.
Eigen::MatrixXd normalize(const Eigen::MatrixXd& values);

// Lanczos-3 kernel sinc(x) sinc(x / 3) on |x| < 3.
double lanczos3(double x);

// Separable Lanczos-3 resize, rows (frequency axis) first, then columns.
// When shrinking an axis the kernel is stretched by the scale factor; taps
// falling outside the source are dropped and the remaining weights
// renormalized to unit sum.
Eigen::MatrixXd lanczos_resize(const Eigen::MatrixXd& src, int target_rows, int target_cols);

// transform -> dB (skipped for MFCC) -> normalize -> resize -> clamp.
FeatureImage extract_feature(const AudioClip& clip, const TransformSpec& spec);
FeatureImage to_feature_image(const TFRepresentation& tf, ImageShape shape);

// Feature file: "TFR1", u32 rows, u32 cols, u32 kind, rows*cols float32,
// all little-endian, row-major.
std::vector<std::uint8_t> encode_feature(const FeatureImage& image);
FeatureImage decode_feature(std::span<const std::uint8_t> bytes);
void write_feature_file(const std::filesystem::path& path, const FeatureImage& image);
FeatureImage read_feature_file(const std::filesystem::path& path);

// 8-bit grayscale PNG, pixel round((v + 1) / 2 * 255) half-up, highest
// frequency in the top row.
void export_png(const FeatureImage& image, const std::filesystem::path& path);
// Inverse mapping back to [-1, 1] (row 0 = lowest frequency again).
Eigen::MatrixXd import_png(const std::filesystem::path& path);

}  // namespace tfr
