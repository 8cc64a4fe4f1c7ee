#include <cmath>
#include <string>

#include "binary_io.hpp"
#include "tfr/error.hpp"
#include "tfr/featuregram.hpp"

namespace tfr {

std::vector<std::uint8_t> encode_feature(const FeatureImage& image) {
  detail::ByteWriter w;
  w.tag("TFR1");
  w.u32(static_cast<std::uint32_t>(image.values.rows()));
  w.u32(static_cast<std::uint32_t>(image.values.cols()));
  w.u32(static_cast<std::uint32_t>(image.kind));
  for (Eigen::Index r = 0; r < image.values.rows(); ++r) {
    for (Eigen::Index c = 0; c < image.values.cols(); ++c) {
      w.f32(static_cast<float>(image.values(r, c)));
    }
  }
  return std::move(w.buffer());
}

FeatureImage decode_feature(std::span<const std::uint8_t> bytes) {
  detail::ByteReader r(bytes, "feature file");
  if (r.remaining() < 4 || r.str(4) != "TFR1") throw Error("feature file: bad magic");
  const auto rows = r.get<std::uint32_t>();
  const auto cols = r.get<std::uint32_t>();
  const auto kind = r.get<std::uint32_t>();
  if (kind > static_cast<std::uint32_t>(TfKind::Mfcc)) throw Error("feature file: unknown kind tag");
  if (rows == 0 || cols == 0) throw Error("feature file: empty image");
  const std::size_t count = std::size_t{rows} * cols;
  if (r.remaining() != count * sizeof(float)) throw Error("feature file: size does not match header");

  FeatureImage img;
  img.kind = static_cast<TfKind>(kind);
  img.values.resize(rows, cols);
  for (std::uint32_t i = 0; i < rows; ++i) {
    for (std::uint32_t j = 0; j < cols; ++j) {
      const float v = r.get<float>();
      if (!std::isfinite(v)) throw Error("feature file: non-finite value");
      img.values(i, j) = v;
    }
  }
  return img;
}

void write_feature_file(const std::filesystem::path& path, const FeatureImage& image) {
  detail::write_file(path.string(), encode_feature(image));
}

FeatureImage read_feature_file(const std::filesystem::path& path) {
  try {
    return decode_feature(detail::read_file(path.string()));
  } catch (const Error& e) {
    throw Error(path.string() + ": " + e.what());
  }
}

}  // namespace tfr
