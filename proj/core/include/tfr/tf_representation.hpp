#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace tfr {

// Values are also the u32 kind tag written into feature files.
enum class TfKind : std::uint32_t {
  LinearStft = 0,
  Mel = 1,
  Cqt = 2,
  Cwt = 3,
  Mfcc = 4,
};

std::string_view to_string(TfKind kind);
TfKind parse_kind(std::string_view name);

// Frequency x time matrix. Rows run from low to high frequency; for MFCC the
// rows are cepstral indices and values may be negative.
struct TFRepresentation {
  Eigen::MatrixXd values;
  std::vector<double> bin_frequencies;
  std::vector<double> frame_times;
  TfKind kind = TfKind::LinearStft;

  Eigen::Index bins() const { return values.rows(); }
  Eigen::Index frames() const { return values.cols(); }
};

// Checks the shape/metadata invariants; throws tfr::Error on violation.
void validate(const TFRepresentation& tf);

}  // namespace tfr
