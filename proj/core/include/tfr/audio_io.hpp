#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

namespace tfr {

inline constexpr int kCanonicalRate = 22050;
inline constexpr int kClipSeconds = 4;
inline constexpr std::size_t kCanonicalLength = kCanonicalRate * kClipSeconds;

struct AudioClip {
  std::vector<double> samples;
  int sample_rate = kCanonicalRate;

  std::size_t size() const { return samples.size(); }
  double duration() const { return static_cast<double>(samples.size()) / sample_rate; }
};

enum class WavEncoding { Pcm8, Pcm16, Pcm24, Pcm32, Float32 };

// Reads a RIFF/WAVE file: integer PCM (8/16/24/32 bit) or 32-bit float,
// plain or WAVE_FORMAT_EXTENSIBLE. Samples are scaled to [-1, 1] and
// multi-channel audio is averaged to mono.
AudioClip load_wav(const std::filesystem::path& path);
AudioClip read_wav(std::istream& in);

// Writes interleaved samples; values outside [-1, 1] are clipped for the
// integer encodings.
void write_wav(const std::filesystem::path& path, std::span<const double> interleaved,
               int channels, int sample_rate, WavEncoding encoding = WavEncoding::Pcm16);
void write_wav(const std::filesystem::path& path, const AudioClip& clip,
               WavEncoding encoding = WavEncoding::Pcm16);

// Band-limited Kaiser-windowed sinc resampling (beta 14.77, 64 zero
// crossings per side of the kernel). Output length is
// round(len * target / source); equal rates return the input unchanged.
AudioClip resample(const AudioClip& clip, int target_rate);

// Truncates or zero-pads at the tail to exactly four seconds. Requires the
// canonical 22050 Hz rate.
AudioClip standardize(const AudioClip& clip);

// load_wav -> resample to 22050 Hz -> standardize.
AudioClip load_canonical(const std::filesystem::path& path);

struct ManifestEntry {
  std::filesystem::path audio_path;
  int label = 0;
  int fold = 1;
};

struct DatasetManifest {
  std::vector<ManifestEntry> entries;

  std::size_t size() const { return entries.size(); }
  // Largest fold id / label + 1 present in the entries.
  int num_folds() const;
  int num_classes() const;
  std::vector<std::size_t> fold_counts(int num_folds) const;
};

struct ManifestLimits {
  std::optional<int> num_folds;
  std::optional<int> num_classes;
};

// CSV with header `path,label,fold`; relative paths resolve against the
// manifest's directory. LF and CRLF line endings are accepted.
DatasetManifest load_manifest(const std::filesystem::path& path, ManifestLimits limits = {});
DatasetManifest parse_manifest(std::istream& in, const std::filesystem::path& base_dir,
                               ManifestLimits limits = {});

}  // namespace tfr
