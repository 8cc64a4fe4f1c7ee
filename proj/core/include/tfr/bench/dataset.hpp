#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "tfr/audio_io.hpp"
#include "tfr/featuregram.hpp"

namespace tfr::bench {

// Features of a whole manifest in one contiguous buffer.
struct FeatureDataset {
  ImageShape shape;
  std::vector<double> pixels;  // size() * rows * cols, row-major per image
  std::vector<int> labels;
  std::vector<int> folds;
  int num_classes = 0;

  std::size_t size() const { return labels.size(); }
  void add(const FeatureImage& image, int label, int fold);
};

// "<stem>-<16 hex digits of FNV-1a(path)>.<kind>-<band>.tfr"
std::string feature_file_name(const ManifestEntry& entry, const TransformSpec& spec);

struct ExtractionSummary {
  std::size_t written = 0;
  std::size_t reused = 0;
  std::vector<std::string> failures;
  ImageShape shape;
};

using LogFn = std::function<void(const std::string&)>;

// Extracts one feature file per manifest entry into out_dir, skipping files
// that already exist when `reuse` is set. Per-clip failures are collected
// and the job continues.
ExtractionSummary extract_manifest(const DatasetManifest& manifest, const TransformSpec& spec,
                                   const std::filesystem::path& out_dir, int workers = 1,
                                   bool reuse = false, const LogFn& log = {});

// Loads (extracting on a cache miss) the features of every manifest entry.
// Throws tfr::Error if any clip fails.
FeatureDataset load_feature_dataset(const DatasetManifest& manifest, const TransformSpec& spec,
                                    const std::filesystem::path& cache_dir, int workers = 1,
                                    const LogFn& log = {});

}  // namespace tfr::bench
