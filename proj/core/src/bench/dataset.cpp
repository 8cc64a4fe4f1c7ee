#include "tfr/bench/dataset.hpp"

#include <atomic>
#include <cstdio>
#include <mutex>
#include <thread>

#include "tfr/error.hpp"

namespace tfr::bench {

void FeatureDataset::add(const FeatureImage& image, int label, int fold) {
  if (labels.empty() && shape.size() == 0) shape = image.shape();
  if (image.shape() != shape)
    throw std::invalid_argument("FeatureDataset: image shape mismatch");
  const std::size_t base = pixels.size();
  pixels.resize(base + static_cast<std::size_t>(shape.size()));
  for (int r = 0; r < shape.rows; ++r)
    for (int c = 0; c < shape.cols; ++c)
      pixels[base + static_cast<std::size_t>(r) * shape.cols + c] = image.values(r, c);
  labels.push_back(label);
  folds.push_back(fold);
  num_classes = std::max(num_classes, label + 1);
}

std::string feature_file_name(const ManifestEntry& entry, const TransformSpec& spec) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : entry.audio_path.generic_string()) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char hex[17];
  std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(h));
  return entry.audio_path.stem().string() + "-" + hex + "." +
         std::string(preset_name(spec.kind())) + "-" + std::string(to_string(spec.band)) + ".tfr";
}

namespace {

// Runs fn(i) for i in [0, n) on up to `workers` threads.
template <typename Fn>
void parallel_for(std::size_t n, int workers, Fn&& fn) {
  const std::size_t threads = std::min<std::size_t>(n, static_cast<std::size_t>(std::max(1, workers)));
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::jthread> pool;
  for (std::size_t t = 0; t < threads; ++t)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) fn(i);
    });
}

bool usable_cache(const std::filesystem::path& path, const TransformSpec& spec) {
  std::error_code ec;
  if (!std::filesystem::is_regular_file(path, ec)) return false;
  try {
    const FeatureImage img = read_feature_file(path);
    return img.kind == spec.kind() && img.shape() == spec.output_shape();
  } catch (const std::exception&) {
    return false;
  }
}

}  // namespace

ExtractionSummary extract_manifest(const DatasetManifest& manifest, const TransformSpec& spec,
                                   const std::filesystem::path& out_dir, int workers, bool reuse,
                                   const LogFn& log) {
  std::filesystem::create_directories(out_dir);
  ExtractionSummary summary;
  summary.shape = spec.output_shape();
  std::mutex mu;
  std::vector<std::string> errors(manifest.size());
  std::atomic<std::size_t> written{0}, reused{0};

  parallel_for(manifest.size(), workers, [&](std::size_t i) {
    const auto& entry = manifest.entries[i];
    const auto path = out_dir / feature_file_name(entry, spec);
    if (reuse && usable_cache(path, spec)) {
      ++reused;
      return;
    }
    try {
      const FeatureImage img = extract_feature(load_canonical(entry.audio_path), spec);
      // Write then rename so an interrupted run never leaves a partial file.
      auto tmp = path;
      tmp += ".tmp" + std::to_string(i);
      write_feature_file(tmp, img);
      std::filesystem::rename(tmp, path);
      ++written;
      if (log) {
        std::lock_guard lock(mu);
        log("extracted " + entry.audio_path.string());
      }
    } catch (const std::exception& e) {
      errors[i] = entry.audio_path.string() + ": " + e.what();
      if (log) {
        std::lock_guard lock(mu);
        log("failed " + errors[i]);
      }
    }
  });

  summary.written = written;
  summary.reused = reused;
  for (auto& e : errors)
    if (!e.empty()) summary.failures.push_back(std::move(e));
  return summary;
}

FeatureDataset load_feature_dataset(const DatasetManifest& manifest, const TransformSpec& spec,
                                    const std::filesystem::path& cache_dir, int workers,
                                    const LogFn& log) {
  if (manifest.size() == 0) throw Error("dataset: manifest is empty");
  const auto summary = extract_manifest(manifest, spec, cache_dir, workers, true, log);
  if (!summary.failures.empty())
    throw Error("dataset: " + std::to_string(summary.failures.size()) +
                " clip(s) failed, first: " + summary.failures.front());
  FeatureDataset data;
  data.shape = spec.output_shape();
  data.pixels.reserve(manifest.size() * static_cast<std::size_t>(data.shape.size()));
  for (const auto& entry : manifest.entries)
    data.add(read_feature_file(cache_dir / feature_file_name(entry, spec)), entry.label, entry.fold);
  data.num_classes = std::max(data.num_classes, manifest.num_classes());
  return data;
}

}  // namespace tfr::bench
