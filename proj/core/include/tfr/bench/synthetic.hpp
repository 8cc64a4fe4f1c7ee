#pragma once

#include <cstdint>
#include <filesystem>
#include <string_view>

#include "tfr/audio_io.hpp"
#include "tfr/rng.hpp"

namespace tfr::bench {

// Four-class toy corpus used for smoke runs and the end-to-end test.
enum class SynthClass { Tone = 0, Chirp = 1, NoiseBurst = 2, AmTone = 3 };
inline constexpr int kSynthClasses = 4;

std::string_view to_string(SynthClass c);

// One canonical 4 s, 22050 Hz clip with randomized parameters plus a low
// noise floor.
AudioClip synth_clip(SynthClass c, Rng& rng);

struct SynthOptions {
  int clips_per_class = 50;
  int num_folds = 5;
  std::uint64_t seed = 1;
};

// Writes clips/<class>-<index>.wav (16-bit PCM) and manifest.csv under
// out_dir and returns the loaded manifest. Clip i of every class lands in
// fold i % num_folds + 1, so folds are class-balanced.
DatasetManifest write_synthetic_dataset(const std::filesystem::path& out_dir,
                                        const SynthOptions& options = {});

}  // namespace tfr::bench
