#include "tfr/bench/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <stdexcept>

#include "tfr/error.hpp"

namespace tfr::bench {

std::string_view to_string(SynthClass c) {
  switch (c) {
    case SynthClass::Tone: return "tone";
    case SynthClass::Chirp: return "chirp";
    case SynthClass::NoiseBurst: return "noise";
    case SynthClass::AmTone: return "am";
  }
  return "?";
}

namespace {

double log_uniform(Rng& rng, double lo, double hi) {
  return lo * std::exp(std::log(hi / lo) * rng.uniform());
}

}  // namespace

AudioClip synth_clip(SynthClass c, Rng& rng) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  const double fs = kCanonicalRate;
  const std::size_t n = kCanonicalLength;
  const double duration = static_cast<double>(n) / fs;
  AudioClip clip;
  clip.samples.assign(n, 0.0);
  auto& x = clip.samples;
  const double amp = 0.3 + 0.4 * rng.uniform();
  const double phase = two_pi * rng.uniform();

  switch (c) {
    case SynthClass::Tone: {
      const double f = log_uniform(rng, 200.0, 4000.0);
      for (std::size_t i = 0; i < n; ++i) x[i] = amp * std::sin(two_pi * f * i / fs + phase);
      break;
    }
    case SynthClass::Chirp: {
      double f0 = log_uniform(rng, 200.0, 1000.0);
      double f1 = log_uniform(rng, 2000.0, 6000.0);
      if (rng.uniform() < 0.5) std::swap(f0, f1);
      const double rate = (f1 - f0) / duration;
      for (std::size_t i = 0; i < n; ++i) {
        const double t = i / fs;
        x[i] = amp * std::sin(two_pi * (f0 * t + 0.5 * rate * t * t) + phase);
      }
      break;
    }
    case SynthClass::NoiseBurst: {
      const auto len = static_cast<std::size_t>((0.5 + rng.uniform()) * fs);
      const auto start = static_cast<std::size_t>(rng.uniform() * static_cast<double>(n - len));
      for (std::size_t i = start; i < start + len; ++i) x[i] = 0.5 * amp * rng.normal();
      break;
    }
    case SynthClass::AmTone: {
      const double f = log_uniform(rng, 300.0, 3000.0);
      const double fm = 2.0 + 3.0 * rng.uniform();
      const double mphase = two_pi * rng.uniform();
      for (std::size_t i = 0; i < n; ++i) {
        const double t = i / fs;
        const double env = 0.5 * (1.0 + std::sin(two_pi * fm * t + mphase));
        x[i] = amp * env * std::sin(two_pi * f * t + phase);
      }
      break;
    }
  }
  for (auto& v : x) v = std::clamp(v + 1e-3 * rng.normal(), -1.0, 1.0);
  return clip;
}

DatasetManifest write_synthetic_dataset(const std::filesystem::path& out_dir,
                                        const SynthOptions& options) {
  if (options.clips_per_class < 1 || options.num_folds < 1)
    throw std::invalid_argument("synthetic dataset: clips per class and folds must be >= 1");
  const auto clip_dir = out_dir / "clips";
  std::filesystem::create_directories(clip_dir);
  const auto manifest_path = out_dir / "manifest.csv";
  std::ofstream csv(manifest_path, std::ios::binary);
  if (!csv) throw Error("cannot write " + manifest_path.string());
  csv << "path,label,fold\n";
  for (int i = 0; i < options.clips_per_class; ++i) {
    for (int c = 0; c < kSynthClasses; ++c) {
      const auto cls = static_cast<SynthClass>(c);
      Rng rng(mix_seed(options.seed, static_cast<std::uint64_t>(c) << 32 | static_cast<std::uint32_t>(i)));
      char name[64];
      std::snprintf(name, sizeof name, "%s-%04d.wav", to_string(cls).data(), i);
      write_wav(clip_dir / name, synth_clip(cls, rng));
      csv << "clips/" << name << "," << c << "," << (i % options.num_folds + 1) << "\n";
    }
  }
  csv.close();
  if (!csv) throw Error("cannot write " + manifest_path.string());
  return load_manifest(manifest_path);
}

}  // namespace tfr::bench
