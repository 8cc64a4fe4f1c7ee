#include <benchmark/benchmark.h>

#include "tfr/bench/synthetic.hpp"
#include "tfr/featuregram.hpp"
#include "tfr/rng.hpp"

namespace {

const tfr::AudioClip& clip() {
  static const tfr::AudioClip c = [] {
    tfr::Rng rng(7);
    return tfr::bench::synth_clip(tfr::bench::SynthClass::Chirp, rng);
  }();
  return c;
}

// Full pipeline for one 4 s clip: transform, dB, normalize, resize.
void BM_Extract(benchmark::State& state, const char* kind, const char* band) {
  const auto spec = tfr::TransformSpec::preset(kind, band);
  for (auto _ : state) benchmark::DoNotOptimize(tfr::extract_feature(clip(), spec));
}

void BM_Representation(benchmark::State& state, const char* kind, const char* band) {
  const auto spec = tfr::TransformSpec::preset(kind, band);
  for (auto _ : state) benchmark::DoNotOptimize(tfr::compute_representation(clip(), spec));
}

}  // namespace

BENCHMARK_CAPTURE(BM_Extract, linear_narrow, "linear-stft", "narrow")->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Extract, linear_wide, "linear-stft", "wide")->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Extract, mel_narrow, "mel-stft", "narrow")->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Extract, mel_wide, "mel-stft", "wide")->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Extract, cqt_narrow, "cqt", "narrow")->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Extract, cqt_wide, "cqt", "wide")->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Extract, cwt_narrow, "cwt", "narrow")->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Extract, mfcc_narrow, "mfcc", "narrow")->Unit(benchmark::kMillisecond);

BENCHMARK_CAPTURE(BM_Representation, cqt_narrow, "cqt", "narrow")->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Representation, cwt_narrow, "cwt", "narrow")->Unit(benchmark::kMillisecond);
