#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include "tfr/audio_io.hpp"
#include "tfr/error.hpp"

namespace fs = std::filesystem;
using tfr::AudioClip;

namespace {

fs::path temp_dir() {
  auto d = fs::temp_directory_path() / ("tfr_audio_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()));
  fs::create_directories(d);
  return d;
}

void put16(std::string& s, std::uint16_t v) { s.append(reinterpret_cast<const char*>(&v), 2); }
void put32(std::string& s, std::uint32_t v) { s.append(reinterpret_cast<const char*>(&v), 4); }

// Minimal hand-built RIFF file, so reading is not checked against our own writer.
std::string riff(std::uint16_t format, int channels, int rate, int bits, const std::string& data,
                 const std::string& extra_chunk = {}) {
  std::string fmt;
  put16(fmt, format);
  put16(fmt, static_cast<std::uint16_t>(channels));
  put32(fmt, static_cast<std::uint32_t>(rate));
  put32(fmt, static_cast<std::uint32_t>(rate * channels * bits / 8));
  put16(fmt, static_cast<std::uint16_t>(channels * bits / 8));
  put16(fmt, static_cast<std::uint16_t>(bits));
  std::string body = "WAVE";
  body += "fmt ";
  put32(body, static_cast<std::uint32_t>(fmt.size()));
  body += fmt;
  body += extra_chunk;
  body += "data";
  put32(body, static_cast<std::uint32_t>(data.size()));
  body += data;
  std::string out = "RIFF";
  put32(out, static_cast<std::uint32_t>(body.size()));
  return out + body;
}

AudioClip parse(const std::string& bytes) {
  std::istringstream in(bytes);
  return tfr::read_wav(in);
}

std::vector<double> sine(double f, int rate, std::size_t n, double amp = 1.0) {
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = amp * std::sin(2.0 * std::numbers::pi * f * i / rate);
  return x;
}

// Magnitude of the DFT at frequency f over the middle of the signal.
double tone_magnitude(const std::vector<double>& x, double f, int rate) {
  const std::size_t lo = x.size() / 4, hi = 3 * x.size() / 4;
  std::complex<double> acc = 0.0;
  for (std::size_t i = lo; i < hi; ++i)
    acc += x[i] * std::polar(1.0, -2.0 * std::numbers::pi * f * i / rate);
  return std::abs(acc) / static_cast<double>(hi - lo);
}

}  // namespace

TEST(LoadWav, Pcm16MonoScaling) {
  std::string data;
  for (std::int16_t v : {0, 16384, -16384}) data.append(reinterpret_cast<const char*>(&v), 2);
  const auto clip = parse(riff(1, 1, 22050, 16, data));
  ASSERT_EQ(clip.size(), 3u);
  EXPECT_EQ(clip.samples[0], 0.0);
  EXPECT_EQ(clip.samples[1], 0.5);
  EXPECT_EQ(clip.samples[2], -0.5);
  EXPECT_EQ(clip.sample_rate, 22050);
}

TEST(LoadWav, StereoIsChannelMean) {
  std::string data;
  for (float v : {0.2f, 0.6f}) data.append(reinterpret_cast<const char*>(&v), 4);
  const auto clip = parse(riff(3, 2, 44100, 32, data));
  ASSERT_EQ(clip.size(), 1u);
  EXPECT_NEAR(clip.samples[0], 0.4, 1e-7);
}

TEST(LoadWav, EightBitIsUnsigned) {
  const std::string data{static_cast<char>(128), static_cast<char>(255), static_cast<char>(0)};
  const auto clip = parse(riff(1, 1, 8000, 8, data));
  EXPECT_EQ(clip.samples[0], 0.0);
  EXPECT_NEAR(clip.samples[1], 127.0 / 128.0, 1e-12);
  EXPECT_EQ(clip.samples[2], -1.0);
}

TEST(LoadWav, SkipsOddSizedChunks) {
  std::string list = "LIST";
  put32(list, 3);
  list += "abc";
  list += '\0';  // pad byte
  std::string data;
  std::int16_t v = -32768;
  data.append(reinterpret_cast<const char*>(&v), 2);
  const auto clip = parse(riff(1, 1, 16000, 16, data, list));
  ASSERT_EQ(clip.size(), 1u);
  EXPECT_EQ(clip.samples[0], -1.0);
}

TEST(LoadWav, RoundTripAllEncodings) {
  const auto dir = temp_dir();
  std::vector<double> x(1000);
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = std::sin(0.37 * i) * 0.9;
  const std::pair<tfr::WavEncoding, double> cases[] = {{tfr::WavEncoding::Pcm8, 1.0 / 64},
                                                       {tfr::WavEncoding::Pcm16, 1.0 / 16384},
                                                       {tfr::WavEncoding::Pcm24, 1e-6},
                                                       {tfr::WavEncoding::Pcm32, 1e-9},
                                                       {tfr::WavEncoding::Float32, 1e-7}};
  for (const auto& [enc, tol] : cases) {
    const auto path = dir / "rt.wav";
    tfr::write_wav(path, x, 1, 22050, enc);
    const auto clip = tfr::load_wav(path);
    ASSERT_EQ(clip.size(), x.size());
    for (std::size_t i = 0; i < x.size(); ++i) ASSERT_NEAR(clip.samples[i], x[i], tol);
  }
  fs::remove_all(dir);
}

TEST(LoadWav, Errors) {
  EXPECT_THROW(tfr::load_wav("/nonexistent/file.wav"), tfr::Error);
  EXPECT_THROW(parse(riff(1, 1, 22050, 16, "")), tfr::Error);        // zero length
  EXPECT_THROW(parse(riff(2, 1, 22050, 4, "abcd")), tfr::Error);     // ADPCM
  EXPECT_THROW(parse(riff(3, 1, 22050, 64, std::string(8, '\0'))), tfr::Error);  // float64
  EXPECT_THROW(parse("RIFX0000WAVE"), tfr::Error);
}

TEST(LoadWav, MoreChannelsAreAveragedToo) {
  std::string data;
  for (std::int16_t v : {8192, 16384, -16384}) data.append(reinterpret_cast<const char*>(&v), 2);
  const auto clip = parse(riff(1, 3, 22050, 16, data));
  ASSERT_EQ(clip.size(), 1u);
  EXPECT_NEAR(clip.samples[0], 0.25 / 3.0, 1e-12);
}

TEST(Resample, EqualRateIsIdentity) {
  AudioClip c{{0.1, -0.3, 0.7, 0.2}, 22050};
  const auto r = tfr::resample(c, 22050);
  EXPECT_EQ(r.samples, c.samples);
  EXPECT_EQ(r.sample_rate, 22050);
}

TEST(Resample, LengthRounds) {
  AudioClip c{std::vector<double>(1001, 0.0), 44100};
  EXPECT_EQ(tfr::resample(c, 22050).size(), 501u);  // round(500.5) half up
  c.samples.resize(1000);
  EXPECT_EQ(tfr::resample(c, 16000).size(), 363u);  // 362.81
  c.sample_rate = 8000;
  EXPECT_EQ(tfr::resample(c, 22050).size(), 2756u);  // 2756.25
}

TEST(Resample, DcIsPreserved) {
  AudioClip c{std::vector<double>(44100, 1.0), 44100};
  const auto r = tfr::resample(c, 22050);
  for (double v : r.samples) ASSERT_NEAR(v, 1.0, 1e-3);
}

TEST(Resample, SinePeakAndLevel) {
  AudioClip c{sine(1000.0, 44100, 44100), 44100};
  const auto r = tfr::resample(c, 22050);
  ASSERT_EQ(r.sample_rate, 22050);
  const double before = tone_magnitude(c.samples, 1000.0, 44100);
  const double after = tone_magnitude(r.samples, 1000.0, 22050);
  EXPECT_LT(std::abs(20.0 * std::log10(after / before)), 0.5);
  // Peak bin of a 1 Hz resolution scan stays at 1 kHz.
  double best = 0.0, best_f = 0.0;
  for (double f = 990.0; f <= 1010.0; f += 1.0) {
    const double m = tone_magnitude(r.samples, f, 22050);
    if (m > best) best = m, best_f = f;
  }
  EXPECT_EQ(best_f, 1000.0);
}

TEST(Resample, LowBandEnergyPreserved) {
  // Content below 0.45 x the lower Nyquist passes with < 1% energy change.
  for (auto [src, dst] : {std::pair{44100, 22050}, std::pair{22050, 44100}, std::pair{48000, 22050}}) {
    const double f = 0.45 * std::min(src, dst) / 2.0 * 0.9;
    AudioClip c{sine(f, src, static_cast<std::size_t>(src)), src};
    const auto r = tfr::resample(c, dst);
    auto energy = [](const std::vector<double>& x) {
      double e = 0.0;
      for (std::size_t i = x.size() / 4; i < 3 * x.size() / 4; ++i) e += x[i] * x[i];
      return e / (x.size() / 2);
    };
    EXPECT_NEAR(energy(r.samples) / energy(c.samples), 1.0, 0.01) << src << "->" << dst;
  }
}

TEST(Resample, RejectsBadRates) {
  AudioClip c{{0.0, 1.0}, 22050};
  EXPECT_THROW(tfr::resample(c, 0), std::invalid_argument);
  c.sample_rate = -1;
  EXPECT_THROW(tfr::resample(c, 22050), std::invalid_argument);
}

TEST(Standardize, TruncatesPadsAndIsIdempotent) {
  AudioClip longer{std::vector<double>(110250), 22050};
  for (std::size_t i = 0; i < longer.size(); ++i) longer.samples[i] = static_cast<double>(i);
  const auto a = tfr::standardize(longer);
  ASSERT_EQ(a.size(), 88200u);
  EXPECT_EQ(a.samples.back(), 88199.0);

  AudioClip shorter{std::vector<double>(44100, 0.5), 22050};
  const auto b = tfr::standardize(shorter);
  ASSERT_EQ(b.size(), 88200u);
  EXPECT_EQ(b.samples[44099], 0.5);
  EXPECT_EQ(b.samples[44100], 0.0);
  EXPECT_EQ(b.samples.back(), 0.0);

  EXPECT_EQ(tfr::standardize(a).samples, a.samples);
  EXPECT_EQ(tfr::standardize(b).samples, b.samples);
  EXPECT_THROW(tfr::standardize(AudioClip{{0.0}, 44100}), std::invalid_argument);
}

TEST(Manifest, ParsesWellFormedCsv) {
  std::istringstream in("\xEF\xBB\xBFpath,label,fold\r\na.wav,0,1\r\n\"b,c.wav\",2,3\r\nsub/d.wav,1,2\r\n");
  const auto m = tfr::parse_manifest(in, "/data");
  ASSERT_EQ(m.size(), 3u);
  EXPECT_EQ(m.entries[0].audio_path, fs::path("/data/a.wav"));
  EXPECT_EQ(m.entries[1].audio_path, fs::path("/data/b,c.wav"));
  EXPECT_EQ(m.entries[1].label, 2);
  EXPECT_EQ(m.entries[1].fold, 3);
  EXPECT_EQ(m.num_folds(), 3);
  EXPECT_EQ(m.num_classes(), 3);
}

TEST(Manifest, ColumnOrderFollowsHeader) {
  std::istringstream in("fold,path,label\n2,/abs/x.wav,4\n");
  const auto m = tfr::parse_manifest(in, "/ignored");
  EXPECT_EQ(m.entries[0].audio_path, fs::path("/abs/x.wav"));
  EXPECT_EQ(m.entries[0].label, 4);
  EXPECT_EQ(m.entries[0].fold, 2);
}

TEST(Manifest, ValidationErrors) {
  auto fails = [](const std::string& text, tfr::ManifestLimits lim = {}) {
    std::istringstream in(text);
    EXPECT_THROW(tfr::parse_manifest(in, ".", lim), tfr::Error) << text;
  };
  tfr::ManifestLimits five;
  five.num_folds = 5;
  fails("path,label,fold\na.wav,0,0\n", five);
  fails("path,label,fold\na.wav,0,6\n", five);
  fails("path,label\na.wav,0\n");
  fails("path,label,fold\na.wav,x,1\n");
  fails("path,label,fold\na.wav,1.5,1\n");
  fails("path,label,fold\na.wav,-1,1\n");
  fails("path,label,fold\na.wav,0,1\na.wav,1,2\n");
  fails("path,label,fold\na.wav,0\n");
  fails("");
  tfr::ManifestLimits classes;
  classes.num_classes = 2;
  fails("path,label,fold\na.wav,2,1\n", classes);
}

TEST(Manifest, HeaderOnlyIsEmpty) {
  std::istringstream in("path,label,fold\n");
  EXPECT_EQ(tfr::parse_manifest(in, ".").size(), 0u);
}

TEST(Manifest, EscStyleFoldCounts) {
  std::string text = "path,label,fold\n";
  for (int i = 0; i < 2000; ++i)
    text += "clip" + std::to_string(i) + ".wav," + std::to_string(i % 50) + "," +
            std::to_string(i / 400 + 1) + "\n";
  std::istringstream in(text);
  const auto m = tfr::parse_manifest(in, ".");
  EXPECT_EQ(m.size(), 2000u);
  EXPECT_EQ(m.num_classes(), 50);
  const auto counts = m.fold_counts(5);
  ASSERT_EQ(counts.size(), 5u);
  for (auto c : counts) EXPECT_EQ(c, 400u);
}

TEST(LoadCanonical, ResamplesAndStandardizes) {
  const auto dir = temp_dir();
  const auto x = sine(440.0, 44100, 44100 * 5, 0.5);
  tfr::write_wav(dir / "long.wav", x, 1, 44100, tfr::WavEncoding::Float32);
  const auto c = tfr::load_canonical(dir / "long.wav");
  EXPECT_EQ(c.sample_rate, 22050);
  EXPECT_EQ(c.size(), 88200u);
  fs::remove_all(dir);
}
