#include "tfr/audio_io.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iterator>
#include <stdexcept>
#include <string>

#include "binary_io.hpp"
#include "tfr/error.hpp"

namespace tfr {
namespace detail {

std::vector<std::uint8_t> read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path);
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  if (in.bad()) throw Error("read failed: " + path);
  return bytes;
}

void write_file(const std::string& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot create " + path);
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error("write failed: " + path);
}

}  // namespace detail

namespace {

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatFloat = 3;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

struct WavFormat {
  std::uint16_t format = 0;
  std::uint16_t channels = 0;
  std::uint32_t sample_rate = 0;
  std::uint16_t bits = 0;
  bool seen = false;
};

double decode_sample(const std::uint8_t* p, const WavFormat& fmt) {
  if (fmt.format == kFormatFloat) {
    float f;
    std::memcpy(&f, p, 4);
    return f;
  }
  switch (fmt.bits) {
    case 8:
      return (static_cast<int>(p[0]) - 128) / 128.0;
    case 16: {
      std::int16_t v;
      std::memcpy(&v, p, 2);
      return v / 32768.0;
    }
    case 24: {
      std::int32_t v = p[0] | (p[1] << 8) | (p[2] << 16);
      if (v & 0x800000) v -= 0x1000000;
      return v / 8388608.0;
    }
    case 32: {
      std::int32_t v;
      std::memcpy(&v, p, 4);
      return v / 2147483648.0;
    }
  }
  throw Error("unsupported bit depth");
}

AudioClip decode_wav(std::span<const std::uint8_t> bytes) {
  detail::ByteReader r(bytes, "wav");
  if (r.remaining() < 12 || r.str(4) != "RIFF") throw Error("wav: missing RIFF header");
  r.skip(4);
  if (r.str(4) != "WAVE") throw Error("wav: not a WAVE file");

  WavFormat fmt;
  std::span<const std::uint8_t> data;
  bool have_data = false;
  while (r.remaining() >= 8) {
    const std::string id = r.str(4);
    const auto size = r.get<std::uint32_t>();
    const std::size_t avail = std::min<std::size_t>(size, r.remaining());
    const std::size_t start = r.position();
    if (id == "fmt ") {
      if (size < 16) throw Error("wav: short fmt chunk");
      fmt.format = r.get<std::uint16_t>();
      fmt.channels = r.get<std::uint16_t>();
      fmt.sample_rate = r.get<std::uint32_t>();
      r.skip(6);  // byte rate, block align
      fmt.bits = r.get<std::uint16_t>();
      if (fmt.format == kFormatExtensible) {
        if (size < 40) throw Error("wav: short extensible fmt chunk");
        r.skip(8);  // cbSize, valid bits, channel mask
        fmt.format = r.get<std::uint16_t>();
      }
      fmt.seen = true;
    } else if (id == "data") {
      data = bytes.subspan(start, avail);
      have_data = true;
    }
    // Chunks are word aligned.
    r.seek(std::min(start + std::size_t{size} + (size & 1u), bytes.size()));
    if (have_data && fmt.seen) break;
  }
  if (!fmt.seen) throw Error("wav: missing fmt chunk");
  if (!have_data) throw Error("wav: missing data chunk");
  if (fmt.channels == 0) throw Error("wav: zero channels");
  if (fmt.sample_rate == 0) throw Error("wav: zero sample rate");
  const bool pcm_ok = fmt.format == kFormatPcm &&
                      (fmt.bits == 8 || fmt.bits == 16 || fmt.bits == 24 || fmt.bits == 32);
  const bool float_ok = fmt.format == kFormatFloat && fmt.bits == 32;
  if (!pcm_ok && !float_ok) {
    throw Error("wav: unsupported encoding (format " + std::to_string(fmt.format) + ", " +
                std::to_string(fmt.bits) + " bit)");
  }

  const std::size_t bytes_per_sample = fmt.bits / 8;
  const std::size_t frame_bytes = bytes_per_sample * fmt.channels;
  const std::size_t frames = data.size() / frame_bytes;
  if (frames == 0) throw Error("wav: zero-length audio");

  AudioClip clip;
  clip.sample_rate = static_cast<int>(fmt.sample_rate);
  clip.samples.resize(frames);
  for (std::size_t i = 0; i < frames; ++i) {
    double acc = 0.0;
    for (std::size_t c = 0; c < fmt.channels; ++c) {
      acc += decode_sample(data.data() + i * frame_bytes + c * bytes_per_sample, fmt);
    }
    clip.samples[i] = acc / fmt.channels;
  }
  for (double s : clip.samples) {
    if (!std::isfinite(s)) throw Error("wav: non-finite sample");
  }
  return clip;
}

}  // namespace

AudioClip load_wav(const std::filesystem::path& path) {
  try {
    return decode_wav(detail::read_file(path.string()));
  } catch (const Error& e) {
    throw Error(path.string() + ": " + e.what());
  }
}

AudioClip read_wav(std::istream& in) {
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  return decode_wav(bytes);
}

void write_wav(const std::filesystem::path& path, std::span<const double> interleaved,
               int channels, int sample_rate, WavEncoding encoding) {
  if (channels < 1) throw std::invalid_argument("write_wav: channels must be >= 1");
  if (sample_rate < 1) throw std::invalid_argument("write_wav: sample rate must be positive");
  if (interleaved.size() % static_cast<std::size_t>(channels) != 0)
    throw std::invalid_argument("write_wav: sample count not a multiple of channels");

  std::uint16_t bits = 16;
  std::uint16_t format = kFormatPcm;
  switch (encoding) {
    case WavEncoding::Pcm8: bits = 8; break;
    case WavEncoding::Pcm16: bits = 16; break;
    case WavEncoding::Pcm24: bits = 24; break;
    case WavEncoding::Pcm32: bits = 32; break;
    case WavEncoding::Float32: bits = 32; format = kFormatFloat; break;
  }
  const std::uint32_t bytes_per_sample = bits / 8u;
  const auto data_size = static_cast<std::uint32_t>(interleaved.size() * bytes_per_sample);

  detail::ByteWriter w;
  w.tag("RIFF");
  w.u32(36 + data_size + (data_size & 1u));
  w.tag("WAVE");
  w.tag("fmt ");
  w.u32(16);
  w.u16(format);
  w.u16(static_cast<std::uint16_t>(channels));
  w.u32(static_cast<std::uint32_t>(sample_rate));
  w.u32(static_cast<std::uint32_t>(sample_rate) * channels * bytes_per_sample);
  w.u16(static_cast<std::uint16_t>(channels * bytes_per_sample));
  w.u16(bits);
  w.tag("data");
  w.u32(data_size);

  auto quantize = [](double v, double scale, double lo, double hi) {
    return std::clamp(std::round(v * scale), lo, hi);
  };
  for (double v : interleaved) {
    switch (encoding) {
      case WavEncoding::Pcm8: {
        const auto q = static_cast<int>(quantize(v, 128.0, -128.0, 127.0));
        w.bytes(std::array<std::uint8_t, 1>{static_cast<std::uint8_t>(q + 128)}.data(), 1);
        break;
      }
      case WavEncoding::Pcm16:
        w.u16(static_cast<std::uint16_t>(
            static_cast<std::int16_t>(quantize(v, 32768.0, -32768.0, 32767.0))));
        break;
      case WavEncoding::Pcm24: {
        const auto q = static_cast<std::int32_t>(quantize(v, 8388608.0, -8388608.0, 8388607.0));
        const std::uint8_t b[3] = {static_cast<std::uint8_t>(q & 0xff),
                                   static_cast<std::uint8_t>((q >> 8) & 0xff),
                                   static_cast<std::uint8_t>((q >> 16) & 0xff)};
        w.bytes(b, 3);
        break;
      }
      case WavEncoding::Pcm32:
        w.u32(static_cast<std::uint32_t>(static_cast<std::int32_t>(
            quantize(v, 2147483648.0, -2147483648.0, 2147483647.0))));
        break;
      case WavEncoding::Float32:
        w.f32(static_cast<float>(v));
        break;
    }
  }
  if (data_size & 1u) w.bytes("\0", 1);
  detail::write_file(path.string(), w.buffer());
}

void write_wav(const std::filesystem::path& path, const AudioClip& clip, WavEncoding encoding) {
  write_wav(path, clip.samples, 1, clip.sample_rate, encoding);
}

AudioClip standardize(const AudioClip& clip) {
  if (clip.sample_rate != kCanonicalRate) {
    throw std::invalid_argument("standardize: expected " + std::to_string(kCanonicalRate) +
                                " Hz, got " + std::to_string(clip.sample_rate));
  }
  AudioClip out;
  out.sample_rate = clip.sample_rate;
  out.samples.assign(kCanonicalLength, 0.0);
  const std::size_t n = std::min(kCanonicalLength, clip.samples.size());
  std::copy_n(clip.samples.begin(), n, out.samples.begin());
  return out;
}

AudioClip load_canonical(const std::filesystem::path& path) {
  return standardize(resample(load_wav(path), kCanonicalRate));
}

}  // namespace tfr
