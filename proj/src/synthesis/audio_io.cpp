// SPDX-FileCopyrightText: Copyright (c) 2026 The SonoTrace Authors
// SPDX-License-Identifier: Apache-2.0

#include "synthesis/audio_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "common/binary_io.hpp"
#include "common/error.hpp"

namespace sonotrace::synthesis {

namespace {

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatFloat = 3;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

}  // namespace

std::vector<std::uint8_t> encode_wav(std::span<const double> samples, double fs) {
  if (!(fs > 0.0) || fs != std::floor(fs) || fs >= 4294967296.0) {
    fail(ErrorCode::InvalidArgument, "WAV needs an integer sample rate, got " + std::to_string(fs));
  }
  const std::uint64_t data_bytes = 4ull * samples.size();
  if (data_bytes > 0xFFFFFFFFull - 36) fail(ErrorCode::InvalidArgument, "signal too long for a WAV file");
  const auto rate = static_cast<std::uint32_t>(fs);
  ByteWriter w(44 + data_bytes);
  w.bytes("RIFF");
  w.u32(static_cast<std::uint32_t>(36 + data_bytes));
  w.bytes("WAVE");
  w.bytes("fmt ");
  w.u32(16);
  w.u16(kFormatFloat);
  w.u16(1);
  w.u32(rate);
  w.u32(rate * 4);
  w.u16(4);
  w.u16(32);
  w.bytes("data");
  w.u32(static_cast<std::uint32_t>(data_bytes));
  for (double s : samples) w.f32(static_cast<float>(s));
  return std::move(w).take();
}

void write_wav(const std::string& path, std::span<const double> samples, double fs) {
  write_file_bytes(path, encode_wav(samples, fs));
}

Signal decode_wav(std::span<const std::uint8_t> bytes) {
  ByteReader r(bytes);
  if (r.string(4) != "RIFF") fail(ErrorCode::ParseError, "not a RIFF file");
  r.u32();
  if (r.string(4) != "WAVE") fail(ErrorCode::ParseError, "not a WAVE file");

  std::uint16_t format = 0, channels = 0, bits = 0;
  std::uint32_t rate = 0;
  bool have_fmt = false;
  while (r.remaining() >= 8) {
    const std::string id = r.string(4);
    const std::uint32_t size = r.u32();
    if (size > r.remaining()) fail(ErrorCode::ParseError, "WAV chunk '" + id + "' overruns the file");
    auto body = r.bytes(size);
    if (size % 2 == 1 && r.remaining() > 0) r.skip(1);
    if (id == "fmt ") {
      ByteReader f(body);
      format = f.u16();
      channels = f.u16();
      rate = f.u32();
      f.u32();
      f.u16();
      bits = f.u16();
      if (format == kFormatExtensible) {
        if (f.u16() < 22) fail(ErrorCode::ParseError, "short WAVE_FORMAT_EXTENSIBLE header");
        f.u16();
        f.u32();
        format = f.u16();  // first two bytes of the sub-format GUID
      }
      have_fmt = true;
    } else if (id == "data") {
      if (!have_fmt) fail(ErrorCode::ParseError, "WAV data chunk before fmt chunk");
      if (channels == 0 || rate == 0) fail(ErrorCode::ParseError, "WAV header has zero channels or rate");
      const bool ok = (format == kFormatPcm && (bits == 8 || bits == 16 || bits == 24 || bits == 32)) ||
                      (format == kFormatFloat && (bits == 32 || bits == 64));
      if (!ok) {
        fail(ErrorCode::ParseError, "unsupported WAV encoding (format " + std::to_string(format) + ", " +
                                        std::to_string(bits) + " bits)");
      }
      const std::size_t width = bits / 8;
      const std::size_t frames = body.size() / (width * channels);
      Signal s;
      s.fs = rate;
      s.samples.assign(frames, 0.0);
      ByteReader d(body);
      for (std::size_t i = 0; i < frames; ++i) {
        double acc = 0.0;
        for (std::uint16_t c = 0; c < channels; ++c) {
          double v = 0.0;
          if (format == kFormatFloat) {
            v = bits == 32 ? d.f32() : d.f64();
          } else if (bits == 8) {
            v = (static_cast<double>(d.u8()) - 128.0) / 128.0;
          } else if (bits == 16) {
            v = static_cast<std::int16_t>(d.u16()) / 32768.0;
          } else if (bits == 24) {
            const auto b = d.bytes(3);
            std::int32_t x = b[0] | (b[1] << 8) | (b[2] << 16);
            if (x & 0x800000) x -= 0x1000000;
            v = x / 8388608.0;
          } else {
            v = static_cast<std::int32_t>(d.u32()) / 2147483648.0;
          }
          acc += v;
        }
        s.samples[i] = acc / channels;
      }
      return s;
    }
  }
  fail(ErrorCode::ParseError, "WAV file has no data chunk");
}

Signal read_wav(const std::string& path) { return decode_wav(read_file_bytes(path)); }

void write_raw_f64(const std::string& path, std::span<const double> samples) {
  ByteWriter w(samples.size() * 8);
  for (double s : samples) w.f64(s);
  write_file_bytes(path, w.data());
}

std::vector<double> read_raw_f64(const std::string& path) {
  const auto bytes = read_file_bytes(path);
  if (bytes.size() % 8 != 0) fail(ErrorCode::ParseError, "'" + path + "' is not a whole number of f64 samples");
  ByteReader r(bytes);
  std::vector<double> out(bytes.size() / 8);
  for (auto& v : out) v = r.f64();
  return out;
}

void write_spectrogram_csv(const std::string& path, const Spectrogram& s) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) fail(ErrorCode::IoError, "cannot open '" + path + "' for writing");
  out << "time_s,frequency_hz,magnitude\n";
  char line[96];
  for (std::size_t k = 0; k < s.frames; ++k) {
    for (std::size_t b = 0; b < s.bins; ++b) {
      std::snprintf(line, sizeof line, "%.9g,%.9g,%.17g\n", s.time(k), s.frequency(b), s.at(k, b));
      out << line;
    }
  }
  if (!out) fail(ErrorCode::IoError, "write to '" + path + "' failed");
}

}  // namespace sonotrace::synthesis
