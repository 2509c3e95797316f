// SPDX-FileCopyrightText: Copyright (c) 2026 The SonoTrace Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "synthesis/synthesis.hpp"

namespace sonotrace::synthesis {

// Mono 32-bit IEEE-float RIFF/WAVE (format tag 3). Errors: InvalidArgument
// when fs is not a positive integer below 2^32, IoError.
std::vector<std::uint8_t> encode_wav(std::span<const double> samples, double fs);
void write_wav(const std::string& path, std::span<const double> samples, double fs);

// Reads PCM 8/16/24/32-bit, float 32/64-bit and WAVE_FORMAT_EXTENSIBLE
// files. Multi-channel input is averaged to mono; PCM is scaled to [-1, 1).
// Errors: ParseError, IoError.
Signal decode_wav(std::span<const std::uint8_t> bytes);
Signal read_wav(const std::string& path);

// Raw little-endian f64 samples with no header.
void write_raw_f64(const std::string& path, std::span<const double> samples);
std::vector<double> read_raw_f64(const std::string& path);

// Rows "time_s,frequency_hz,magnitude", frame-major.
void write_spectrogram_csv(const std::string& path, const Spectrogram& s);

}  // namespace sonotrace::synthesis
