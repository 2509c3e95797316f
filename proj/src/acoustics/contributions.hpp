// SPDX-FileCopyrightText: Copyright (c) 2026 The SonoTrace Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "common/math.hpp"

namespace sonotrace::acoustics {

enum class ContributionKind : std::uint8_t { Specular = 0, Diffraction = 1, Passive = 2 };

enum Component : std::uint32_t {
  kSpecular = 1u << 0,
  kDiffraction = 1u << 1,
  kPassive = 1u << 2,
  kAllComponents = kSpecular | kDiffraction | kPassive,
};

struct Contribution {
  ContributionKind kind = ContributionKind::Specular;
  std::uint32_t source = 0;
  std::uint32_t receiver = 0;
  // Specular: index of the hit record (reflection point) in the emitter's
  // hit buffer. Diffraction: surviving candidate index. Passive: 0.
  std::uint32_t index = 0;
  Vec3 position;
  double path_length = 0.0;  // r, m
  Vec3 departure;            // unit direction leaving the emitter (world)
};

// The simulation "point cloud". Items are ordered by (kind, source,
// receiver, index); magnitudes hold `bins` values per item.
struct ContributionSet {
  std::uint64_t revision = 0;
  std::uint32_t sources = 0;
  std::uint32_t receivers = 0;
  std::uint32_t bins = 0;
  std::uint64_t specular_points = 0;     // N
  std::uint64_t diffraction_points = 0;  // O
  double speed_of_sound = 343.0;
  std::vector<double> frequencies;
  std::vector<Contribution> items;
  std::vector<double> magnitudes;

  std::size_t size() const { return items.size(); }
  std::span<const double> magnitude(std::size_t i) const { return {magnitudes.data() + i * bins, bins}; }
  std::span<double> magnitude(std::size_t i) { return {magnitudes.data() + i * bins, bins}; }

  // Appends items and magnitudes of `other` (same bins) and adds its counts.
  void append(const ContributionSet& other);
};

// Wire/file layout, little-endian:
//   "STPC", u16 version, u16 component flags, u32 S, u32 R, u32 F,
//   u64 N, u64 O, u64 record count, u64 revision, u64 seed,
//   f64 speed of sound, F x f64 bin frequencies,
//   records: u8 kind, u32 s, u32 m, f64 position[3], f64 r, u32 index,
//            F x f64 magnitude
inline constexpr std::uint16_t kContributionFormatVersion = 1;

struct ExportInfo {
  std::uint32_t components = 0;
  std::uint64_t seed = 0;
};

std::vector<std::uint8_t> encode_contributions(const ContributionSet& set, const ExportInfo& info);

// Departure directions are not serialized and decode as zero.
ContributionSet decode_contributions(std::span<const std::uint8_t> bytes, ExportInfo* info = nullptr);

std::size_t contribution_header_bytes(std::uint32_t bins);
std::size_t contribution_record_bytes(std::uint32_t bins);

}  // namespace sonotrace::acoustics
