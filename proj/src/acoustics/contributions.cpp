// SPDX-FileCopyrightText: Copyright (c) 2026 The SonoTrace Authors
// SPDX-License-Identifier: Apache-2.0

#include "acoustics/contributions.hpp"

#include "common/binary_io.hpp"
#include "common/error.hpp"

namespace sonotrace::acoustics {

namespace {

constexpr char kMagic[4] = {'S', 'T', 'P', 'C'};

}  // namespace

void ContributionSet::append(const ContributionSet& other) {
  if (other.bins != bins) fail(ErrorCode::InvalidArgument, "cannot merge contribution sets with different bins");
  items.insert(items.end(), other.items.begin(), other.items.end());
  magnitudes.insert(magnitudes.end(), other.magnitudes.begin(), other.magnitudes.end());
  specular_points += other.specular_points;
  diffraction_points += other.diffraction_points;
}

std::size_t contribution_header_bytes(std::uint32_t bins) { return 68 + 8 * static_cast<std::size_t>(bins); }
std::size_t contribution_record_bytes(std::uint32_t bins) { return 45 + 8 * static_cast<std::size_t>(bins); }

std::vector<std::uint8_t> encode_contributions(const ContributionSet& set, const ExportInfo& info) {
  if (set.frequencies.size() != set.bins || set.magnitudes.size() != set.items.size() * set.bins) {
    fail(ErrorCode::InvalidArgument, "inconsistent contribution set");
  }
  ByteWriter w(contribution_header_bytes(set.bins) + set.items.size() * contribution_record_bytes(set.bins));
  w.bytes(std::string_view(kMagic, 4));
  w.u16(kContributionFormatVersion);
  w.u16(static_cast<std::uint16_t>(info.components));
  w.u32(set.sources);
  w.u32(set.receivers);
  w.u32(set.bins);
  w.u64(set.specular_points);
  w.u64(set.diffraction_points);
  w.u64(set.items.size());
  w.u64(set.revision);
  w.u64(info.seed);
  w.f64(set.speed_of_sound);
  for (double f : set.frequencies) w.f64(f);
  for (std::size_t i = 0; i < set.items.size(); ++i) {
    const auto& c = set.items[i];
    w.u8(static_cast<std::uint8_t>(c.kind));
    w.u32(c.source);
    w.u32(c.receiver);
    w.f64(c.position.x);
    w.f64(c.position.y);
    w.f64(c.position.z);
    w.f64(c.path_length);
    w.u32(c.index);
    for (double m : set.magnitude(i)) w.f64(m);
  }
  return std::move(w).take();
}

ContributionSet decode_contributions(std::span<const std::uint8_t> bytes, ExportInfo* info) {
  ByteReader r(bytes);
  if (r.string(4) != std::string_view(kMagic, 4)) fail(ErrorCode::ParseError, "contribution set: bad magic");
  if (r.u16() != kContributionFormatVersion) fail(ErrorCode::ParseError, "contribution set: unsupported version");
  ContributionSet set;
  const std::uint16_t components = r.u16();
  set.sources = r.u32();
  set.receivers = r.u32();
  set.bins = r.u32();
  set.specular_points = r.u64();
  set.diffraction_points = r.u64();
  const std::uint64_t count = r.u64();
  set.revision = r.u64();
  const std::uint64_t seed = r.u64();
  set.speed_of_sound = r.f64();
  if (set.bins == 0) fail(ErrorCode::ParseError, "contribution set: zero bins");
  if (set.bins > r.remaining() / 8) fail(ErrorCode::ParseError, "contribution set: truncated header");
  set.frequencies.resize(set.bins);
  for (auto& f : set.frequencies) f = r.f64();
  if (count != r.remaining() / contribution_record_bytes(set.bins) ||
      r.remaining() % contribution_record_bytes(set.bins) != 0) {
    fail(ErrorCode::ParseError, "contribution set: record count does not match payload size");
  }
  set.items.resize(count);
  set.magnitudes.resize(count * set.bins);
  for (std::size_t i = 0; i < count; ++i) {
    auto& c = set.items[i];
    const std::uint8_t kind = r.u8();
    if (kind > 2) fail(ErrorCode::ParseError, "contribution set: unknown kind");
    c.kind = static_cast<ContributionKind>(kind);
    c.source = r.u32();
    c.receiver = r.u32();
    c.position.x = r.f64();
    c.position.y = r.f64();
    c.position.z = r.f64();
    c.path_length = r.f64();
    c.index = r.u32();
    for (auto& m : set.magnitude(i)) m = r.f64();
  }
  if (info) *info = {components, seed};
  return set;
}

}  // namespace sonotrace::acoustics
