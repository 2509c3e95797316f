// SPDX-FileCopyrightText: Copyright (c) 2026 The SonoTrace Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "common/math.hpp"
#include "scene/scene.hpp"

namespace sonotrace::tracer {

// Mirror direction: d - 2 (d . n) n.
inline Vec3 reflect(const Vec3& d, const Vec3& n) { return d - 2.0 * dot(d, n) * n; }

struct HitRecord {
  std::uint32_t ray = 0;
  std::uint32_t bounce = 0;      // 0-based
  Vec3 position;
  std::uint32_t triangle = 0;    // scene triangle id
  std::uint32_t instance = 0;
  double path_length = 0.0;      // r_total from the emitter, m
  Vec3 reflection;               // unit
  bool occluded_to_origin = false;
};

// Records ordered by (ray, bounce). Bounces are contiguous from 0 per ray.
struct HitBuffer {
  std::uint32_t emitter = 0;
  std::uint64_t revision = 0;
  std::uint32_t ray_count = 0;
  std::vector<HitRecord> records;
};

// World-space ray directions of an emitter: equal-area directions about
// +Z rotated by the emitter orientation.
std::vector<Vec3> emitter_directions(const scene::Emitter& emitter);

// Specular path tracing. Each ray is intersected, reflected about the hit
// normal and continued from an origin offset by scene.epsilon() along the
// normal, until max_bounces extra bounces, a miss, or the path reaching
// max_distance. Hits beyond max_distance are never recorded. Output does not
// depend on `workers`.
HitBuffer trace_specular(const scene::Scene& scene, std::uint32_t emitter, unsigned workers = 0);

// Debug dump, little-endian: "STHB", u32 version, u32 emitter, u32 ray
// count, u64 revision, u64 record count, then per record u32 ray, u32
// bounce, u32 triangle, u32 instance, f64 position[3], f64 path length,
// f64 reflection[3], u8 occluded flag.
std::vector<std::uint8_t> encode_hit_buffer(const HitBuffer& hits);
void write_hit_buffer(const std::string& path, const HitBuffer& hits);

}  // namespace sonotrace::tracer
