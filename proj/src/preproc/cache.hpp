// SPDX-FileCopyrightText: Copyright (c) 2026 The SonoTrace Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "preproc/curvature.hpp"
#include "scene/scene.hpp"

namespace sonotrace::preproc {

// Curvature cache, little-endian:
//   header (128 bytes): "STUE", u32 version, u64 T, u64 F, zero padding
//   T records of 8 * (12 + F) bytes:
//     f64 C, f64 dG, f64 centroid[3], f64 normal[3], f64 area, f64 w,
//     f64 g_min, f64 g_max, then F x (f32 beta, f32 k)
inline constexpr std::uint32_t kCacheVersion = 1;
inline constexpr std::size_t kCacheHeaderBytes = 128;

std::vector<std::uint8_t> encode_curvature_cache(const CurvatureTable& table, const scene::Scene& scene);
void write_curvature_cache(const std::string& path, const CurvatureTable& table, const scene::Scene& scene);

struct CachedCurvature {
  CurvatureTable table;
  std::vector<Vec3> centroids;
  std::vector<Vec3> normals;
};

// Errors: ParseError for bad magic/version/size, IoError.
CachedCurvature decode_curvature_cache(std::span<const std::uint8_t> bytes);
CachedCurvature read_curvature_cache(const std::string& path);

}  // namespace sonotrace::preproc
