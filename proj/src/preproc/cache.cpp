// SPDX-FileCopyrightText: Copyright (c) 2026 The SonoTrace Authors
// SPDX-License-Identifier: Apache-2.0

#include "preproc/cache.hpp"

#include "common/binary_io.hpp"
#include "common/error.hpp"

namespace sonotrace::preproc {

namespace {

constexpr char kMagic[4] = {'S', 'T', 'U', 'E'};

void put_vec(ByteWriter& w, const Vec3& v) {
  w.f64(v.x);
  w.f64(v.y);
  w.f64(v.z);
}

Vec3 get_vec(ByteReader& r) {
  const double x = r.f64();
  const double y = r.f64();
  const double z = r.f64();
  return {x, y, z};
}

}  // namespace

std::vector<std::uint8_t> encode_curvature_cache(const CurvatureTable& table, const scene::Scene& scene) {
  const std::uint64_t nt = table.triangle_count();
  if (nt != scene.triangle_count() || table.bins != scene.bin_count()) {
    fail(ErrorCode::InvalidArgument, "curvature table does not belong to this scene");
  }
  ByteWriter w(estimate_footprint(nt, table.bins));
  w.bytes(std::string_view(kMagic, 4));
  w.u32(kCacheVersion);
  w.u64(nt);
  w.u64(table.bins);
  w.zeros(kCacheHeaderBytes - w.size());

  for (std::uint32_t t = 0; t < nt; ++t) {
    const auto& c = scene.corners()[t];
    w.f64(table.metric[t]);
    w.f64(table.variation[t]);
    put_vec(w, (c.v0 + c.v1 + c.v2) / 3.0);
    put_vec(w, scene.triangle_normal(t));
    w.f64(table.area[t]);
    w.f64(table.area_weight[t]);
    w.f64(table.g_min[t]);
    w.f64(table.g_max[t]);
    for (std::uint32_t f = 0; f < table.bins; ++f) {
      w.f32(static_cast<float>(table.beta_at(t, f)));
      w.f32(static_cast<float>(table.k_at(t, f)));
    }
  }
  return std::move(w).take();
}

void write_curvature_cache(const std::string& path, const CurvatureTable& table, const scene::Scene& scene) {
  write_file_bytes(path, encode_curvature_cache(table, scene));
}

CachedCurvature decode_curvature_cache(std::span<const std::uint8_t> bytes) {
  ByteReader r(bytes);
  if (r.string(4) != std::string_view(kMagic, 4)) fail(ErrorCode::ParseError, "curvature cache: bad magic");
  if (r.u32() != kCacheVersion) fail(ErrorCode::ParseError, "curvature cache: unsupported version");
  const std::uint64_t nt = r.u64();
  const std::uint64_t bins = r.u64();
  if (bins == 0 || bins > 1u << 20) fail(ErrorCode::ParseError, "curvature cache: bad bin count");
  const std::uint64_t expected = estimate_footprint(nt, bins);
  if (bytes.size() != expected) fail(ErrorCode::ParseError, "curvature cache: size does not match header");
  r.skip(kCacheHeaderBytes - r.position());

  CachedCurvature out;
  auto& t = out.table;
  t.bins = static_cast<std::uint32_t>(bins);
  t.metric.resize(nt);
  t.variation.resize(nt);
  t.g_min.resize(nt);
  t.g_max.resize(nt);
  t.area.resize(nt);
  t.area_weight.resize(nt);
  t.beta.resize(nt * bins);
  t.k.resize(nt * bins);
  out.centroids.resize(nt);
  out.normals.resize(nt);
  for (std::uint64_t i = 0; i < nt; ++i) {
    t.metric[i] = r.f64();
    t.variation[i] = r.f64();
    out.centroids[i] = get_vec(r);
    out.normals[i] = get_vec(r);
    t.area[i] = r.f64();
    t.area_weight[i] = r.f64();
    t.g_min[i] = r.f64();
    t.g_max[i] = r.f64();
    for (std::uint64_t f = 0; f < bins; ++f) {
      t.beta[i * bins + f] = r.f32();
      t.k[i * bins + f] = r.f32();
    }
  }
  return out;
}

CachedCurvature read_curvature_cache(const std::string& path) { return decode_curvature_cache(read_file_bytes(path)); }

}  // namespace sonotrace::preproc
