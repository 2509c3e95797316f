// SPDX-FileCopyrightText: Copyright (c) 2026 The SonoTrace Authors
// SPDX-License-Identifier: Apache-2.0

#include "tracer/tracer.hpp"

#include "common/binary_io.hpp"
#include "common/error.hpp"
#include "common/parallel.hpp"
#include "tracer/sphere_partition.hpp"

namespace sonotrace::tracer {

namespace {

constexpr std::size_t kRaysPerTask = 256;

}  // namespace

std::vector<Vec3> emitter_directions(const scene::Emitter& emitter) {
  auto dirs = equal_area_directions(emitter.rays);
  for (auto& d : dirs) d = normalized(emitter.pose.orientation.rotate(d));
  return dirs;
}

HitBuffer trace_specular(const scene::Scene& scene, std::uint32_t emitter_index, unsigned workers) {
  if (emitter_index >= scene.emitters().size()) fail(ErrorCode::UnknownEntity, "emitter index out of range");
  const auto& emitter = scene.emitters()[emitter_index];
  const auto dirs = emitter_directions(emitter);
  const std::uint32_t slots = emitter.max_bounces + 1;
  const double eps = scene.epsilon();

  HitBuffer out;
  out.emitter = emitter_index;
  out.revision = scene.revision();
  out.ray_count = emitter.rays;

  // Fixed slots per ray; compacted afterwards in (ray, bounce) order.
  std::vector<HitRecord> slot(static_cast<std::size_t>(emitter.rays) * slots);
  std::vector<std::uint32_t> used(emitter.rays, 0);

  const std::size_t tasks = (dirs.size() + kRaysPerTask - 1) / kRaysPerTask;
  parallel_for(tasks, workers, [&](std::size_t task) {
    const std::size_t end = std::min(dirs.size(), (task + 1) * kRaysPerTask);
    for (std::size_t i = task * kRaysPerTask; i < end; ++i) {
      const Vec3 source = emitter.pose.position;
      Vec3 origin = source;
      Vec3 direction = dirs[i];
      Vec3 previous = source;
      double r_total = 0.0;
      for (std::uint32_t j = 0; j <= emitter.max_bounces; ++j) {
        const double remaining = emitter.max_distance - r_total;
        const auto hit = scene.closest_hit({origin, direction}, 0.0, remaining + eps);
        if (!hit) break;
        const Vec3 location = origin + direction * hit->t;
        const double step = distance(previous, location);
        if (r_total + step > emitter.max_distance) break;
        r_total += step;

        const Vec3 n = scene.triangle_normal(hit->triangle);
        const Vec3 reflected = normalized(reflect(direction, n));

        HitRecord& rec = slot[i * slots + j];
        rec.ray = static_cast<std::uint32_t>(i);
        rec.bounce = j;
        rec.position = location;
        rec.triangle = hit->triangle;
        rec.instance = scene.triangle_instance(hit->triangle);
        rec.path_length = r_total;
        rec.reflection = reflected;
        // The segment just travelled is unobstructed by construction.
        rec.occluded_to_origin = false;
        used[i] = j + 1;

        if (r_total >= emitter.max_distance) break;
        const double side = dot(reflected, n) >= 0.0 ? 1.0 : -1.0;
        origin = location + n * (side * eps);
        previous = location;
        direction = reflected;
      }
    }
  });

  std::size_t total = 0;
  for (auto u : used) total += u;
  out.records.reserve(total);
  for (std::size_t i = 0; i < used.size(); ++i) {
    for (std::uint32_t j = 0; j < used[i]; ++j) out.records.push_back(slot[i * slots + j]);
  }
  return out;
}

std::vector<std::uint8_t> encode_hit_buffer(const HitBuffer& hits) {
  ByteWriter w(32 + hits.records.size() * 93);
  w.bytes(std::string_view("STHB"));
  w.u32(1);
  w.u32(hits.emitter);
  w.u32(hits.ray_count);
  w.u64(hits.revision);
  w.u64(hits.records.size());
  for (const auto& r : hits.records) {
    w.u32(r.ray);
    w.u32(r.bounce);
    w.u32(r.triangle);
    w.u32(r.instance);
    w.f64(r.position.x);
    w.f64(r.position.y);
    w.f64(r.position.z);
    w.f64(r.path_length);
    w.f64(r.reflection.x);
    w.f64(r.reflection.y);
    w.f64(r.reflection.z);
    w.u8(r.occluded_to_origin ? 1 : 0);
  }
  return std::move(w).take();
}

void write_hit_buffer(const std::string& path, const HitBuffer& hits) {
  write_file_bytes(path, encode_hit_buffer(hits));
}

}  // namespace sonotrace::tracer
