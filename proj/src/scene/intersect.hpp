// SPDX-FileCopyrightText: Copyright (c) 2026 The SonoTrace Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <limits>
#include <optional>

#include "common/math.hpp"

namespace sonotrace::scene {

struct RayHit {
  double t = std::numeric_limits<double>::infinity();
  std::uint32_t triangle = std::numeric_limits<std::uint32_t>::max();
};

// Two-sided Moller-Trumbore. Returns the ray parameter of the hit when it
// lies strictly inside (tmin, tmax).
inline std::optional<double> intersect_triangle(const Ray& ray, const Vec3& v0, const Vec3& v1, const Vec3& v2,
                                                double tmin, double tmax) {
  const Vec3 e1 = v1 - v0;
  const Vec3 e2 = v2 - v0;
  const Vec3 p = cross(ray.direction, e2);
  const double det = dot(e1, p);
  if (det == 0.0 || !std::isfinite(det)) return std::nullopt;
  const double inv = 1.0 / det;
  const Vec3 s = ray.origin - v0;
  const double u = dot(s, p) * inv;
  if (u < 0.0 || u > 1.0) return std::nullopt;
  const Vec3 q = cross(s, e1);
  const double v = dot(ray.direction, q) * inv;
  if (v < 0.0 || u + v > 1.0) return std::nullopt;
  const double t = dot(e2, q) * inv;
  if (!(t > tmin && t < tmax)) return std::nullopt;
  return t;
}

// Nearest-hit ordering: smaller t wins, equal t resolves to the lower id.
inline bool closer(double t, std::uint32_t id, const RayHit& best) {
  return t < best.t || (t == best.t && id < best.triangle);
}

}  // namespace sonotrace::scene
