// SPDX-FileCopyrightText: Copyright (c) 2026 The SonoTrace Authors
// SPDX-License-Identifier: Apache-2.0

#include "scene/primitives.hpp"

#include <array>
#include <cmath>
#include <map>
#include <numbers>
#include <unordered_map>

#include "common/error.hpp"

namespace sonotrace::scene {

namespace {

using Lattice = std::array<int, 3>;

// Builds the surface lattice of an n x n x n cube; `place` maps lattice
// coordinates in [0, n]^3 to positions.
template <typename Place>
TriangleMesh lattice_box(std::uint32_t n, Place place) {
  if (n == 0) fail(ErrorCode::InvalidArgument, "box needs at least one division");
  std::map<Lattice, std::uint32_t> index;
  std::vector<Vec3> vertices;
  std::vector<TriangleIndices> triangles;
  const int m = static_cast<int>(n);

  auto vertex = [&](const Lattice& l) {
    auto [it, inserted] = index.try_emplace(l, static_cast<std::uint32_t>(vertices.size()));
    if (inserted) vertices.push_back(place(l));
    return it->second;
  };

  // axis: fixed coordinate; side 0 or n. (u, v) span the face such that
  // u x v points outward.
  for (int axis = 0; axis < 3; ++axis) {
    for (int side = 0; side <= 1; ++side) {
      int u_axis = (axis + 1) % 3;
      int v_axis = (axis + 2) % 3;
      if (side == 0) std::swap(u_axis, v_axis);
      for (int i = 0; i < m; ++i) {
        for (int j = 0; j < m; ++j) {
          auto at = [&](int a, int b) {
            Lattice l{};
            l[axis] = side * m;
            l[u_axis] = a;
            l[v_axis] = b;
            return vertex(l);
          };
          const auto p00 = at(i, j);
          const auto p10 = at(i + 1, j);
          const auto p11 = at(i + 1, j + 1);
          const auto p01 = at(i, j + 1);
          triangles.push_back({p00, p10, p11});
          triangles.push_back({p00, p11, p01});
        }
      }
    }
  }
  return TriangleMesh(std::move(vertices), std::move(triangles));
}

}  // namespace

TriangleMesh make_plate(double width, double height, std::uint32_t nx, std::uint32_t ny) {
  if (nx == 0 || ny == 0) fail(ErrorCode::InvalidArgument, "plate needs at least one division per axis");
  std::vector<Vec3> vertices;
  vertices.reserve(static_cast<std::size_t>(nx + 1) * (ny + 1));
  for (std::uint32_t j = 0; j <= ny; ++j) {
    for (std::uint32_t i = 0; i <= nx; ++i) {
      vertices.push_back({width * (static_cast<double>(i) / nx - 0.5),
                          height * (static_cast<double>(j) / ny - 0.5), 0.0});
    }
  }
  std::vector<TriangleIndices> triangles;
  triangles.reserve(static_cast<std::size_t>(2) * nx * ny);
  const auto id = [nx](std::uint32_t i, std::uint32_t j) { return j * (nx + 1) + i; };
  for (std::uint32_t j = 0; j < ny; ++j) {
    for (std::uint32_t i = 0; i < nx; ++i) {
      triangles.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
      triangles.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
    }
  }
  return TriangleMesh(std::move(vertices), std::move(triangles));
}

TriangleMesh make_box(double sx, double sy, double sz, std::uint32_t n) {
  const Vec3 size{sx, sy, sz};
  return lattice_box(n, [&](const Lattice& l) {
    return Vec3{size.x * (static_cast<double>(l[0]) / n - 0.5), size.y * (static_cast<double>(l[1]) / n - 0.5),
                size.z * (static_cast<double>(l[2]) / n - 0.5)};
  });
}

TriangleMesh make_beveled_box(double half, std::uint32_t n) {
  if (n < 3) fail(ErrorCode::InvalidArgument, "beveled box needs at least three divisions");
  const double step = 2.0 * half / n;
  const double inner = half - step;
  return lattice_box(n, [&](const Lattice& l) {
    const Vec3 p{half * (2.0 * l[0] / n - 1.0), half * (2.0 * l[1] / n - 1.0), half * (2.0 * l[2] / n - 1.0)};
    const Vec3 core{std::clamp(p.x, -inner, inner), std::clamp(p.y, -inner, inner),
                    std::clamp(p.z, -inner, inner)};
    const Vec3 offset = p - core;
    const double len = norm(offset);
    return len > 0.0 ? core + offset * (step / len) : p;
  });
}

TriangleMesh make_icosphere(double radius, std::uint32_t subdivisions) {
  const double t = (1.0 + std::sqrt(5.0)) / 2.0;
  std::vector<Vec3> vertices = {{-1, t, 0}, {1, t, 0}, {-1, -t, 0}, {1, -t, 0}, {0, -1, t}, {0, 1, t},
                                {0, -1, -t}, {0, 1, -t}, {t, 0, -1}, {t, 0, 1}, {-t, 0, -1}, {-t, 0, 1}};
  for (auto& v : vertices) v = normalized(v);
  std::vector<TriangleIndices> triangles = {{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
                                            {1, 5, 9},  {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
                                            {3, 9, 4},  {3, 4, 2},  {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
                                            {4, 9, 5},  {2, 4, 11}, {6, 2, 10},  {8, 6, 7},  {9, 8, 1}};
  for (std::uint32_t s = 0; s < subdivisions; ++s) {
    std::unordered_map<std::uint64_t, std::uint32_t> midpoint;
    auto mid = [&](std::uint32_t a, std::uint32_t b) {
      const std::uint64_t key = (static_cast<std::uint64_t>(std::min(a, b)) << 32) | std::max(a, b);
      auto [it, inserted] = midpoint.try_emplace(key, static_cast<std::uint32_t>(vertices.size()));
      if (inserted) vertices.push_back(normalized(vertices[a] + vertices[b]));
      return it->second;
    };
    std::vector<TriangleIndices> next;
    next.reserve(triangles.size() * 4);
    for (const auto& tri : triangles) {
      const auto ab = mid(tri[0], tri[1]);
      const auto bc = mid(tri[1], tri[2]);
      const auto ca = mid(tri[2], tri[0]);
      next.push_back({tri[0], ab, ca});
      next.push_back({tri[1], bc, ab});
      next.push_back({tri[2], ca, bc});
      next.push_back({ab, bc, ca});
    }
    triangles = std::move(next);
  }
  for (auto& v : vertices) v *= radius;
  return TriangleMesh(std::move(vertices), std::move(triangles));
}

TriangleMesh make_hemisphere(double radius, std::uint32_t rings, std::uint32_t segments) {
  if (rings == 0 || segments < 3) fail(ErrorCode::InvalidArgument, "hemisphere needs rings >= 1, segments >= 3");
  std::vector<Vec3> vertices{{0.0, 0.0, radius}};
  for (std::uint32_t i = 1; i <= rings; ++i) {
    const double polar = (std::numbers::pi / 2.0) * i / rings;
    for (std::uint32_t j = 0; j < segments; ++j) {
      const double az = 2.0 * std::numbers::pi * j / segments;
      vertices.push_back(
          {radius * std::sin(polar) * std::cos(az), radius * std::sin(polar) * std::sin(az), radius * std::cos(polar)});
    }
  }
  // Snap the base ring exactly onto z = 0.
  for (std::uint32_t j = 0; j < segments; ++j) vertices[1 + (rings - 1) * segments + j].z = 0.0;

  const auto ring = [segments](std::uint32_t i, std::uint32_t j) { return 1 + (i - 1) * segments + j % segments; };
  std::vector<TriangleIndices> triangles;
  for (std::uint32_t j = 0; j < segments; ++j) triangles.push_back({0, ring(1, j), ring(1, j + 1)});
  for (std::uint32_t i = 1; i < rings; ++i) {
    for (std::uint32_t j = 0; j < segments; ++j) {
      triangles.push_back({ring(i, j), ring(i + 1, j), ring(i + 1, j + 1)});
      triangles.push_back({ring(i, j), ring(i + 1, j + 1), ring(i, j + 1)});
    }
  }
  return TriangleMesh(std::move(vertices), std::move(triangles));
}

std::uint64_t plate_triangle_count(std::uint64_t nx, std::uint64_t ny) { return 2 * nx * ny; }
std::uint64_t box_triangle_count(std::uint64_t n) { return 12 * n * n; }
std::uint64_t icosphere_triangle_count(std::uint64_t subdivisions) { return 20ull << (2 * subdivisions); }
std::uint64_t hemisphere_triangle_count(std::uint64_t rings, std::uint64_t segments) {
  return segments * (2 * rings - 1);
}

}  // namespace sonotrace::scene
