// SPDX-FileCopyrightText: Copyright (c) 2026 The SonoTrace Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "common/math.hpp"

namespace sonotrace::scene {

using TriangleIndices = std::array<std::uint32_t, 3>;

// Triangles below this area (m^2) carry no reliable normal.
inline constexpr double kDegenerateArea = 1e-12;

// Indexed triangle soup with derived per-triangle normals and areas and
// per-vertex boundary flags. Immutable once constructed.
class TriangleMesh {
 public:
  TriangleMesh() = default;

  // Throws Error(InvalidArgument) when an index is out of range or a
  // triangle repeats a vertex, Error(EmptyMesh) when there are no triangles.
  TriangleMesh(std::vector<Vec3> vertices, std::vector<TriangleIndices> triangles);

  const std::vector<Vec3>& vertices() const { return vertices_; }
  const std::vector<TriangleIndices>& triangles() const { return triangles_; }
  const std::vector<Vec3>& normals() const { return normals_; }
  const std::vector<double>& areas() const { return areas_; }

  std::size_t vertex_count() const { return vertices_.size(); }
  std::size_t triangle_count() const { return triangles_.size(); }

  bool is_boundary_vertex(std::size_t v) const { return boundary_[v] != 0; }
  bool is_degenerate(std::size_t t) const { return areas_[t] < kDegenerateArea; }
  std::size_t boundary_vertex_count() const;
  double total_area() const;
  Aabb bounds() const;

  Vec3 corner(std::size_t t, int k) const { return vertices_[triangles_[t][k]]; }
  Vec3 centroid(std::size_t t) const {
    return (corner(t, 0) + corner(t, 1) + corner(t, 2)) / 3.0;
  }

  // Applies scale, then rotation, then translation to every vertex.
  TriangleMesh transformed(const Pose& pose, double scale = 1.0) const;

 private:
  std::vector<Vec3> vertices_;
  std::vector<TriangleIndices> triangles_;
  std::vector<Vec3> normals_;
  std::vector<double> areas_;
  std::vector<std::uint8_t> boundary_;
};

}  // namespace sonotrace::scene
