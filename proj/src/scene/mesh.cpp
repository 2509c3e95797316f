// SPDX-FileCopyrightText: Copyright (c) 2026 The SonoTrace Authors
// SPDX-License-Identifier: Apache-2.0

#include "scene/mesh.hpp"

#include <algorithm>
#include <numeric>
#include <unordered_map>

#include "common/error.hpp"

namespace sonotrace::scene {

TriangleMesh::TriangleMesh(std::vector<Vec3> vertices, std::vector<TriangleIndices> triangles)
    : vertices_(std::move(vertices)), triangles_(std::move(triangles)) {
  if (triangles_.empty()) fail(ErrorCode::EmptyMesh, "mesh has no triangles");

  const auto n = static_cast<std::uint32_t>(vertices_.size());
  normals_.resize(triangles_.size());
  areas_.resize(triangles_.size());
  boundary_.assign(vertices_.size(), 0);

  std::unordered_map<std::uint64_t, std::uint32_t> edge_use;
  edge_use.reserve(triangles_.size() * 3);

  for (std::size_t t = 0; t < triangles_.size(); ++t) {
    const auto& tri = triangles_[t];
    for (auto idx : tri) {
      if (idx >= n) fail(ErrorCode::InvalidArgument, "triangle index out of range");
    }
    if (tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2]) {
      fail(ErrorCode::InvalidArgument, "triangle repeats a vertex");
    }
    const Vec3 c = cross(vertices_[tri[1]] - vertices_[tri[0]], vertices_[tri[2]] - vertices_[tri[0]]);
    const double len = norm(c);
    areas_[t] = 0.5 * len;
    normals_[t] = len > 0.0 ? c / len : Vec3{0.0, 0.0, 1.0};

    for (int k = 0; k < 3; ++k) {
      std::uint32_t a = tri[k];
      std::uint32_t b = tri[(k + 1) % 3];
      if (a > b) std::swap(a, b);
      ++edge_use[(static_cast<std::uint64_t>(a) << 32) | b];
    }
  }

  for (const auto& [key, count] : edge_use) {
    if (count == 1) {
      boundary_[key >> 32] = 1;
      boundary_[key & 0xffffffffu] = 1;
    }
  }
}

std::size_t TriangleMesh::boundary_vertex_count() const {
  return static_cast<std::size_t>(std::count(boundary_.begin(), boundary_.end(), 1));
}

double TriangleMesh::total_area() const { return std::accumulate(areas_.begin(), areas_.end(), 0.0); }

Aabb TriangleMesh::bounds() const {
  Aabb box;
  for (const auto& v : vertices_) box.expand(v);
  return box;
}

TriangleMesh TriangleMesh::transformed(const Pose& pose, double scale) const {
  std::vector<Vec3> out;
  out.reserve(vertices_.size());
  for (const auto& v : vertices_) out.push_back(pose.apply(v * scale));
  return TriangleMesh(std::move(out), triangles_);
}

}  // namespace sonotrace::scene
