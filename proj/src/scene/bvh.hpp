// SPDX-FileCopyrightText: Copyright (c) 2026 The SonoTrace Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "common/math.hpp"
#include "scene/intersect.hpp"

namespace sonotrace::scene {

struct TriangleCorners {
  Vec3 v0;
  Vec3 v1;
  Vec3 v2;
};

// Binned surface-area-heuristic BVH over a flat triangle array. The BVH
// stores only indices; triangle positions are passed to every query so
// refit() can follow rigid instance moves without rebuilding topology.
class Bvh {
 public:
  Bvh() = default;
  explicit Bvh(std::span<const TriangleCorners> triangles);

  // Recomputes node bounds bottom-up for moved triangles (same count).
  void refit(std::span<const TriangleCorners> triangles);

  std::optional<RayHit> closest(std::span<const TriangleCorners> triangles, const Ray& ray, double tmin,
                                double tmax) const;
  bool any_hit(std::span<const TriangleCorners> triangles, const Ray& ray, double tmin, double tmax) const;

  std::size_t node_count() const { return nodes_.size(); }
  Aabb bounds() const { return nodes_.empty() ? Aabb{} : nodes_[0].box; }

 private:
  struct Node {
    Aabb box;
    std::uint32_t first = 0;  // first primitive (leaf) or left child (inner)
    std::uint32_t count = 0;  // primitive count; 0 marks an inner node
    std::uint32_t right = 0;
  };

  std::uint32_t build(std::span<const TriangleCorners> triangles, std::vector<Aabb>& boxes,
                      std::vector<Vec3>& centroids, std::uint32_t begin, std::uint32_t end, int depth);
  Aabb refit_node(std::span<const TriangleCorners> triangles, std::uint32_t node);

  std::vector<Node> nodes_;
  std::vector<std::uint32_t> prims_;
};

}  // namespace sonotrace::scene
