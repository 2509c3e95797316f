// SPDX-FileCopyrightText: Copyright (c) 2026 The SonoTrace Authors
// SPDX-License-Identifier: Apache-2.0

#include "scene/bvh.hpp"

#include <algorithm>
#include <array>

namespace sonotrace::scene {

namespace {

constexpr std::uint32_t kLeafSize = 4;
constexpr int kBins = 16;
constexpr double kTraversalCost = 1.0;
constexpr double kIntersectCost = 1.0;
constexpr int kMaxSahDepth = 48;

Aabb triangle_box(const TriangleCorners& t) {
  Aabb b;
  b.expand(t.v0);
  b.expand(t.v1);
  b.expand(t.v2);
  return b;
}

// Slab test against [tmin, tmax]; returns the entry distance or nullopt.
std::optional<double> hit_box(const Aabb& box, const Ray& ray, double tmin, double tmax) {
  for (int a = 0; a < 3; ++a) {
    const double o = ray.origin[a];
    const double d = ray.direction[a];
    const double lo = box.lo[a];
    const double hi = box.hi[a];
    if (d == 0.0) {
      if (o < lo || o > hi) return std::nullopt;
      continue;
    }
    const double inv = 1.0 / d;
    double t0 = (lo - o) * inv;
    double t1 = (hi - o) * inv;
    if (t0 > t1) std::swap(t0, t1);
    // Widen slightly so triangles lying in a box face are never culled.
    const double slack = 1e-12 * (1.0 + std::max(std::abs(t0), std::abs(t1)));
    tmin = std::max(tmin, t0 - slack);
    tmax = std::min(tmax, t1 + slack);
    if (tmin > tmax) return std::nullopt;
  }
  return tmin;
}

}  // namespace

Bvh::Bvh(std::span<const TriangleCorners> triangles) {
  if (triangles.empty()) return;
  const auto n = static_cast<std::uint32_t>(triangles.size());
  prims_.resize(n);
  std::vector<Aabb> boxes(n);
  std::vector<Vec3> centroids(n);
  for (std::uint32_t i = 0; i < n; ++i) {
    prims_[i] = i;
    boxes[i] = triangle_box(triangles[i]);
    centroids[i] = boxes[i].center();
  }
  nodes_.reserve(2 * n / kLeafSize + 1);
  build(triangles, boxes, centroids, 0, n, 0);
}

std::uint32_t Bvh::build(std::span<const TriangleCorners> triangles, std::vector<Aabb>& boxes,
                         std::vector<Vec3>& centroids, std::uint32_t begin, std::uint32_t end, int depth) {
  const auto index = static_cast<std::uint32_t>(nodes_.size());
  nodes_.emplace_back();

  Aabb box;
  Aabb centroid_box;
  for (std::uint32_t i = begin; i < end; ++i) {
    box.expand(boxes[prims_[i]]);
    centroid_box.expand(centroids[prims_[i]]);
  }
  nodes_[index].box = box;

  const std::uint32_t count = end - begin;
  auto make_leaf = [&] {
    nodes_[index].first = begin;
    nodes_[index].count = count;
    return index;
  };
  if (count <= kLeafSize) return make_leaf();

  // Binned SAH over the widest centroid axis.
  const Vec3 extent = centroid_box.extent();
  int axis = 0;
  if (extent.y > extent[axis]) axis = 1;
  if (extent.z > extent[axis]) axis = 2;
  if (extent[axis] <= 0.0) {
    // All centroids coincide: split by count to keep leaves bounded.
    const std::uint32_t mid = begin + count / 2;
    nodes_[index].first = build(triangles, boxes, centroids, begin, mid, depth + 1);
    nodes_[index].right = build(triangles, boxes, centroids, mid, end, depth + 1);
    return index;
  }

  struct Bin {
    Aabb box;
    std::uint32_t count = 0;
  };
  std::array<Bin, kBins> bins{};
  const double lo = centroid_box.lo[axis];
  const double scale = kBins / extent[axis];
  auto bin_of = [&](std::uint32_t prim) {
    const int b = static_cast<int>((centroids[prim][axis] - lo) * scale);
    return std::clamp(b, 0, kBins - 1);
  };
  for (std::uint32_t i = begin; i < end; ++i) {
    auto& bin = bins[bin_of(prims_[i])];
    bin.box.expand(boxes[prims_[i]]);
    ++bin.count;
  }

  std::array<double, kBins - 1> left_cost{};
  Aabb acc;
  std::uint32_t acc_count = 0;
  for (int b = 0; b < kBins - 1; ++b) {
    acc.expand(bins[b].box);
    acc_count += bins[b].count;
    left_cost[b] = acc.surface_area() * acc_count;
  }
  acc = Aabb{};
  acc_count = 0;
  double best_cost = std::numeric_limits<double>::infinity();
  int best_split = -1;
  for (int b = kBins - 1; b > 0; --b) {
    acc.expand(bins[b].box);
    acc_count += bins[b].count;
    const double cost = left_cost[b - 1] + acc.surface_area() * acc_count;
    if (cost < best_cost) {
      best_cost = cost;
      best_split = b;
    }
  }

  const double leaf_cost = kIntersectCost * count;
  const double split_cost = kTraversalCost + kIntersectCost * best_cost / box.surface_area();
  std::uint32_t mid = begin;
  // Past kMaxSahDepth fall back to median splits so traversal stacks stay bounded.
  if (depth < kMaxSahDepth && best_split > 0 && (split_cost < leaf_cost || count > 4 * kLeafSize)) {
    auto* first = prims_.data() + begin;
    auto* last = prims_.data() + end;
    mid = static_cast<std::uint32_t>(
        std::stable_partition(first, last, [&](std::uint32_t p) { return bin_of(p) < best_split; }) -
        prims_.data());
  }
  if (mid == begin || mid == end) {
    if (depth < kMaxSahDepth && count <= 4 * kLeafSize && !(split_cost < leaf_cost)) return make_leaf();
    mid = begin + count / 2;
    std::nth_element(prims_.begin() + begin, prims_.begin() + mid, prims_.begin() + end,
                     [&](std::uint32_t a, std::uint32_t b) {
                       return centroids[a][axis] < centroids[b][axis] ||
                              (centroids[a][axis] == centroids[b][axis] && a < b);
                     });
  }

  const std::uint32_t left = build(triangles, boxes, centroids, begin, mid, depth + 1);
  const std::uint32_t right = build(triangles, boxes, centroids, mid, end, depth + 1);
  nodes_[index].first = left;
  nodes_[index].right = right;
  return index;
}

void Bvh::refit(std::span<const TriangleCorners> triangles) {
  if (!nodes_.empty()) refit_node(triangles, 0);
}

Aabb Bvh::refit_node(std::span<const TriangleCorners> triangles, std::uint32_t node) {
  Node& n = nodes_[node];
  Aabb box;
  if (n.count > 0) {
    for (std::uint32_t i = n.first; i < n.first + n.count; ++i) box.expand(triangle_box(triangles[prims_[i]]));
  } else {
    box.expand(refit_node(triangles, n.first));
    box.expand(refit_node(triangles, nodes_[node].right));
  }
  nodes_[node].box = box;
  return box;
}

std::optional<RayHit> Bvh::closest(std::span<const TriangleCorners> triangles, const Ray& ray, double tmin,
                                   double tmax) const {
  if (nodes_.empty()) return std::nullopt;
  RayHit best;
  best.t = tmax;
  bool found = false;

  std::array<std::uint32_t, 192> stack{};
  int top = 0;
  if (!hit_box(nodes_[0].box, ray, tmin, tmax)) return std::nullopt;
  stack[top++] = 0;
  while (top > 0) {
    const Node& n = nodes_[stack[--top]];
    if (n.count > 0) {
      for (std::uint32_t i = n.first; i < n.first + n.count; ++i) {
        const std::uint32_t id = prims_[i];
        const auto& tri = triangles[id];
        // Query up to and including best.t so equal-distance hits can
        // still win the lower-id tie-break.
        const double limit = found ? std::nextafter(best.t, std::numeric_limits<double>::infinity()) : tmax;
        if (auto t = intersect_triangle(ray, tri.v0, tri.v1, tri.v2, tmin, limit)) {
          if (!found || closer(*t, id, best)) {
            best = {*t, id};
            found = true;
          }
        }
      }
      continue;
    }
    const double limit = found ? best.t : tmax;
    const auto tl = hit_box(nodes_[n.first].box, ray, tmin, limit);
    const auto tr = hit_box(nodes_[n.right].box, ray, tmin, limit);
    if (tl && tr) {
      // Push the farther child first so the nearer one is visited next.
      if (*tl <= *tr) {
        stack[top++] = n.right;
        stack[top++] = n.first;
      } else {
        stack[top++] = n.first;
        stack[top++] = n.right;
      }
    } else if (tl) {
      stack[top++] = n.first;
    } else if (tr) {
      stack[top++] = n.right;
    }
  }
  if (!found) return std::nullopt;
  return best;
}

bool Bvh::any_hit(std::span<const TriangleCorners> triangles, const Ray& ray, double tmin, double tmax) const {
  if (nodes_.empty()) return false;
  std::array<std::uint32_t, 192> stack{};
  int top = 0;
  stack[top++] = 0;
  while (top > 0) {
    const Node& n = nodes_[stack[--top]];
    if (!hit_box(n.box, ray, tmin, tmax)) continue;
    if (n.count > 0) {
      for (std::uint32_t i = n.first; i < n.first + n.count; ++i) {
        const auto& tri = triangles[prims_[i]];
        if (intersect_triangle(ray, tri.v0, tri.v1, tri.v2, tmin, tmax)) return true;
      }
      continue;
    }
    stack[top++] = n.first;
    stack[top++] = n.right;
  }
  return false;
}

}  // namespace sonotrace::scene
