// SPDX-FileCopyrightText: Copyright (c) 2026 The SonoTrace Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "scene/mesh.hpp"
#include "scene/scene.hpp"

namespace sonotrace::preproc {

// Scalar mean curvature G_v = |K_v| / 2 per vertex (1/m), where K_v is the
// cotangent-weighted mean-curvature normal over the mixed Voronoi area of
// the vertex's one-ring. Degenerate triangles are skipped; boundary
// vertices use their partial ring. Vertices in no usable triangle get 0 and
// a warning.
std::vector<double> vertex_mean_curvature(const scene::TriangleMesh& mesh);

struct TriangleMetric {
  std::vector<double> metric;     // C_i
  std::vector<double> variation;  // max G_v - min G_v over the corners
  std::vector<double> g_min;
  std::vector<double> g_max;
  std::vector<double> area_weight;
};

// Piecewise-linear area weight min(A / A_ref, 1).
double area_weight(double area, double area_ref);

// Median area of the non-degenerate triangles (0 if none).
double median_triangle_area(const scene::TriangleMesh& mesh);

// C_i = eta * w(A_i) * (max G_v - min G_v) per triangle; degenerate
// triangles get C_i = 0.
TriangleMetric triangle_curvature_metric(const scene::TriangleMesh& mesh, std::span<const double> vertex_curvature,
                                         const scene::MaterialSpec& material);

struct BrdfParams {
  double beta;
  double k;
};

// Saturated linear blend between the material's smooth and edge endpoints
// with t = min(C / c_sat, 1).
BrdfParams map_brdf(double metric, const scene::MaterialSpec& material, std::size_t bin);

// Per-world-triangle curvature data and per-(triangle, bin) BRDF tables.
// beta/k are row-major by triangle; the cache file stores them as 32-bit
// floats.
struct CurvatureTable {
  std::uint32_t bins = 0;
  std::vector<double> metric;
  std::vector<double> variation;
  std::vector<double> g_min;
  std::vector<double> g_max;
  std::vector<double> area;
  std::vector<double> area_weight;
  std::vector<double> beta;
  std::vector<double> k;

  std::size_t triangle_count() const { return metric.size(); }
  double beta_at(std::size_t tri, std::size_t bin) const { return beta[tri * bins + bin]; }
  double k_at(std::size_t tri, std::size_t bin) const { return k[tri * bins + bin]; }
};

// Runs curvature, metric and BRDF mapping for every instance of the scene,
// on the instance's scaled source mesh (curvature does not depend on pose).
// Results do not depend on `workers`.
CurvatureTable preprocess_scene(const scene::Scene& scene, unsigned workers = 0);

// 128 + 8 * T * (12 + F) bytes. Throws Error(Overflow) rather than wrapping;
// Error(InvalidArgument) for F = 0.
std::uint64_t estimate_footprint(std::uint64_t triangles, std::uint64_t bins);

}  // namespace sonotrace::preproc
