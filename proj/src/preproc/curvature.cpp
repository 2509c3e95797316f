// SPDX-FileCopyrightText: Copyright (c) 2026 The SonoTrace Authors
// SPDX-License-Identifier: Apache-2.0

#include "preproc/curvature.hpp"

#include <algorithm>
#include <cmath>

#include "common/error.hpp"
#include "common/parallel.hpp"

namespace sonotrace::preproc {

using scene::TriangleMesh;

std::vector<double> vertex_mean_curvature(const TriangleMesh& mesh) {
  const std::size_t nv = mesh.vertex_count();
  std::vector<Vec3> laplace(nv);
  std::vector<double> mixed_area(nv, 0.0);
  std::vector<std::uint8_t> used(nv, 0);

  for (std::size_t t = 0; t < mesh.triangle_count(); ++t) {
    if (mesh.is_degenerate(t)) continue;
    const auto& tri = mesh.triangles()[t];
    const Vec3 p[3] = {mesh.corner(t, 0), mesh.corner(t, 1), mesh.corner(t, 2)};
    const double area = mesh.areas()[t];

    double cot[3];
    bool obtuse_at[3];
    for (int i = 0; i < 3; ++i) {
      const Vec3 a = p[(i + 1) % 3] - p[i];
      const Vec3 b = p[(i + 2) % 3] - p[i];
      cot[i] = dot(a, b) / norm(cross(a, b));
      obtuse_at[i] = dot(a, b) < 0.0;
    }
    const bool obtuse = obtuse_at[0] || obtuse_at[1] || obtuse_at[2];

    for (int i = 0; i < 3; ++i) {
      const int j = (i + 1) % 3;
      const int k = (i + 2) % 3;
      // Edge (j, k) is opposite corner i and carries cot of the angle at i.
      const Vec3 ejk = p[j] - p[k];
      laplace[tri[j]] += cot[i] * ejk;
      laplace[tri[k]] -= cot[i] * ejk;

      double a_mixed;
      if (!obtuse) {
        const double lij = dot(p[j] - p[i], p[j] - p[i]);
        const double lik = dot(p[k] - p[i], p[k] - p[i]);
        a_mixed = (lij * cot[k] + lik * cot[j]) / 8.0;
      } else {
        a_mixed = obtuse_at[i] ? area / 2.0 : area / 4.0;
      }
      mixed_area[tri[i]] += a_mixed;
      used[tri[i]] = 1;
    }
  }

  std::vector<double> g(nv, 0.0);
  std::size_t isolated = 0;
  for (std::size_t v = 0; v < nv; ++v) {
    if (!used[v] || mixed_area[v] <= 0.0) {
      ++isolated;
      continue;
    }
    // K_v = laplace / (2 A_mixed); G_v = |K_v| / 2.
    g[v] = 0.5 * norm(laplace[v] / (2.0 * mixed_area[v]));
  }
  if (isolated > 0) {
    warn(std::to_string(isolated) + " isolated vertices (no usable triangle); mean curvature set to 0");
  }
  return g;
}

double area_weight(double area, double area_ref) { return std::min(area / area_ref, 1.0); }

double median_triangle_area(const TriangleMesh& mesh) {
  std::vector<double> areas;
  areas.reserve(mesh.triangle_count());
  for (std::size_t t = 0; t < mesh.triangle_count(); ++t) {
    if (!mesh.is_degenerate(t)) areas.push_back(mesh.areas()[t]);
  }
  if (areas.empty()) return 0.0;
  const auto mid = areas.begin() + static_cast<std::ptrdiff_t>(areas.size() / 2);
  std::nth_element(areas.begin(), mid, areas.end());
  if (areas.size() % 2 == 1) return *mid;
  const double upper = *mid;
  const double lower = *std::max_element(areas.begin(), mid);
  return 0.5 * (lower + upper);
}

TriangleMetric triangle_curvature_metric(const TriangleMesh& mesh, std::span<const double> g,
                                         const scene::MaterialSpec& material) {
  if (g.size() != mesh.vertex_count()) fail(ErrorCode::InvalidArgument, "curvature array does not match mesh");
  const double area_ref = material.area_ref.value_or(median_triangle_area(mesh));
  const std::size_t nt = mesh.triangle_count();
  TriangleMetric out;
  out.metric.assign(nt, 0.0);
  out.variation.assign(nt, 0.0);
  out.g_min.assign(nt, 0.0);
  out.g_max.assign(nt, 0.0);
  out.area_weight.assign(nt, 0.0);
  for (std::size_t t = 0; t < nt; ++t) {
    const auto& tri = mesh.triangles()[t];
    const double lo = std::min({g[tri[0]], g[tri[1]], g[tri[2]]});
    const double hi = std::max({g[tri[0]], g[tri[1]], g[tri[2]]});
    out.g_min[t] = lo;
    out.g_max[t] = hi;
    out.variation[t] = hi - lo;
    if (mesh.is_degenerate(t) || !(area_ref > 0.0)) continue;
    out.area_weight[t] = area_weight(mesh.areas()[t], area_ref);
    out.metric[t] = material.eta * out.area_weight[t] * out.variation[t];
  }
  return out;
}

BrdfParams map_brdf(double metric, const scene::MaterialSpec& material, std::size_t bin) {
  const double t = std::clamp(metric / material.c_sat, 0.0, 1.0);
  return {(1.0 - t) * material.beta_smooth[bin] + t * material.beta_edge[bin],
          (1.0 - t) * material.k_smooth[bin] + t * material.k_edge[bin]};
}

CurvatureTable preprocess_scene(const scene::Scene& scene, unsigned workers) {
  CurvatureTable table;
  const std::size_t nt = scene.triangle_count();
  const std::size_t bins = scene.bin_count();
  table.bins = static_cast<std::uint32_t>(bins);
  table.metric.resize(nt);
  table.variation.resize(nt);
  table.g_min.resize(nt);
  table.g_max.resize(nt);
  table.area.resize(nt);
  table.area_weight.resize(nt);
  table.beta.resize(nt * bins);
  table.k.resize(nt * bins);

  const auto& instances = scene.instances();
  parallel_for(instances.size(), workers, [&](std::size_t i) {
    const auto& inst = instances[i];
    const auto& material = scene.materials()[inst.material];
    const scene::TriangleMesh local = inst.source->transformed(Pose{}, inst.scale);
    const auto g = vertex_mean_curvature(local);
    const auto m = triangle_curvature_metric(local, g, material);
    for (std::size_t t = 0; t < inst.world.triangle_count(); ++t) {
      const std::size_t id = inst.first_triangle + t;
      table.metric[id] = m.metric[t];
      table.variation[id] = m.variation[t];
      table.g_min[id] = m.g_min[t];
      table.g_max[id] = m.g_max[t];
      table.area[id] = local.areas()[t];
      table.area_weight[id] = m.area_weight[t];
      for (std::size_t f = 0; f < bins; ++f) {
        const auto p = map_brdf(m.metric[t], material, f);
        table.beta[id * bins + f] = p.beta;
        table.k[id * bins + f] = p.k;
      }
    }
  });
  return table;
}

std::uint64_t estimate_footprint(std::uint64_t triangles, std::uint64_t bins) {
  if (bins == 0) fail(ErrorCode::InvalidArgument, "footprint needs at least one frequency bin");
  std::uint64_t per = 0;
  std::uint64_t body = 0;
  std::uint64_t total = 0;
  if (__builtin_add_overflow(bins, std::uint64_t{12}, &per) || __builtin_mul_overflow(per, std::uint64_t{8}, &per) ||
      __builtin_mul_overflow(per, triangles, &body) || __builtin_add_overflow(body, std::uint64_t{128}, &total)) {
    fail(ErrorCode::Overflow, "footprint exceeds 64-bit byte count");
  }
  return total;
}

}  // namespace sonotrace::preproc
