// SPDX-FileCopyrightText: Copyright (c) 2026 The SonoTrace Authors
// SPDX-License-Identifier: Apache-2.0

#include "acoustics/components.hpp"

#include <algorithm>
#include <cmath>

#include "acoustics/losses.hpp"
#include "common/error.hpp"
#include "common/parallel.hpp"
#include "common/rng.hpp"

namespace sonotrace::acoustics {

namespace {

constexpr std::size_t kPointsPerTask = 2048;

// Per-task output block; blocks are concatenated in task order.
struct Block {
  std::vector<Contribution> items;
  std::vector<double> magnitudes;
};

void concat(ContributionSet& out, std::vector<Block>& blocks) {
  std::size_t n = out.items.size();
  for (const auto& b : blocks) n += b.items.size();
  out.items.reserve(n);
  out.magnitudes.reserve(n * out.bins);
  for (auto& b : blocks) {
    out.items.insert(out.items.end(), b.items.begin(), b.items.end());
    out.magnitudes.insert(out.magnitudes.end(), b.magnitudes.begin(), b.magnitudes.end());
    b = {};
  }
}

void check_revision(const scene::Scene& scene, std::uint64_t revision, const char* what) {
  if (revision != scene.revision()) {
    fail(ErrorCode::RevisionMismatch, std::string(what) + " were produced for scene revision " +
                                          std::to_string(revision) + ", scene is at " +
                                          std::to_string(scene.revision()));
  }
}

}  // namespace

ContributionSet empty_contributions(const scene::Scene& scene) {
  ContributionSet set;
  set.revision = scene.revision();
  set.sources = static_cast<std::uint32_t>(scene.emitters().size());
  set.receivers = static_cast<std::uint32_t>(scene.receivers().size());
  set.bins = static_cast<std::uint32_t>(scene.bin_count());
  set.speed_of_sound = scene.speed_of_sound();
  set.frequencies.assign(scene.frequencies().begin(), scene.frequencies().end());
  return set;
}

ContributionSet specular_magnitudes(const scene::Scene& scene, const tracer::HitBuffer& hits,
                                    const preproc::CurvatureTable& curvature, unsigned workers) {
  check_revision(scene, hits.revision, "hit records");
  if (curvature.triangle_count() != scene.triangle_count() || curvature.bins != scene.bin_count()) {
    fail(ErrorCode::InvalidArgument, "curvature table does not match the scene");
  }
  ContributionSet out = empty_contributions(scene);
  out.specular_points = hits.records.size();
  const std::size_t bins = out.bins;
  const auto alpha = scene.attenuation();
  const auto& emitter = scene.emitters().at(hits.emitter);
  const auto directions = tracer::emitter_directions(emitter);

  const std::size_t receivers = scene.receivers().size();
  const std::size_t chunks = (hits.records.size() + kPointsPerTask - 1) / kPointsPerTask;
  std::vector<Block> blocks(receivers * chunks);

  parallel_for(blocks.size(), workers, [&](std::size_t task) {
    const std::size_t m = task / chunks;
    const std::size_t chunk = task % chunks;
    const Vec3 rx = scene.receivers()[m].pose.position;
    Block& block = blocks[task];
    const std::size_t end = std::min(hits.records.size(), (chunk + 1) * kPointsPerTask);
    for (std::size_t n = chunk * kPointsPerTask; n < end; ++n) {
      const auto& hit = hits.records[n];
      if (!scene.line_of_sight(hit.position, rx)) continue;
      const Vec3 to_rx = rx - hit.position;
      const double leg = norm(to_rx);
      const double r = hit.path_length + leg;
      const double gamma = angle_between(hit.reflection, to_rx);
      const double spread = geometric_loss(r);

      Contribution c;
      c.kind = ContributionKind::Specular;
      c.source = hits.emitter;
      c.receiver = static_cast<std::uint32_t>(m);
      c.index = static_cast<std::uint32_t>(n);
      c.position = hit.position;
      c.path_length = r;
      c.departure = directions[hit.ray];
      block.items.push_back(c);
      for (std::size_t f = 0; f < bins; ++f) {
        const double beta = curvature.beta_at(hit.triangle, f);
        const double k = curvature.k_at(hit.triangle, f);
        block.magnitudes.push_back(spread * atmospheric_loss(r, alpha[f]) * specular_intensity(gamma, beta, k));
      }
    }
  });
  concat(out, blocks);
  return out;
}

bool instance_in_frustum(const scene::MeshInstance& instance, const scene::Emitter& emitter) {
  if (emitter.frustum_half_angle >= std::numbers::pi) return true;
  const Aabb box = instance.world.bounds();
  const Vec3 center = box.center();
  const double radius = 0.5 * norm(box.extent());
  const Vec3 v = center - emitter.pose.position;
  const double d = norm(v);
  if (d <= radius) return true;
  const Vec3 axis = emitter.pose.orientation.rotate({0.0, 0.0, 1.0});
  return angle_between(axis, v) <= emitter.frustum_half_angle + std::asin(std::min(1.0, radius / d));
}

CandidateSet sample_diffraction_candidates(const scene::Scene& scene, const preproc::CurvatureTable& curvature,
                                           std::uint32_t emitter_index, std::uint32_t count, std::uint64_t seed) {
  const auto& emitter = scene.emitters().at(emitter_index);
  CandidateSet out;
  out.revision = scene.revision();
  out.emitter = emitter_index;
  if (count == 0) return out;

  bool any_weight = false;
  bool any_in_frustum = false;
  for (std::uint32_t i = 0; i < scene.instances().size(); ++i) {
    const auto& inst = scene.instances()[i];
    if (!instance_in_frustum(inst, emitter)) continue;
    any_in_frustum = true;

    const std::size_t nt = inst.world.triangle_count();
    double sum = 0.0;
    std::size_t usable = 0;
    for (std::size_t t = 0; t < nt; ++t) {
      if (inst.world.is_degenerate(t)) continue;
      sum += curvature.metric[inst.first_triangle + t];
      ++usable;
    }
    if (!(sum > 0.0)) continue;
    any_weight = true;

    Rng rng(derive_seed(seed, emitter_index, i));
    const double dither = 1e-3 * sum / static_cast<double>(usable);
    std::vector<double> cdf(nt);
    double acc = 0.0;
    for (std::size_t t = 0; t < nt; ++t) {
      // Drawn for every triangle so the stream layout is fixed per mesh.
      const double u = rng.uniform();
      if (!inst.world.is_degenerate(t)) acc += curvature.metric[inst.first_triangle + t] + u * dither;
      cdf[t] = acc;
    }
    for (std::uint32_t s = 0; s < count; ++s) {
      const double target = rng.uniform() * acc;
      auto it = std::upper_bound(cdf.begin(), cdf.end(), target);
      if (it == cdf.end()) --it;
      const auto t = static_cast<std::size_t>(it - cdf.begin());
      const double r1 = rng.uniform();
      const double r2 = rng.uniform();
      const double sq = std::sqrt(r1);
      const Vec3 p = inst.world.corner(t, 0) * (1.0 - sq) + inst.world.corner(t, 1) * (sq * (1.0 - r2)) +
                     inst.world.corner(t, 2) * (sq * r2);
      out.points.push_back({p, static_cast<std::uint32_t>(inst.first_triangle + t), i});
    }
  }
  if (any_in_frustum && !any_weight) {
    warn("emitter '" + emitter.id + "': every triangle in the frustum has zero curvature metric; no diffraction");
  }
  return out;
}

CandidateSet filter_diffraction_candidates(const scene::Scene& scene, const CandidateSet& candidates,
                                           double max_incidence, unsigned workers) {
  check_revision(scene, candidates.revision, "diffraction candidates");
  const Vec3 source = scene.emitters().at(candidates.emitter).pose.position;
  std::vector<std::uint8_t> keep(candidates.points.size(), 0);
  const std::size_t tasks = (keep.size() + kPointsPerTask - 1) / kPointsPerTask;
  parallel_for(tasks, workers, [&](std::size_t task) {
    const std::size_t end = std::min(keep.size(), (task + 1) * kPointsPerTask);
    for (std::size_t i = task * kPointsPerTask; i < end; ++i) {
      const auto& c = candidates.points[i];
      const Vec3 to_source = source - c.position;
      if (norm(to_source) == 0.0) continue;
      if (angle_between(scene.triangle_normal(c.triangle), to_source) > max_incidence) continue;
      keep[i] = scene.line_of_sight(c.position, source) ? 1 : 0;
    }
  });
  CandidateSet out;
  out.revision = candidates.revision;
  out.emitter = candidates.emitter;
  for (std::size_t i = 0; i < keep.size(); ++i) {
    if (keep[i]) out.points.push_back(candidates.points[i]);
  }
  return out;
}

ContributionSet diffraction_magnitudes(const scene::Scene& scene, const CandidateSet& candidates, unsigned workers) {
  check_revision(scene, candidates.revision, "diffraction candidates");
  ContributionSet out = empty_contributions(scene);
  out.diffraction_points = candidates.points.size();
  const std::size_t bins = out.bins;
  const auto alpha = scene.attenuation();
  const Vec3 source = scene.emitters().at(candidates.emitter).pose.position;

  const std::size_t receivers = scene.receivers().size();
  const std::size_t chunks = (candidates.points.size() + kPointsPerTask - 1) / kPointsPerTask;
  std::vector<Block> blocks(receivers * chunks);
  parallel_for(blocks.size(), workers, [&](std::size_t task) {
    const std::size_t m = task / chunks;
    const std::size_t chunk = task % chunks;
    const Vec3 rx = scene.receivers()[m].pose.position;
    Block& block = blocks[task];
    const std::size_t end = std::min(candidates.points.size(), (chunk + 1) * kPointsPerTask);
    for (std::size_t o = chunk * kPointsPerTask; o < end; ++o) {
      const auto& cand = candidates.points[o];
      if (!scene.line_of_sight(cand.position, rx)) continue;
      const double r = distance(source, cand.position) + distance(cand.position, rx);
      const double spread = geometric_loss(r);
      const auto& material = scene.triangle_material(cand.triangle);

      Contribution c;
      c.kind = ContributionKind::Diffraction;
      c.source = candidates.emitter;
      c.receiver = static_cast<std::uint32_t>(m);
      c.index = static_cast<std::uint32_t>(o);
      c.position = cand.position;
      c.path_length = r;
      c.departure = normalized(cand.position - source);
      block.items.push_back(c);
      for (std::size_t f = 0; f < bins; ++f) {
        block.magnitudes.push_back(spread * atmospheric_loss(r, alpha[f]) * material.diffraction[f]);
      }
    }
  });
  concat(out, blocks);
  return out;
}

ContributionSet passive_magnitudes(const scene::Scene& scene) {
  ContributionSet out = empty_contributions(scene);
  const std::size_t bins = out.bins;
  const auto alpha = scene.attenuation();
  for (std::uint32_t s = 0; s < scene.emitters().size(); ++s) {
    const auto& emitter = scene.emitters()[s];
    for (std::uint32_t m = 0; m < scene.receivers().size(); ++m) {
      const Vec3 rx = scene.receivers()[m].pose.position;
      const double r = distance(emitter.pose.position, rx);
      if (r <= scene.epsilon()) {
        warn("emitter '" + emitter.id + "' and receiver '" + scene.receivers()[m].id +
             "' are co-located; direct path skipped");
        continue;
      }
      if (!scene.line_of_sight(emitter.pose.position, rx)) continue;
      const double spread = geometric_loss(r);
      Contribution c;
      c.kind = ContributionKind::Passive;
      c.source = s;
      c.receiver = m;
      c.index = 0;
      c.position = rx;
      c.path_length = r;
      c.departure = normalized(rx - emitter.pose.position);
      out.items.push_back(c);
      for (std::size_t f = 0; f < bins; ++f) {
        out.magnitudes.push_back(spread * atmospheric_loss(r, alpha[f]) * emitter.source_level[f]);
      }
    }
  }
  return out;
}

}  // namespace sonotrace::acoustics
