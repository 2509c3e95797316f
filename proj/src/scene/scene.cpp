// SPDX-FileCopyrightText: Copyright (c) 2026 The SonoTrace Authors
// SPDX-License-Identifier: Apache-2.0

#include "scene/scene.hpp"

#include <algorithm>
#include <atomic>
#include <limits>
#include <numbers>
#include <numeric>
#include <set>

#include "common/error.hpp"

namespace sonotrace::scene {

namespace {

std::uint64_t next_revision() {
  static std::atomic<std::uint64_t> counter{0};
  return ++counter;
}

void check_bins(const std::vector<double>& values, std::size_t bins, const std::string& what) {
  if (values.size() != bins) {
    fail(ErrorCode::InvalidConfig,
         what + " has " + std::to_string(values.size()) + " values, expected " + std::to_string(bins));
  }
}

void check_range(const std::vector<double>& values, double lo, bool lo_open, double hi, const std::string& what) {
  for (double v : values) {
    const bool ok = std::isfinite(v) && (lo_open ? v > lo : v >= lo) && v <= hi;
    if (!ok) fail(ErrorCode::InvalidConfig, what + " value " + std::to_string(v) + " out of range");
  }
}

void check_pose(const Pose& pose, const std::string& who) {
  if (!pose.valid()) fail(ErrorCode::InvalidConfig, who + ": orientation quaternion is not unit-norm");
}

}  // namespace

Quat rotation_from_boresight(const Vec3& direction) {
  const Vec3 z{0.0, 0.0, 1.0};
  const Vec3 d = normalized(direction);
  const double c = dot(z, d);
  if (c > 1.0 - 1e-15) return {};
  if (c < -1.0 + 1e-15) return {0.0, 1.0, 0.0, 0.0};  // half turn about X
  const Vec3 axis = cross(z, d);
  return Quat::from_axis_angle(axis, std::acos(std::clamp(c, -1.0, 1.0)));
}

Scene Scene::build(SceneDescription d) {
  Scene s;
  const std::size_t bins = d.frequencies.size();
  if (bins == 0) fail(ErrorCode::InvalidFrequencyGrid, "frequency grid is empty");
  for (std::size_t i = 0; i < bins; ++i) {
    if (!(d.frequencies[i] > 0.0) || !std::isfinite(d.frequencies[i])) {
      fail(ErrorCode::InvalidFrequencyGrid, "frequency bins must be positive");
    }
    if (i > 0 && !(d.frequencies[i] > d.frequencies[i - 1])) {
      fail(ErrorCode::InvalidFrequencyGrid, "frequency bins must be strictly increasing");
    }
  }
  if (!(d.speed_of_sound > 0.0) || !std::isfinite(d.speed_of_sound)) {
    fail(ErrorCode::InvalidConfig, "speed of sound must be positive");
  }
  if (d.attenuation.empty()) d.attenuation.assign(bins, 0.0);
  check_bins(d.attenuation, bins, "attenuation");
  check_range(d.attenuation, 0.0, false, std::numeric_limits<double>::max(), "attenuation");

  std::set<std::string> ids;
  auto claim_id = [&](const std::string& id, const std::string& what) {
    if (id.empty()) fail(ErrorCode::InvalidConfig, what + " needs an id");
    if (!ids.insert(what + ":" + id).second) fail(ErrorCode::InvalidConfig, "duplicate " + what + " id '" + id + "'");
  };

  std::set<std::string> material_ids;
  for (const auto& m : d.materials) {
    if (!material_ids.insert(m.id).second) fail(ErrorCode::InvalidConfig, "duplicate material id '" + m.id + "'");
    const std::string who = "material '" + m.id + "' ";
    check_bins(m.beta_smooth, bins, who + "beta_smooth");
    check_bins(m.beta_edge, bins, who + "beta_edge");
    check_bins(m.k_smooth, bins, who + "k_smooth");
    check_bins(m.k_edge, bins, who + "k_edge");
    check_bins(m.diffraction, bins, who + "diffraction");
    check_range(m.beta_smooth, 0.0, true, std::numbers::pi, who + "beta_smooth");
    check_range(m.beta_edge, 0.0, true, std::numbers::pi, who + "beta_edge");
    check_range(m.k_smooth, 0.0, false, 1.0, who + "k_smooth");
    check_range(m.k_edge, 0.0, false, 1.0, who + "k_edge");
    check_range(m.diffraction, 0.0, false, std::numeric_limits<double>::max(), who + "diffraction");
    if (!(m.eta > 0.0)) fail(ErrorCode::InvalidConfig, who + "eta must be positive");
    if (!(m.c_sat > 0.0)) fail(ErrorCode::InvalidConfig, who + "c_sat must be positive");
    if (m.area_ref && !(*m.area_ref > 0.0)) fail(ErrorCode::InvalidConfig, who + "area_ref must be positive");
  }

  s.revision_ = next_revision();
  s.frequencies_ = std::move(d.frequencies);
  s.speed_of_sound_ = d.speed_of_sound;
  s.attenuation_ = std::move(d.attenuation);
  s.materials_ = std::move(d.materials);

  std::uint32_t offset = 0;
  for (auto& inst : d.instances) {
    claim_id(inst.id, "instance");
    if (!inst.mesh) fail(ErrorCode::MissingMesh, "instance '" + inst.id + "' has no mesh");
    check_pose(inst.pose, "instance '" + inst.id + "'");
    if (!(inst.scale > 0.0)) fail(ErrorCode::InvalidConfig, "instance '" + inst.id + "': scale must be positive");
    const auto mat = std::find_if(s.materials_.begin(), s.materials_.end(),
                                  [&](const MaterialSpec& m) { return m.id == inst.material; });
    if (mat == s.materials_.end()) {
      fail(ErrorCode::UnknownMaterial, "instance '" + inst.id + "' references unknown material '" + inst.material + "'");
    }
    MeshInstance mi;
    mi.id = inst.id;
    mi.mesh_id = inst.mesh_id;
    mi.source = inst.mesh;
    mi.pose = inst.pose;
    mi.scale = inst.scale;
    mi.material = static_cast<std::uint32_t>(mat - s.materials_.begin());
    mi.world = inst.mesh->transformed(inst.pose, inst.scale);
    mi.first_triangle = offset;
    offset += static_cast<std::uint32_t>(mi.world.triangle_count());
    s.instances_.push_back(std::move(mi));
  }

  for (auto& e : d.emitters) {
    claim_id(e.id, "emitter");
    const std::string who = "emitter '" + e.id + "'";
    check_pose(e.pose, who);
    if (e.rays < 1) fail(ErrorCode::InvalidConfig, who + ": needs at least one ray");
    if (!(e.max_distance > 0.0)) fail(ErrorCode::InvalidConfig, who + ": max_distance must be positive");
    if (!(e.frustum_half_angle > 0.0 && e.frustum_half_angle <= std::numbers::pi)) {
      fail(ErrorCode::InvalidConfig, who + ": frustum_half_angle must be in (0, pi]");
    }
    if (!(e.max_incidence >= 0.0 && e.max_incidence <= std::numbers::pi)) {
      fail(ErrorCode::InvalidConfig, who + ": max_incidence must be in [0, pi]");
    }
    if (e.source_level.empty()) e.source_level.assign(bins, 1.0);
    check_bins(e.source_level, bins, who + " source_level");
    check_range(e.source_level, 0.0, false, std::numeric_limits<double>::max(), who + " source_level");
  }
  for (const auto& r : d.receivers) {
    claim_id(r.id, "receiver");
    check_pose(r.pose, "receiver '" + r.id + "'");
  }
  // Entity ids share one namespace for pose updates.
  std::set<std::string> all;
  for (const auto& i : s.instances_) all.insert(i.id);
  for (const auto& e : d.emitters) {
    if (!all.insert(e.id).second) fail(ErrorCode::InvalidConfig, "id '" + e.id + "' is used by two entities");
  }
  for (const auto& r : d.receivers) {
    if (!all.insert(r.id).second) fail(ErrorCode::InvalidConfig, "id '" + r.id + "' is used by two entities");
  }
  s.emitters_ = std::move(d.emitters);
  s.receivers_ = std::move(d.receivers);

  s.rebuild_world_arrays();
  s.bvh_ = Bvh(s.corners_);
  s.update_extent();
  return s;
}

void Scene::rebuild_world_arrays() {
  std::size_t total = 0;
  for (const auto& inst : instances_) total += inst.world.triangle_count();
  corners_.resize(total);
  normals_.resize(total);
  areas_.resize(total);
  triangle_instance_.resize(total);
  for (std::uint32_t i = 0; i < instances_.size(); ++i) {
    const auto& inst = instances_[i];
    for (std::size_t t = 0; t < inst.world.triangle_count(); ++t) {
      const std::size_t id = inst.first_triangle + t;
      corners_[id] = {inst.world.corner(t, 0), inst.world.corner(t, 1), inst.world.corner(t, 2)};
      normals_[id] = inst.world.normals()[t];
      areas_[id] = inst.world.areas()[t];
      triangle_instance_[id] = i;
    }
  }
}

void Scene::update_extent() {
  Vec3 sum;
  std::size_t count = 0;
  const auto visit = [&](const auto& f) {
    for (const auto& inst : instances_) {
      for (const auto& v : inst.world.vertices()) f(v);
    }
    for (const auto& e : emitters_) f(e.pose.position);
    for (const auto& r : receivers_) f(r.pose.position);
  };
  visit([&](const Vec3& p) {
    sum += p;
    ++count;
  });
  double radius = 0.0;
  if (count > 0) {
    const Vec3 centroid = sum / static_cast<double>(count);
    visit([&](const Vec3& p) { radius = std::max(radius, distance(p, centroid)); });
  }
  diameter_ = 2.0 * radius;
  epsilon_ = diameter_ > 0.0 ? 1e-6 * diameter_ : 1e-9;
}

double Scene::total_area() const { return std::accumulate(areas_.begin(), areas_.end(), 0.0); }

bool Scene::line_of_sight(const Vec3& a, const Vec3& b) const {
  const Vec3 d = b - a;
  const double len = norm(d);
  if (len <= 2.0 * epsilon_) return true;
  const Ray ray{a, d / len};
  return !bvh_.any_hit(corners_, ray, epsilon_, len - epsilon_);
}

std::optional<EntityRef> Scene::find_entity(std::string_view id) const {
  for (std::size_t i = 0; i < instances_.size(); ++i) {
    if (instances_[i].id == id) return EntityRef{EntityKind::Instance, i};
  }
  for (std::size_t i = 0; i < emitters_.size(); ++i) {
    if (emitters_[i].id == id) return EntityRef{EntityKind::Emitter, i};
  }
  for (std::size_t i = 0; i < receivers_.size(); ++i) {
    if (receivers_[i].id == id) return EntityRef{EntityKind::Receiver, i};
  }
  return std::nullopt;
}

Pose Scene::entity_pose(const EntityRef& ref) const {
  switch (ref.kind) {
    case EntityKind::Instance: return instances_.at(ref.index).pose;
    case EntityKind::Emitter: return emitters_.at(ref.index).pose;
    case EntityKind::Receiver: return receivers_.at(ref.index).pose;
  }
  return {};
}

Scene Scene::with_pose(std::string_view entity, const Pose& pose) const {
  const auto ref = find_entity(entity);
  if (!ref) fail(ErrorCode::UnknownEntity, "no entity with id '" + std::string(entity) + "'");
  if (!pose.valid()) fail(ErrorCode::InvalidArgument, "orientation quaternion is not unit-norm");
  Scene next = *this;
  next.revision_ = next_revision();
  switch (ref->kind) {
    case EntityKind::Instance: {
      auto& inst = next.instances_[ref->index];
      inst.pose = pose;
      inst.world = inst.source->transformed(pose, inst.scale);
      for (std::size_t t = 0; t < inst.world.triangle_count(); ++t) {
        const std::size_t id = inst.first_triangle + t;
        next.corners_[id] = {inst.world.corner(t, 0), inst.world.corner(t, 1), inst.world.corner(t, 2)};
        next.normals_[id] = inst.world.normals()[t];
        next.areas_[id] = inst.world.areas()[t];
      }
      next.bvh_.refit(next.corners_);
      break;
    }
    case EntityKind::Emitter: next.emitters_[ref->index].pose = pose; break;
    case EntityKind::Receiver: next.receivers_[ref->index].pose = pose; break;
  }
  next.update_extent();
  return next;
}

}  // namespace sonotrace::scene
