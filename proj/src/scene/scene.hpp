// SPDX-FileCopyrightText: Copyright (c) 2026 The SonoTrace Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "common/math.hpp"
#include "scene/bvh.hpp"
#include "scene/mesh.hpp"

namespace sonotrace::scene {

inline constexpr double kDefaultSpeedOfSound = 343.0;

// Acoustic surface profile. Per-bin vectors all have the scene's bin count.
struct MaterialSpec {
  std::string id;
  double eta = 1.0;                  // curvature scaling
  std::optional<double> area_ref;    // m^2; unset = median triangle area of the instance
  double c_sat = 1.0;                // metric value at which (beta, k) reach the edge endpoints
  std::vector<double> beta_smooth;   // rad
  std::vector<double> beta_edge;     // rad
  std::vector<double> k_smooth;      // [0, 1]
  std::vector<double> k_edge;        // [0, 1]
  std::vector<double> diffraction;   // I_d >= 0
};

// Ray directions are generated around +Z of the emitter frame (boresight).
struct Emitter {
  std::string id;
  Pose pose;
  std::uint32_t rays = 10000;
  std::uint32_t max_bounces = 2;     // extra bounces after the first hit
  double max_distance = 10.0;        // m
  double frustum_half_angle = 1.5707963267948966;
  std::vector<double> source_level;  // I_p per bin
  std::uint32_t diffraction_candidates = 256;  // per mesh instance
  double max_incidence = 1.5707963267948966;
};

struct Receiver {
  std::string id;
  Pose pose;
};

struct InstanceDescription {
  std::string id;
  std::string mesh_id;
  std::shared_ptr<const TriangleMesh> mesh;
  Pose pose;
  double scale = 1.0;
  std::string material;
};

struct SceneDescription {
  std::vector<double> frequencies;   // Hz, strictly increasing
  double speed_of_sound = kDefaultSpeedOfSound;
  std::vector<double> attenuation;   // dB/m per bin; empty = lossless
  std::vector<MaterialSpec> materials;
  std::vector<InstanceDescription> instances;
  std::vector<Emitter> emitters;
  std::vector<Receiver> receivers;
};

struct MeshInstance {
  std::string id;
  std::string mesh_id;
  std::shared_ptr<const TriangleMesh> source;  // shared between instances
  Pose pose;
  double scale = 1.0;
  std::uint32_t material = 0;
  TriangleMesh world;                          // source transformed by (scale, pose)
  std::uint32_t first_triangle = 0;            // offset into the scene's triangle ids
};

enum class EntityKind { Instance, Emitter, Receiver };

struct EntityRef {
  EntityKind kind;
  std::size_t index;
};

// World-space scene. Immutable; pose edits produce a new revision through
// with_pose(), which re-applies one transform and refits the BVH.
class Scene {
 public:
  // Validates and builds. Errors: InvalidFrequencyGrid, UnknownMaterial,
  // InvalidConfig.
  static Scene build(SceneDescription description);

  std::uint64_t revision() const { return revision_; }

  std::span<const double> frequencies() const { return frequencies_; }
  std::size_t bin_count() const { return frequencies_.size(); }
  double speed_of_sound() const { return speed_of_sound_; }
  std::span<const double> attenuation() const { return attenuation_; }

  const std::vector<MaterialSpec>& materials() const { return materials_; }
  const std::vector<MeshInstance>& instances() const { return instances_; }
  const std::vector<Emitter>& emitters() const { return emitters_; }
  const std::vector<Receiver>& receivers() const { return receivers_; }

  std::size_t triangle_count() const { return corners_.size(); }
  std::span<const TriangleCorners> corners() const { return corners_; }
  std::uint32_t triangle_instance(std::uint32_t id) const { return triangle_instance_[id]; }
  std::uint32_t triangle_local(std::uint32_t id) const { return id - instances_[triangle_instance_[id]].first_triangle; }
  const Vec3& triangle_normal(std::uint32_t id) const { return normals_[id]; }
  double triangle_area(std::uint32_t id) const { return areas_[id]; }
  bool triangle_degenerate(std::uint32_t id) const { return areas_[id] < kDegenerateArea; }
  const MaterialSpec& triangle_material(std::uint32_t id) const {
    return materials_[instances_[triangle_instance_[id]].material];
  }
  double total_area() const;

  // Twice the largest distance of any vertex, emitter or receiver from their
// centroid. Rigid motions of the whole scene leave it unchanged.
  double diameter() const { return diameter_; }
  // Self-intersection offset, 1e-6 of the scene diameter.
  double epsilon() const { return epsilon_; }

  std::optional<RayHit> closest_hit(const Ray& ray, double tmin, double tmax) const {
    return bvh_.closest(corners_, ray, tmin, tmax);
  }
  // True iff the open segment (a, b), retracted by epsilon() at both ends,
  // crosses no triangle.
  bool line_of_sight(const Vec3& a, const Vec3& b) const;

  std::optional<EntityRef> find_entity(std::string_view id) const;
  Pose entity_pose(const EntityRef& ref) const;

  // Returns a new revision with one entity moved. Errors: UnknownEntity,
  // InvalidArgument (non-unit quaternion).
  Scene with_pose(std::string_view entity, const Pose& pose) const;

 private:
  Scene() = default;
  void rebuild_world_arrays();
  void update_extent();

  std::uint64_t revision_ = 0;
  std::vector<double> frequencies_;
  double speed_of_sound_ = kDefaultSpeedOfSound;
  std::vector<double> attenuation_;
  std::vector<MaterialSpec> materials_;
  std::vector<MeshInstance> instances_;
  std::vector<Emitter> emitters_;
  std::vector<Receiver> receivers_;

  std::vector<TriangleCorners> corners_;
  std::vector<Vec3> normals_;
  std::vector<double> areas_;
  std::vector<std::uint32_t> triangle_instance_;
  Bvh bvh_;
  double diameter_ = 0.0;
  double epsilon_ = 1e-9;
};

// Rotation taking the emitter boresight (+Z) onto `direction`.
Quat rotation_from_boresight(const Vec3& direction);

}  // namespace sonotrace::scene
