// SPDX-FileCopyrightText: Copyright (c) 2026 The SonoTrace Authors
// SPDX-License-Identifier: Apache-2.0

// Small scene builders shared by unit and acceptance tests.

#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "scene/mesh.hpp"
#include "scene/scene.hpp"

namespace sonotrace::testing {

// Frequency grid lo, lo + step, ... with `bins` entries.
std::vector<double> linear_bins(double lo, double step, std::size_t bins);

// Material with constant per-bin endpoints.
scene::MaterialSpec uniform_material(const std::string& id, std::size_t bins, double beta_smooth, double beta_edge,
                                     double k_smooth, double k_edge, double diffraction = 0.0, double c_sat = 1.0);

scene::InstanceDescription instance(const std::string& id, std::shared_ptr<const scene::TriangleMesh> mesh,
                                    const Pose& pose, const std::string& material, double scale = 1.0);

// Emitter at `position` looking along `direction`.
scene::Emitter emitter(const std::string& id, const Vec3& position, const Vec3& direction, std::uint32_t rays,
                       std::size_t bins, double source_level = 1.0);

scene::Receiver receiver(const std::string& id, const Vec3& position);

Pose translation(const Vec3& p);

// 2 m plate centered 1.715 m from an emitter/receiver pair at the origin,
// facing them; ten-millisecond round trip at c = 343 m/s.
scene::SceneDescription plate_echo_description(std::size_t bins, std::uint32_t rays, std::uint32_t grid);

// `bumps` hemispheres of radius `radius` on a jittered lattice covering a
// size x size square in the z = 0 plane, domes towards +Z.
scene::TriangleMesh bump_field(double size, std::uint32_t bumps, double radius, std::uint32_t bump_rings,
                               std::uint32_t bump_segments, std::uint64_t seed);

// Plate with `bumps` hemispherical bumps of radius `radius` on a jittered
// lattice, as a single mesh (z-up). Deterministic for a given seed.
scene::TriangleMesh bumpy_plate(double size, std::uint32_t grid, std::uint32_t bumps, double radius,
                                std::uint32_t bump_rings, std::uint32_t bump_segments, std::uint64_t seed);

// Concatenates meshes into one.
scene::TriangleMesh merge_meshes(const std::vector<scene::TriangleMesh>& meshes);

}  // namespace sonotrace::testing
