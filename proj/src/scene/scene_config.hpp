// SPDX-FileCopyrightText: Copyright (c) 2026 The SonoTrace Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include <json.hpp>

#include "scene/scene.hpp"

namespace sonotrace::scene {

// Scene documents are JSON; docs/scene_format.md describes every key.
// Relative mesh paths resolve against `base_dir`. Errors: InvalidConfig
// (bad document), MissingMesh, UnknownMaterial, ParseError/EmptyMesh from
// the mesh readers, InvalidFrequencyGrid.
SceneDescription parse_scene_description(const nlohmann::json& doc, const std::filesystem::path& base_dir);

Scene build_scene(const nlohmann::json& doc, const std::filesystem::path& base_dir);
Scene load_scene(const std::string& path);

struct SceneCounts {
  std::uint64_t triangles = 0;
  std::uint64_t instances = 0;
  std::uint64_t emitters = 0;
  std::uint64_t receivers = 0;
  std::uint64_t bins = 0;
  nlohmann::json materials = nlohmann::json::array();
};

// Counts triangles from mesh headers and primitive parameters without
// building geometry, so very large scenes can be sized before loading.
SceneCounts describe_scene(const std::string& path);

// Emitters, receivers, instances (with poses), bins and materials.
nlohmann::json scene_summary(const Scene& scene);

nlohmann::json material_to_json(const MaterialSpec& m);

}  // namespace sonotrace::scene
