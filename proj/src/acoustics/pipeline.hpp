// SPDX-FileCopyrightText: Copyright (c) 2026 The SonoTrace Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <memory>
#include <string_view>

#include "acoustics/contributions.hpp"
#include "preproc/curvature.hpp"
#include "scene/scene.hpp"

namespace sonotrace::acoustics {

struct SimulationOptions {
  std::uint32_t components = kAllComponents;
  std::uint64_t seed = 0;
  unsigned workers = 0;  // 0 = default_worker_count()
};

// A scene revision with its pre-processed curvature. Instances are
// rigid, so pose edits keep the curvature table (it lives in mesh space
// apart from the world centroids, which the simulation does not read).
struct Model {
  std::shared_ptr<const scene::Scene> scene;
  std::shared_ptr<const preproc::CurvatureTable> curvature;

  static Model prepare(scene::Scene scene, unsigned workers = 0);
  Model with_pose(std::string_view entity, const Pose& pose) const;
};

// Specular tracing and magnitudes for every emitter, diffraction sampling,
// filtering and magnitudes for every emitter, and passive direct paths,
// merged in (kind, source, receiver, index) order. Identical for any
// worker count.
ContributionSet simulate(const Model& model, const SimulationOptions& options);

}  // namespace sonotrace::acoustics
