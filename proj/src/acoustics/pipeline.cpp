// SPDX-FileCopyrightText: Copyright (c) 2026 The SonoTrace Authors
// SPDX-License-Identifier: Apache-2.0

#include "acoustics/pipeline.hpp"

#include "acoustics/components.hpp"
#include "common/parallel.hpp"
#include "tracer/tracer.hpp"

namespace sonotrace::acoustics {

Model Model::prepare(scene::Scene scene, unsigned workers) {
  Model m;
  auto table = preproc::preprocess_scene(scene, workers);
  m.scene = std::make_shared<const scene::Scene>(std::move(scene));
  m.curvature = std::make_shared<const preproc::CurvatureTable>(std::move(table));
  return m;
}

Model Model::with_pose(std::string_view entity, const Pose& pose) const {
  Model m;
  m.scene = std::make_shared<const scene::Scene>(scene->with_pose(entity, pose));
  m.curvature = curvature;
  return m;
}

ContributionSet simulate(const Model& model, const SimulationOptions& options) {
  const auto& scene = *model.scene;
  const unsigned workers = options.workers == 0 ? default_worker_count() : options.workers;
  ContributionSet out = empty_contributions(scene);
  const auto emitters = static_cast<std::uint32_t>(scene.emitters().size());

  if (options.components & kSpecular) {
    for (std::uint32_t s = 0; s < emitters; ++s) {
      const auto hits = tracer::trace_specular(scene, s, workers);
      out.append(specular_magnitudes(scene, hits, *model.curvature, workers));
    }
  }
  if (options.components & kDiffraction) {
    for (std::uint32_t s = 0; s < emitters; ++s) {
      const auto& emitter = scene.emitters()[s];
      const auto sampled =
          sample_diffraction_candidates(scene, *model.curvature, s, emitter.diffraction_candidates, options.seed);
      const auto kept = filter_diffraction_candidates(scene, sampled, emitter.max_incidence, workers);
      out.append(diffraction_magnitudes(scene, kept, workers));
    }
  }
  if (options.components & kPassive) out.append(passive_magnitudes(scene));
  return out;
}

}  // namespace sonotrace::acoustics
