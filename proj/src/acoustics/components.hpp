// SPDX-FileCopyrightText: Copyright (c) 2026 The SonoTrace Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <vector>

#include "acoustics/contributions.hpp"
#include "preproc/curvature.hpp"
#include "scene/scene.hpp"
#include "tracer/tracer.hpp"

namespace sonotrace::acoustics {

// Empty set shaped for `scene` (sources, receivers, bins, frequencies, c).
ContributionSet empty_contributions(const scene::Scene& scene);

// One contribution per (hit record, receiver) with line of sight from the
// hit to the receiver: r = r_total + |hit -> receiver|, gamma = angle
// between the reflection direction and hit -> receiver, and
// M(f) = L_geo(r) L_atm(r, f) I_rt(gamma, beta(T, f), k(T, f)).
// Errors: RevisionMismatch when `hits` came from another scene revision.
ContributionSet specular_magnitudes(const scene::Scene& scene, const tracer::HitBuffer& hits,
                                    const preproc::CurvatureTable& curvature, unsigned workers = 0);

struct DiffractionCandidate {
  Vec3 position;
  std::uint32_t triangle = 0;
  std::uint32_t instance = 0;
};

struct CandidateSet {
  std::uint64_t revision = 0;
  std::uint32_t emitter = 0;
  std::vector<DiffractionCandidate> points;
};

// Conservative cone/bounding-sphere test of an instance against the
// emitter's frustum.
bool instance_in_frustum(const scene::MeshInstance& instance, const scene::Emitter& emitter);

// For every instance in the emitter frustum, draws `count` triangles with
// probability proportional to C_i plus a seeded dither in [0, 1e-3 mean C)
// and places one uniform point in each. Degenerate triangles never qualify;
// instances whose metric is zero everywhere are skipped.
CandidateSet sample_diffraction_candidates(const scene::Scene& scene, const preproc::CurvatureTable& curvature,
                                           std::uint32_t emitter, std::uint32_t count, std::uint64_t seed);

// Keeps candidates that see the emitter and whose triangle normal lies
// within `max_incidence` of the candidate -> emitter vector.
CandidateSet filter_diffraction_candidates(const scene::Scene& scene, const CandidateSet& candidates,
                                           double max_incidence, unsigned workers = 0);

// Omnidirectional secondary sources: for each candidate and receiver with
// line of sight, r = |emitter -> point| + |point -> receiver| and
// M(f) = L_geo(r) L_atm(r, f) I_d(f) of the candidate's material.
ContributionSet diffraction_magnitudes(const scene::Scene& scene, const CandidateSet& candidates,
                                       unsigned workers = 0);

// Direct paths for every (source, receiver) pair with line of sight:
// M(f) = L_geo(r) L_atm(r, f) I_p(f). Co-located pairs are skipped.
ContributionSet passive_magnitudes(const scene::Scene& scene);

}  // namespace sonotrace::acoustics
