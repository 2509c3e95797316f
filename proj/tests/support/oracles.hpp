// SPDX-FileCopyrightText: Copyright (c) 2026 The SonoTrace Authors
// SPDX-License-Identifier: Apache-2.0

// Independent reference implementations used as test oracles. They share
// only the primitive formulas with the library (triangle intersection,
// losses, lobe), never its traversal, scheduling or ordering code.

#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "acoustics/contributions.hpp"
#include "preproc/curvature.hpp"
#include "scene/intersect.hpp"
#include "scene/scene.hpp"

namespace sonotrace::testing {

// All-triangle nearest hit with the lower-id tie-break.
std::optional<scene::RayHit> brute_closest(const scene::Scene& scene, const Ray& ray, double tmin, double tmax);
bool brute_line_of_sight(const scene::Scene& scene, const Vec3& a, const Vec3& b);

// Mean curvature per vertex from explicit angles: for every vertex, every
// incident triangle is found by a full scan, cotangents come from acos of
// the corner angles and the mixed area follows the Voronoi/obtuse rules.
std::vector<double> naive_vertex_curvature(const scene::TriangleMesh& mesh);

// Sequential per-instance curvature, metric and BRDF tables.
preproc::CurvatureTable reference_curvature(const scene::Scene& scene);

// Single-threaded simulation with brute-force intersection and naive loops.
acoustics::ContributionSet reference_simulate(const scene::Scene& scene, const preproc::CurvatureTable& curvature,
                                              std::uint32_t components, std::uint64_t seed);

// O(N^2) inverse DFT of a one-sided spectrum (n / 2 + 1 bins), scaled 1/n.
// Also returns the largest imaginary residue when `imag_residue` is set.
std::vector<double> naive_inverse_dft(std::span<const std::complex<double>> spectrum, std::size_t n,
                                      double* imag_residue = nullptr);

// c[k] = sum_i x[i + k] t[i] for k in [0, x.size() - t.size()].
std::vector<double> naive_correlation(std::span<const double> x, std::span<const double> t);

// Direct-form full convolution.
std::vector<double> naive_convolution(std::span<const double> a, std::span<const double> b);

std::size_t argmax_abs(std::span<const double> v);

// Contribution export parsed field by field from the documented layout.
struct DecodedRecord {
  std::uint8_t kind;
  std::uint32_t source;
  std::uint32_t receiver;
  double position[3];
  double path_length;
  std::uint32_t index;
  std::vector<double> magnitudes;
};
struct DecodedExport {
  std::uint16_t version;
  std::uint16_t components;
  std::uint32_t sources;
  std::uint32_t receivers;
  std::uint32_t bins;
  std::uint64_t specular_points;
  std::uint64_t diffraction_points;
  std::uint64_t revision;
  std::uint64_t seed;
  double speed_of_sound;
  std::vector<double> frequencies;
  std::vector<DecodedRecord> records;
};
DecodedExport decode_export(std::span<const std::uint8_t> bytes);

// Fresh empty directory under the system temp dir.
std::string make_temp_dir(const std::string& tag);

}  // namespace sonotrace::testing
