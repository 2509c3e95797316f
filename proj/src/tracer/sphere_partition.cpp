// SPDX-FileCopyrightText: Copyright (c) 2026 The SonoTrace Authors
// SPDX-License-Identifier: Apache-2.0

#include "tracer/sphere_partition.hpp"

#include <cmath>
#include <numbers>

#include "common/error.hpp"

namespace sonotrace::tracer {

namespace {

constexpr double kPi = std::numbers::pi;

// Area of a spherical cap of angular radius s on S^2.
double cap_area(double s) {
  const double h = std::sin(s / 2.0);
  return 4.0 * kPi * h * h;
}

// Angular radius of a cap with the given area.
double cap_radius(double area) { return 2.0 * std::asin(std::sqrt(area / kPi) / 2.0); }

}  // namespace

ZonalPartition zonal_partition(std::uint32_t n) {
  if (n == 0) fail(ErrorCode::InvalidArgument, "partition needs at least one region");
  ZonalPartition p;
  if (n == 1) {
    p.cap_colatitudes = {kPi};
    p.region_counts = {1};
    return p;
  }
  const double region_area = 4.0 * kPi / n;
  const double polar = cap_radius(region_area);
  if (n == 2) {
    p.cap_colatitudes = {polar, kPi};
    p.region_counts = {1, 1};
    return p;
  }

  const double ideal_angle = std::sqrt(region_area);
  const auto collars = static_cast<std::uint32_t>(std::max(1.0, std::round((kPi - 2.0 * polar) / ideal_angle)));
  const double fitting = (kPi - 2.0 * polar) / collars;

  // Ideal (real-valued) region count per zone, then rounded so the running
  // total stays exact.
  std::vector<double> ideal(collars + 2);
  ideal.front() = 1.0;
  ideal.back() = 1.0;
  for (std::uint32_t c = 1; c <= collars; ++c) {
    const double top = polar + (c - 1) * fitting;
    const double bot = polar + c * fitting;
    ideal[c] = (cap_area(bot) - cap_area(top)) / region_area;
  }
  p.region_counts.resize(ideal.size());
  double discrepancy = 0.0;
  for (std::size_t z = 0; z < ideal.size(); ++z) {
    const double count = std::round(ideal[z] + discrepancy);
    p.region_counts[z] = static_cast<std::uint32_t>(count);
    discrepancy += ideal[z] - count;
  }

  p.cap_colatitudes.resize(collars + 2);
  p.cap_colatitudes[0] = polar;
  std::uint64_t subtotal = 1;
  for (std::uint32_t c = 1; c <= collars; ++c) {
    subtotal += p.region_counts[c];
    p.cap_colatitudes[c] = cap_radius(subtotal * region_area);
  }
  p.cap_colatitudes.back() = kPi;
  return p;
}

std::vector<Vec3> equal_area_directions(std::uint32_t n) {
  const ZonalPartition p = zonal_partition(n);
  std::vector<Vec3> out;
  out.reserve(n);
  out.push_back({0.0, 0.0, 1.0});
  if (n == 1) return out;

  const std::size_t collars = p.region_counts.size() - 2;
  double offset = 0.0;  // fraction of a full turn
  for (std::size_t c = 1; c <= collars; ++c) {
    const double top = p.cap_colatitudes[c - 1];
    const double bot = p.cap_colatitudes[c];
    const double colat = (top + bot) / 2.0;
    const std::uint32_t m = p.region_counts[c];
    const double sin_c = std::sin(colat);
    const double cos_c = std::cos(colat);
    for (std::uint32_t k = 0; k < m; ++k) {
      double lon = (k + 0.5) * (2.0 * kPi / m) + 2.0 * kPi * offset;
      lon = std::fmod(lon, 2.0 * kPi);
      out.push_back({sin_c * std::cos(lon), sin_c * std::sin(lon), cos_c});
    }
    // Rotate the next collar to stagger its points against this one.
    const std::uint32_t next = p.region_counts[c + 1];
    offset += (1.0 / m - 1.0 / next) / 2.0;
    offset -= std::floor(offset);
  }
  out.push_back({0.0, 0.0, -1.0});
  return out;
}

}  // namespace sonotrace::tracer
