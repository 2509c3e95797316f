// SPDX-FileCopyrightText: Copyright (c) 2026 The SonoTrace Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <vector>

#include "common/math.hpp"

namespace sonotrace::tracer {

// Zone layout of the recursive zonal equal-area partition of S^2 into n
// regions: a north polar cap, `collar` bands, a south polar cap.
struct ZonalPartition {
  std::vector<double> cap_colatitudes;     // top boundary .. pi, one per zone
  std::vector<std::uint32_t> region_counts;  // regions per zone, caps included
};

ZonalPartition zonal_partition(std::uint32_t n);

// One representative direction per region (polar caps at +Z / -Z, collar
// points at the mid-colatitude of their band). Deterministic; n = 1 gives +Z.
std::vector<Vec3> equal_area_directions(std::uint32_t n);

}  // namespace sonotrace::tracer
