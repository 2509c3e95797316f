// SPDX-FileCopyrightText: Copyright (c) 2026 The SonoTrace Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <string>

#include "common/error.hpp"

namespace sonotrace::acoustics {

// Inverse-square spreading, 1 / r^2. Errors: DomainError for r <= 0.
inline double geometric_loss(double r) {
  if (!(r > 0.0)) fail(ErrorCode::DomainError, "geometric loss needs r > 0, got " + std::to_string(r));
  return 1.0 / (r * r);
}

// Amplitude factor of an absorption of alpha dB/m over r metres:
// 10^(-alpha r / 20), always in (0, 1] for alpha, r >= 0.
inline double atmospheric_loss(double r, double alpha_db_per_m) {
  return std::pow(10.0, -alpha_db_per_m * r / 20.0);
}

// Gaussian specular lobe of width beta around the mirror direction, scaled
// by the reflection coefficient k.
inline double specular_intensity(double gamma, double beta, double k) {
  return std::exp(-(gamma * gamma) / (2.0 * beta * beta)) * k;
}

}  // namespace sonotrace::acoustics
