// SPDX-FileCopyrightText: Copyright (c) 2026 The SonoTrace Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace sonotrace::synthesis {

using Spectrum = std::vector<std::complex<double>>;

// One-sided forward transform of n real samples (zero-padded or truncated
// to n). Returns n / 2 + 1 bins, unnormalized.
Spectrum forward_real_fft(std::span<const double> samples, std::size_t n);

// Inverse of forward_real_fft scaled by 1 / n, so a flat unit spectrum maps
// to a unit impulse. `spectrum` must hold n / 2 + 1 bins; the imaginary
// parts of DC and Nyquist are ignored.
std::vector<double> inverse_real_fft(std::span<const std::complex<double>> spectrum, std::size_t n);

// Full linear convolution, length a.size() + b.size() - 1 (empty if either
// input is empty).
std::vector<double> convolve(std::span<const double> a, std::span<const double> b);

}  // namespace sonotrace::synthesis
