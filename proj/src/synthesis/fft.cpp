// SPDX-FileCopyrightText: Copyright (c) 2026 The SonoTrace Authors
// SPDX-License-Identifier: Apache-2.0

#include "synthesis/fft.hpp"

#include <fftw3.h>

#include <algorithm>
#include <bit>
#include <limits>
#include <memory>
#include <mutex>
#include <string>

#include "common/error.hpp"

namespace sonotrace::synthesis {

namespace {

// FFTW's planner is not thread-safe; execution is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

template <typename T>
struct FftwBuffer {
  explicit FftwBuffer(std::size_t n) : data(static_cast<T*>(fftw_malloc(sizeof(T) * std::max<std::size_t>(n, 1)))) {
    if (!data) throw std::bad_alloc();
  }
  ~FftwBuffer() { fftw_free(data); }
  FftwBuffer(const FftwBuffer&) = delete;
  FftwBuffer& operator=(const FftwBuffer&) = delete;
  T* data;
};

class Plan {
 public:
  explicit Plan(fftw_plan p) : plan_(p) {
    if (!plan_) fail(ErrorCode::InvalidArgument, "FFTW could not create a plan");
  }
  ~Plan() {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(plan_);
  }
  Plan(const Plan&) = delete;
  Plan& operator=(const Plan&) = delete;
  void execute() const { fftw_execute(plan_); }

 private:
  fftw_plan plan_;
};

void check_length(std::size_t n) {
  if (n == 0 || n > static_cast<std::size_t>(std::numeric_limits<int>::max())) {
    fail(ErrorCode::InvalidArgument, "transform length out of range: " + std::to_string(n));
  }
}

}  // namespace

Spectrum forward_real_fft(std::span<const double> samples, std::size_t n) {
  check_length(n);
  const std::size_t bins = n / 2 + 1;
  FftwBuffer<double> in(n);
  FftwBuffer<fftw_complex> out(bins);
  auto plan = [&] {
    std::lock_guard lock(planner_mutex());
    return std::make_unique<Plan>(fftw_plan_dft_r2c_1d(static_cast<int>(n), in.data, out.data, FFTW_ESTIMATE));
  }();
  std::fill(in.data, in.data + n, 0.0);
  std::copy_n(samples.begin(), std::min(n, samples.size()), in.data);
  plan->execute();
  Spectrum spectrum(bins);
  for (std::size_t k = 0; k < bins; ++k) spectrum[k] = {out.data[k][0], out.data[k][1]};
  return spectrum;
}

std::vector<double> inverse_real_fft(std::span<const std::complex<double>> spectrum, std::size_t n) {
  check_length(n);
  const std::size_t bins = n / 2 + 1;
  if (spectrum.size() != bins) {
    fail(ErrorCode::GridMismatch, "spectrum has " + std::to_string(spectrum.size()) + " bins, expected " +
                                      std::to_string(bins));
  }
  FftwBuffer<fftw_complex> in(bins);
  FftwBuffer<double> out(n);
  // c2r plans may overwrite their input, so the plan is made before filling.
  auto plan = [&] {
    std::lock_guard lock(planner_mutex());
    return std::make_unique<Plan>(fftw_plan_dft_c2r_1d(static_cast<int>(n), in.data, out.data, FFTW_ESTIMATE));
  }();
  for (std::size_t k = 0; k < bins; ++k) {
    in.data[k][0] = spectrum[k].real();
    in.data[k][1] = spectrum[k].imag();
  }
  in.data[0][1] = 0.0;
  if (n % 2 == 0) in.data[bins - 1][1] = 0.0;
  plan->execute();
  const double scale = 1.0 / static_cast<double>(n);
  std::vector<double> samples(n);
  for (std::size_t i = 0; i < n; ++i) samples[i] = out.data[i] * scale;
  return samples;
}

std::vector<double> convolve(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) return {};
  const std::size_t len = a.size() + b.size() - 1;
  const std::size_t n = std::bit_ceil(len);
  auto fa = forward_real_fft(a, n);
  const auto fb = forward_real_fft(b, n);
  for (std::size_t k = 0; k < fa.size(); ++k) fa[k] *= fb[k];
  auto out = inverse_real_fft(fa, n);
  out.resize(len);
  return out;
}

}  // namespace sonotrace::synthesis
