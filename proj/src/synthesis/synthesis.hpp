// SPDX-FileCopyrightText: Copyright (c) 2026 The SonoTrace Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include "acoustics/contributions.hpp"
#include "common/math.hpp"
#include "synthesis/fft.hpp"

namespace sonotrace::synthesis {

// Dense transform grid: bins f_j = j fs / n_fft for j in [0, n_fft / 2].
struct SpectralGrid {
  double fs = 0.0;
  std::uint32_t n_fft = 0;

  std::size_t bins() const { return n_fft / 2 + 1; }
  double frequency(std::size_t j) const { return static_cast<double>(j) * fs / n_fft; }
  double span_seconds() const { return n_fft / fs; }
};

// Default sample rate: four times the highest coarse bin frequency.
double default_sample_rate(std::span<const double> coarse_frequencies);

// Smallest power-of-two n_fft with n_fft / fs >= 2 max_length / c +
// signal_duration. fs <= 0 selects default_sample_rate(). Errors:
// InvalidArgument when fs does not exceed twice the highest coarse bin.
SpectralGrid make_spectral_grid(std::span<const double> coarse_frequencies, double speed_of_sound,
                                double max_length, double signal_duration = 0.0, double fs = 0.0);

// Grid long enough for every contribution in `set` plus `signal_duration`:
// make_spectral_grid with max length max(min_path_length, max r) / 2 and one
// sample of headroom.
SpectralGrid grid_for_contributions(const acoustics::ContributionSet& set, double min_path_length,
                                    double signal_duration = 0.0, double fs = 0.0);

// Checks a caller-supplied grid. Errors: InvalidArgument.
void validate_grid(const SpectralGrid& grid, std::span<const double> coarse_frequencies);

// Builds and accumulates transfer functions H(f_j) = |M|(f_j) exp(-j w_j r / c)
// on one grid, where |M| is linearly interpolated from the coarse bins with
// flat extrapolation. DC and Nyquist keep only their real part.
class SpectrumBuilder {
 public:
  SpectrumBuilder(const SpectralGrid& grid, std::span<const double> coarse_frequencies, double speed_of_sound);

  const SpectralGrid& grid() const { return grid_; }
  Spectrum zeros() const { return Spectrum(grid_.bins()); }

  // Adds one contribution's transfer function to `spectrum`. Errors:
  // DomainError for negative r, AliasRisk when r / c reaches the grid span,
  // GridMismatch for a wrong magnitude count.
  void add(std::span<const double> magnitudes, double path_length, Spectrum& spectrum) const;

  Spectrum transfer_function(std::span<const double> magnitudes, double path_length) const {
    Spectrum s = zeros();
    add(magnitudes, path_length, s);
    return s;
  }

 private:
  SpectralGrid grid_;
  double speed_of_sound_;
  std::size_t coarse_bins_;
  std::vector<std::uint32_t> lower_;  // per dense bin
  std::vector<double> weight_;        // of lower_ + 1
};

struct ImpulseResponse {
  std::uint32_t source = 0;
  std::uint32_t receiver = 0;
  double fs = 0.0;
  std::vector<double> samples;
};

// Sum of the transfer functions of every contribution of pair (s, m),
// transformed once. Errors: GridMismatch when the set's bins differ from the
// builder's, plus SpectrumBuilder::add errors.
ImpulseResponse impulse_response(const acoustics::ContributionSet& set, std::uint32_t source,
                                 std::uint32_t receiver, const SpectrumBuilder& builder);

// Every (s, m) pair in source-major order; pairs are synthesized in parallel.
std::vector<ImpulseResponse> impulse_responses(const acoustics::ContributionSet& set, const SpectrumBuilder& builder,
                                               unsigned workers = 0);

struct Signal {
  double fs = 0.0;
  std::vector<double> samples;
};

struct RenderedSignal {
  std::uint32_t receiver = 0;
  double fs = 0.0;
  std::vector<double> samples;
};

// Full linear convolution h * s_e. Errors: SampleRateMismatch.
RenderedSignal render_signal(const ImpulseResponse& h, const Signal& emitted);

// Sum of the renders of every response in `responses` that targets
// `receiver`, zero-extended to the longest. Errors: SampleRateMismatch.
RenderedSignal render_receiver(std::span<const ImpulseResponse> responses, std::uint32_t receiver,
                               const Signal& emitted);

// Linear frequency sweep sin(2 pi (f0 t + (f1 - f0) t^2 / (2 T))) sampled at fs.
Signal linear_chirp(double f0, double f1, double duration, double fs);

// Per-frequency gain over (azimuth, elevation) in the emitter frame, where
// azimuth = atan2(x, z) and elevation = asin(y) of the unit departure
// direction (boresight +Z). Gains are bilinear in angle and clamped at the
// table edges. An empty table is unity.
struct GainTable {
  std::vector<double> azimuths;    // rad, strictly increasing
  std::vector<double> elevations;  // rad, strictly increasing
  std::uint32_t bins = 0;
  std::vector<double> gains;       // [(elevation * azimuths + azimuth) * bins + bin]

  bool empty() const { return gains.empty(); }
  // Errors: InvalidArgument for inconsistent sizes or unsorted axes.
  void validate() const;
  double gain(double azimuth, double elevation, std::size_t bin) const;
};

// (azimuth, elevation) of a world direction in the emitter frame.
std::pair<double, double> emitter_frame_angles(const Vec3& departure, const Pose& emitter_pose);

// Scales `magnitudes` in place by the table gain for the departure direction.
void directional_gain(std::span<double> magnitudes, const Vec3& departure, const Pose& emitter_pose,
                      const GainTable& table);

// Short-time Fourier transform magnitudes with a periodic Hann window.
struct Spectrogram {
  double fs = 0.0;
  std::uint32_t window = 0;
  std::uint32_t hop = 0;
  std::size_t frames = 0;
  std::size_t bins = 0;          // window / 2 + 1
  std::vector<double> magnitude; // [frame * bins + bin]

  double time(std::size_t frame) const { return static_cast<double>(frame * hop) / fs; }
  double frequency(std::size_t bin) const { return static_cast<double>(bin) * fs / window; }
  double at(std::size_t frame, std::size_t bin) const { return magnitude[frame * bins + bin]; }
};

// Frames start every `hop` samples; the tail is zero-padded. Errors:
// InvalidArgument for window < 2 or hop = 0.
Spectrogram spectrogram(std::span<const double> samples, double fs, std::uint32_t window, std::uint32_t hop);

// Frame-wise target - baseline over the common frames. Errors: GridMismatch
// when fs, window or hop differ.
Spectrogram spectrogram_difference(const Spectrogram& target, const Spectrogram& baseline);

// sqrt(sum (t - t_mean)^2 h^2 / sum h^2) with t = i / fs; 0 for an all-zero h.
double rms_delay_spread(std::span<const double> samples, double fs);

}  // namespace sonotrace::synthesis
