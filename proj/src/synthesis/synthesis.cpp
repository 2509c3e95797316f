// SPDX-FileCopyrightText: Copyright (c) 2026 The SonoTrace Authors
// SPDX-License-Identifier: Apache-2.0

#include "synthesis/synthesis.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <string>

#include "common/error.hpp"
#include "common/parallel.hpp"

namespace sonotrace::synthesis {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
// Phasor recurrence is re-anchored on an exact polar() every this many bins.
constexpr std::size_t kPhaseResync = 64;

double highest(std::span<const double> f) {
  if (f.empty()) fail(ErrorCode::InvalidFrequencyGrid, "no frequency bins");
  return *std::max_element(f.begin(), f.end());
}

}  // namespace

double default_sample_rate(std::span<const double> coarse_frequencies) { return 4.0 * highest(coarse_frequencies); }

void validate_grid(const SpectralGrid& grid, std::span<const double> coarse_frequencies) {
  if (!(grid.fs > 2.0 * highest(coarse_frequencies)) || !std::isfinite(grid.fs)) {
    fail(ErrorCode::InvalidArgument, "sample rate " + std::to_string(grid.fs) +
                                         " Hz must exceed twice the highest bin frequency");
  }
  if (grid.n_fft < 2 || !std::has_single_bit(grid.n_fft)) {
    fail(ErrorCode::InvalidArgument, "n_fft must be a power of two >= 2, got " + std::to_string(grid.n_fft));
  }
}

SpectralGrid make_spectral_grid(std::span<const double> coarse_frequencies, double speed_of_sound,
                                double max_length, double signal_duration, double fs) {
  if (!(speed_of_sound > 0.0) || !(max_length >= 0.0) || !(signal_duration >= 0.0)) {
    fail(ErrorCode::InvalidArgument, "grid needs c > 0, max length >= 0 and signal duration >= 0");
  }
  SpectralGrid grid;
  grid.fs = fs > 0.0 ? fs : default_sample_rate(coarse_frequencies);
  const double needed = grid.fs * (2.0 * max_length / speed_of_sound + signal_duration);
  if (needed > static_cast<double>(1u << 30)) {
    fail(ErrorCode::InvalidArgument, "grid would need more than 2^30 samples");
  }
  grid.n_fft = std::bit_ceil(std::max<std::uint32_t>(2, static_cast<std::uint32_t>(std::ceil(needed))));
  validate_grid(grid, coarse_frequencies);
  return grid;
}

SpectralGrid grid_for_contributions(const acoustics::ContributionSet& set, double min_path_length,
                                    double signal_duration, double fs) {
  double longest = min_path_length;
  for (const auto& c : set.items) longest = std::max(longest, c.path_length);
  const double rate = fs > 0.0 ? fs : default_sample_rate(set.frequencies);
  return make_spectral_grid(set.frequencies, set.speed_of_sound, 0.5 * longest, signal_duration + 1.0 / rate, rate);
}

SpectrumBuilder::SpectrumBuilder(const SpectralGrid& grid, std::span<const double> coarse_frequencies,
                                 double speed_of_sound)
    : grid_(grid), speed_of_sound_(speed_of_sound), coarse_bins_(coarse_frequencies.size()) {
  validate_grid(grid, coarse_frequencies);
  if (!(speed_of_sound > 0.0)) fail(ErrorCode::InvalidArgument, "speed of sound must be positive");
  for (std::size_t i = 1; i < coarse_frequencies.size(); ++i) {
    if (!(coarse_frequencies[i] > coarse_frequencies[i - 1])) {
      fail(ErrorCode::InvalidFrequencyGrid, "bin frequencies must be strictly increasing");
    }
  }
  const std::size_t n = grid.bins();
  lower_.resize(n);
  weight_.resize(n);
  const std::size_t last = coarse_bins_ - 1;
  for (std::size_t j = 0; j < n; ++j) {
    const double f = grid.frequency(j);
    if (f <= coarse_frequencies.front()) {
      lower_[j] = 0;
      weight_[j] = 0.0;
    } else if (f >= coarse_frequencies.back()) {
      lower_[j] = static_cast<std::uint32_t>(last);
      weight_[j] = 0.0;
    } else {
      const auto it = std::upper_bound(coarse_frequencies.begin(), coarse_frequencies.end(), f);
      const auto hi = static_cast<std::size_t>(it - coarse_frequencies.begin());
      lower_[j] = static_cast<std::uint32_t>(hi - 1);
      weight_[j] = (f - coarse_frequencies[hi - 1]) / (coarse_frequencies[hi] - coarse_frequencies[hi - 1]);
    }
  }
}

void SpectrumBuilder::add(std::span<const double> magnitudes, double path_length, Spectrum& spectrum) const {
  if (magnitudes.size() != coarse_bins_) {
    fail(ErrorCode::GridMismatch, "contribution has " + std::to_string(magnitudes.size()) +
                                      " magnitudes, grid expects " + std::to_string(coarse_bins_));
  }
  if (spectrum.size() != grid_.bins()) fail(ErrorCode::GridMismatch, "spectrum size does not match the grid");
  if (!(path_length >= 0.0)) fail(ErrorCode::DomainError, "path length must be >= 0");
  const double delay = path_length / speed_of_sound_;
  if (delay >= grid_.span_seconds()) {
    fail(ErrorCode::AliasRisk, "delay " + std::to_string(delay) + " s reaches the grid span of " +
                                   std::to_string(grid_.span_seconds()) + " s");
  }
  const double step = -kTwoPi * grid_.fs / grid_.n_fft * delay;
  const std::complex<double> rotate = std::polar(1.0, step);
  const std::size_t n = grid_.bins();
  std::complex<double> phasor;
  for (std::size_t j = 0; j < n; ++j) {
    phasor = (j % kPhaseResync == 0) ? std::polar(1.0, step * static_cast<double>(j)) : phasor * rotate;
    const std::size_t lo = lower_[j];
    const double w = weight_[j];
    const double mag = w == 0.0 ? magnitudes[lo] : (1.0 - w) * magnitudes[lo] + w * magnitudes[lo + 1];
    spectrum[j] += mag * phasor;
  }
  spectrum.front().imag(0.0);
  spectrum.back().imag(0.0);
}

ImpulseResponse impulse_response(const acoustics::ContributionSet& set, std::uint32_t source,
                                 std::uint32_t receiver, const SpectrumBuilder& builder) {
  if (set.bins != 0 && builder.grid().bins() == 0) fail(ErrorCode::GridMismatch, "empty grid");
  Spectrum spectrum = builder.zeros();
  for (std::size_t i = 0; i < set.size(); ++i) {
    const auto& c = set.items[i];
    if (c.source != source || c.receiver != receiver) continue;
    builder.add(set.magnitude(i), c.path_length, spectrum);
  }
  ImpulseResponse h;
  h.source = source;
  h.receiver = receiver;
  h.fs = builder.grid().fs;
  h.samples = inverse_real_fft(spectrum, builder.grid().n_fft);
  return h;
}

std::vector<ImpulseResponse> impulse_responses(const acoustics::ContributionSet& set, const SpectrumBuilder& builder,
                                               unsigned workers) {
  std::vector<ImpulseResponse> out(static_cast<std::size_t>(set.sources) * set.receivers);
  parallel_for(out.size(), workers, [&](std::size_t pair) {
    out[pair] = impulse_response(set, static_cast<std::uint32_t>(pair / set.receivers),
                                 static_cast<std::uint32_t>(pair % set.receivers), builder);
  });
  return out;
}

RenderedSignal render_signal(const ImpulseResponse& h, const Signal& emitted) {
  if (h.fs != emitted.fs) {
    fail(ErrorCode::SampleRateMismatch, "impulse response at " + std::to_string(h.fs) + " Hz, signal at " +
                                            std::to_string(emitted.fs) + " Hz");
  }
  RenderedSignal out;
  out.receiver = h.receiver;
  out.fs = h.fs;
  out.samples = convolve(h.samples, emitted.samples);
  return out;
}

RenderedSignal render_receiver(std::span<const ImpulseResponse> responses, std::uint32_t receiver,
                               const Signal& emitted) {
  RenderedSignal out;
  out.receiver = receiver;
  out.fs = emitted.fs;
  for (const auto& h : responses) {
    if (h.receiver != receiver) continue;
    const auto r = render_signal(h, emitted);
    if (r.samples.size() > out.samples.size()) out.samples.resize(r.samples.size(), 0.0);
    for (std::size_t i = 0; i < r.samples.size(); ++i) out.samples[i] += r.samples[i];
  }
  return out;
}

Signal linear_chirp(double f0, double f1, double duration, double fs) {
  if (!(fs > 0.0) || !(duration > 0.0) || f0 < 0.0 || f1 < 0.0) {
    fail(ErrorCode::InvalidArgument, "chirp needs fs > 0, duration > 0 and non-negative frequencies");
  }
  Signal s;
  s.fs = fs;
  const auto n = static_cast<std::size_t>(std::llround(duration * fs));
  s.samples.resize(n);
  const double sweep = (f1 - f0) / (2.0 * duration);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / fs;
    s.samples[i] = std::sin(kTwoPi * (f0 * t + sweep * t * t));
  }
  return s;
}

void GainTable::validate() const {
  if (empty()) return;
  auto increasing = [](const std::vector<double>& v) {
    for (std::size_t i = 1; i < v.size(); ++i) {
      if (!(v[i] > v[i - 1])) return false;
    }
    return !v.empty();
  };
  if (!increasing(azimuths) || !increasing(elevations)) {
    fail(ErrorCode::InvalidArgument, "gain table axes must be non-empty and strictly increasing");
  }
  if (gains.size() != azimuths.size() * elevations.size() * bins) {
    fail(ErrorCode::InvalidArgument, "gain table has " + std::to_string(gains.size()) + " values, expected " +
                                         std::to_string(azimuths.size() * elevations.size() * bins));
  }
}

namespace {

// Clamped segment lookup: index of the lower node and weight of the upper.
std::pair<std::size_t, double> locate(const std::vector<double>& axis, double x) {
  if (axis.size() == 1 || x <= axis.front()) return {0, 0.0};
  if (x >= axis.back()) return {axis.size() - 1, 0.0};
  const auto hi = static_cast<std::size_t>(std::upper_bound(axis.begin(), axis.end(), x) - axis.begin());
  return {hi - 1, (x - axis[hi - 1]) / (axis[hi] - axis[hi - 1])};
}

}  // namespace

double GainTable::gain(double azimuth, double elevation, std::size_t bin) const {
  if (empty()) return 1.0;
  const auto [a, wa] = locate(azimuths, azimuth);
  const auto [e, we] = locate(elevations, elevation);
  const std::size_t na = azimuths.size();
  auto g = [&](std::size_t ei, std::size_t ai) { return gains[(ei * na + ai) * bins + bin]; };
  const std::size_t a1 = wa > 0.0 ? a + 1 : a;
  const std::size_t e1 = we > 0.0 ? e + 1 : e;
  const double low = (1.0 - wa) * g(e, a) + wa * g(e, a1);
  const double high = (1.0 - wa) * g(e1, a) + wa * g(e1, a1);
  return (1.0 - we) * low + we * high;
}

std::pair<double, double> emitter_frame_angles(const Vec3& departure, const Pose& emitter_pose) {
  const Vec3 d = normalized(emitter_pose.orientation.conjugate().rotate(departure));
  return {std::atan2(d.x, d.z), std::asin(std::clamp(d.y, -1.0, 1.0))};
}

void directional_gain(std::span<double> magnitudes, const Vec3& departure, const Pose& emitter_pose,
                      const GainTable& table) {
  if (table.empty()) return;
  if (magnitudes.size() != table.bins) {
    fail(ErrorCode::GridMismatch, "gain table has " + std::to_string(table.bins) + " bins, contribution has " +
                                      std::to_string(magnitudes.size()));
  }
  const auto [az, el] = emitter_frame_angles(departure, emitter_pose);
  for (std::size_t f = 0; f < magnitudes.size(); ++f) magnitudes[f] *= table.gain(az, el, f);
}

Spectrogram spectrogram(std::span<const double> samples, double fs, std::uint32_t window, std::uint32_t hop) {
  if (window < 2 || hop == 0 || !(fs > 0.0)) {
    fail(ErrorCode::InvalidArgument, "spectrogram needs window >= 2, hop >= 1 and fs > 0");
  }
  Spectrogram s;
  s.fs = fs;
  s.window = window;
  s.hop = hop;
  s.bins = window / 2 + 1;
  s.frames = samples.size() <= window ? 1 : 1 + (samples.size() - window + hop - 1) / hop;
  s.magnitude.resize(s.frames * s.bins);
  std::vector<double> taper(window);
  for (std::uint32_t i = 0; i < window; ++i) taper[i] = 0.5 - 0.5 * std::cos(kTwoPi * i / window);
  std::vector<double> frame(window);
  for (std::size_t k = 0; k < s.frames; ++k) {
    const std::size_t start = k * hop;
    for (std::uint32_t i = 0; i < window; ++i) {
      frame[i] = start + i < samples.size() ? samples[start + i] * taper[i] : 0.0;
    }
    const auto spec = forward_real_fft(frame, window);
    for (std::size_t b = 0; b < s.bins; ++b) s.magnitude[k * s.bins + b] = std::abs(spec[b]);
  }
  return s;
}

Spectrogram spectrogram_difference(const Spectrogram& target, const Spectrogram& baseline) {
  if (target.fs != baseline.fs || target.window != baseline.window || target.hop != baseline.hop) {
    fail(ErrorCode::GridMismatch, "spectrograms differ in sample rate, window or hop");
  }
  Spectrogram d = target;
  d.frames = std::min(target.frames, baseline.frames);
  d.magnitude.resize(d.frames * d.bins);
  for (std::size_t i = 0; i < d.magnitude.size(); ++i) d.magnitude[i] = target.magnitude[i] - baseline.magnitude[i];
  return d;
}

double rms_delay_spread(std::span<const double> samples, double fs) {
  double energy = 0.0;
  double first = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double e = samples[i] * samples[i];
    energy += e;
    first += e * static_cast<double>(i);
  }
  if (energy == 0.0) return 0.0;
  const double mean = first / energy;
  double second = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double dt = static_cast<double>(i) - mean;
    second += dt * dt * samples[i] * samples[i];
  }
  return std::sqrt(second / energy) / fs;
}

}  // namespace sonotrace::synthesis
