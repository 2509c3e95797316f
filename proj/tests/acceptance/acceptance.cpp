// SPDX-FileCopyrightText: Copyright (c) 2026 The SonoTrace Authors
// SPDX-License-Identifier: Apache-2.0

// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any
// failure.

#include <algorithm>
#include <boost/math/distributions/chi_squared.hpp>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "acoustics/components.hpp"
#include "acoustics/contributions.hpp"
#include "acoustics/losses.hpp"
#include "acoustics/pipeline.hpp"
#include "common/error.hpp"
#include "common/parallel.hpp"
#include "oracles.hpp"
#include "preproc/cache.hpp"
#include "preproc/curvature.hpp"
#include "scene/primitives.hpp"
#include "scenes.hpp"
#include "synthesis/synthesis.hpp"
#include "tracer/tracer.hpp"

using namespace sonotrace;
namespace st = sonotrace::testing;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

// Runs a criterion, folds the time bound into the verdict and prints one line.
bool criterion(const std::string& name, double time_limit_s, const std::function<Outcome()>& body) {
  const auto t0 = Clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double t = seconds_since(t0);
  const bool in_time = time_limit_s <= 0.0 || t < time_limit_s;
  const bool pass = o.pass && in_time;
  std::printf("%s  %-24s %s; %.2f s", pass ? "PASS" : "FAIL", name.c_str(), o.detail.c_str(), t);
  if (time_limit_s > 0.0) std::printf(" (limit %.0f s)", time_limit_s);
  std::printf("\n");
  std::fflush(stdout);
  return pass;
}

bool same_bits(const acoustics::ContributionSet& a, const acoustics::ContributionSet& b) {
  if (a.items.size() != b.items.size() || a.magnitudes.size() != b.magnitudes.size()) return false;
  if (a.specular_points != b.specular_points || a.diffraction_points != b.diffraction_points) return false;
  for (std::size_t i = 0; i < a.items.size(); ++i) {
    const auto& x = a.items[i];
    const auto& y = b.items[i];
    if (x.kind != y.kind || x.source != y.source || x.receiver != y.receiver || x.index != y.index) return false;
    if (std::memcmp(&x.position, &y.position, sizeof(Vec3)) != 0) return false;
    if (std::memcmp(&x.path_length, &y.path_length, sizeof(double)) != 0) return false;
  }
  return std::memcmp(a.magnitudes.data(), b.magnitudes.data(), a.magnitudes.size() * sizeof(double)) == 0;
}

// Envelope of the matched filter of `y` against `pulse`, using a quadrature
// copy of the chirp.
std::vector<double> chirp_envelope(std::span<const double> y, double f0, double f1, double duration, double fs) {
  const auto in_phase = synthesis::linear_chirp(f0, f1, duration, fs);
  std::vector<double> quad(in_phase.samples.size());
  for (std::size_t i = 0; i < quad.size(); ++i) {
    const double t = static_cast<double>(i) / fs;
    quad[i] = std::cos(2.0 * std::numbers::pi * (f0 * t + (f1 - f0) * t * t / (2.0 * duration)));
  }
  const auto a = st::naive_correlation(y, in_phase.samples);
  const auto b = st::naive_correlation(y, quad);
  std::vector<double> env(a.size());
  for (std::size_t k = 0; k < env.size(); ++k) env[k] = std::hypot(a[k], b[k]);
  return env;
}

synthesis::ImpulseResponse pair_response(const acoustics::Model& model, const acoustics::ContributionSet& set,
                                         double fs, double signal_duration) {
  const auto& scene = *model.scene;
  const auto grid = synthesis::grid_for_contributions(set, 2.0 * scene.emitters()[0].max_distance, signal_duration, fs);
  const synthesis::SpectrumBuilder builder(grid, scene.frequencies(), scene.speed_of_sound());
  return synthesis::impulse_response(set, 0, 0, builder);
}

Outcome footprint() {
  const std::uint64_t huge = preproc::estimate_footprint(1ull << 26, 20);
  const std::uint64_t expected_huge = 128 + 8ull * (1ull << 26) * (12 + 20);
  const std::uint64_t mib = huge >> 20;

  scene::SceneDescription d;
  d.frequencies = st::linear_bins(25000.0, 23000.0 / 13.0, 14);
  d.materials.push_back(st::uniform_material("m", 14, 0.1, 0.6, 0.9, 0.4));
  // 50 x 100 plate: 10000 triangles.
  d.instances.push_back(
      st::instance("plate", std::make_shared<scene::TriangleMesh>(scene::make_plate(2.0, 2.0, 50, 100)), Pose{}, "m"));
  d.emitters.push_back(st::emitter("tx", {0, 0, 1}, {0, 0, -1}, 1, 14));
  const auto s = scene::Scene::build(d);
  const auto table = preproc::preprocess_scene(s);
  const std::string dir = st::make_temp_dir("accept_cache");
  const std::string path = dir + "/curvature.stc";
  preproc::write_curvature_cache(path, table, s);
  const double on_disk = static_cast<double>(std::filesystem::file_size(path));
  const double formula = 128.0 + 8.0 * 10000.0 * 26.0;
  const double ratio = on_disk / formula;

  const bool pass = huge == expected_huge && mib == 16384 && s.triangle_count() == 10000 && ratio >= 0.5 &&
                    ratio <= 2.0;
  std::ostringstream os;
  os << "estimate(2^26, 20) = " << mib << " MiB + " << (huge - (mib << 20)) << " B; cache " << on_disk << " B vs "
     << formula << " B (ratio " << ratio << ")";
  return {pass, os.str()};
}

Outcome plate_echo() {
  const double fs = 100000.0;
  const auto model = acoustics::Model::prepare(scene::Scene::build(st::plate_echo_description(14, 10000, 40)));
  const auto set = acoustics::simulate(model, {acoustics::kAllComponents, 1, 0});
  const double duration = 0.0025;
  const auto h = pair_response(model, set, fs, duration);
  const auto chirp = synthesis::linear_chirp(25000.0, 50000.0, duration, fs);
  const auto y = synthesis::render_signal(h, chirp);
  const auto env = chirp_envelope(y.samples, 25000.0, 50000.0, duration, fs);
  const auto peak = static_cast<long>(st::argmax_abs(env));
  const auto ir_peak = static_cast<long>(st::argmax_abs(h.samples));
  std::ostringstream os;
  os << "matched-filter peak at sample " << peak << " (IR peak " << ir_peak << "), expected 1000 +/- 1; "
     << set.size() << " contributions";
  return {std::abs(peak - 1000) <= 1, os.str()};
}

Outcome inverse_square() {
  scene::SceneDescription d;
  d.frequencies = {30000.0, 40000.0, 50000.0};
  d.attenuation = {0.0, 0.0, 0.0};
  d.materials.push_back(st::uniform_material("m", 3, 0.1, 0.1, 0.9, 0.9, 0.3));
  d.instances.push_back(st::instance(
      "tri", std::make_shared<scene::TriangleMesh>(scene::TriangleMesh({{0, 5, 5}, {0, 6, 5}, {0, 5, 6}}, {{0, 1, 2}})),
      Pose{}, "m"));
  d.emitters.push_back(st::emitter("tx", {0, 0, 0}, {1, 0, 0}, 1, 3));
  d.receivers.push_back(st::receiver("rx", {0, 0, 0}));
  const auto s = scene::Scene::build(d);
  acoustics::CandidateSet c;
  c.revision = s.revision();
  // Monostatic: a point at distance D gives a total path 2D.
  c.points = {{{0.75, 0, 0}, 0, 0}, {{1.5, 0, 0}, 0, 0}};
  const auto set = acoustics::diffraction_magnitudes(s, c);
  if (set.size() != 2) return {false, "expected 2 contributions, got " + std::to_string(set.size())};
  double worst = 0.0;
  for (std::size_t f = 0; f < 3; ++f) worst = std::max(worst, std::abs(set.magnitude(0)[f] / set.magnitude(1)[f] - 4.0));
  std::ostringstream os;
  os << "r = " << set.items[0].path_length << " m and " << set.items[1].path_length
     << " m; max |ratio - 4| = " << worst;
  return {worst <= 1e-9 && set.items[1].path_length == 2.0 * set.items[0].path_length, os.str()};
}

Outcome curvature() {
  const auto sphere = scene::make_icosphere(1.0, 3);
  const auto g = preproc::vertex_mean_curvature(sphere);
  double worst_sphere = 0.0;
  for (std::size_t v = 0; v < sphere.vertex_count(); ++v) worst_sphere = std::max(worst_sphere, std::abs(g[v] - 1.0));

  const auto plate = scene::make_plate(2.0, 2.0, 20, 20);
  const auto gp = preproc::vertex_mean_curvature(plate);
  scene::MaterialSpec m = st::uniform_material("m", 1, 0.1, 0.6, 0.9, 0.4);
  const auto metric = preproc::triangle_curvature_metric(plate, gp, m);
  double worst_plate = 0.0;
  std::size_t interior = 0;
  for (std::size_t t = 0; t < plate.triangle_count(); ++t) {
    const auto& tri = plate.triangles()[t];
    if (plate.is_boundary_vertex(tri[0]) || plate.is_boundary_vertex(tri[1]) || plate.is_boundary_vertex(tri[2])) {
      continue;
    }
    ++interior;
    worst_plate = std::max(worst_plate, metric.metric[t]);
  }
  std::ostringstream os;
  os << "icosphere max |G - 1| = " << worst_sphere << " over " << sphere.vertex_count() << " vertices; plate max C = "
     << worst_plate << " over " << interior << " interior triangles";
  return {worst_sphere <= 0.05 && worst_plate < 1e-9 && interior > 0, os.str()};
}

Outcome brdf_anchors() {
  double worst = 0.0;
  for (double beta : {0.02, 0.1, 0.35, 1.0}) {
    for (double k : {0.1, 0.5, 0.9, 1.0}) {
      worst = std::max(worst, std::abs(acoustics::specular_intensity(0.0, beta, k) - k));
      const double ratio = acoustics::specular_intensity(beta, beta, k) / acoustics::specular_intensity(0.0, beta, k);
      worst = std::max(worst, std::abs(ratio - std::exp(-0.5)));
    }
  }
  return {worst <= 1e-12, "max anchor error " + fmt("%.3g", worst)};
}

Outcome sampling_chi_square() {
  auto d = st::plate_echo_description(2, 10, 1);
  d.materials[0] = st::uniform_material("polished", 2, 0.1, 0.6, 0.9, 0.4, 0.1);
  d.instances[0].mesh = std::make_shared<scene::TriangleMesh>(st::bumpy_plate(2.0, 12, 16, 0.08, 3, 8, 4));
  const auto s = scene::Scene::build(d);
  const auto table = preproc::preprocess_scene(s);
  const std::uint32_t draws = 100000;
  const auto c = acoustics::sample_diffraction_candidates(s, table, 0, draws, 2024);
  if (c.points.size() != draws) return {false, "drew " + std::to_string(c.points.size())};

  const std::size_t tris = table.triangle_count();
  std::vector<double> observed(tris, 0.0);
  for (const auto& p : c.points) observed[p.triangle] += 1.0;
  double total = 0.0;
  for (double m : table.metric) total += m;

  // Merge consecutive triangles until each group expects at least 5 draws.
  std::vector<double> exp_groups, obs_groups;
  double e = 0.0, o = 0.0;
  for (std::size_t t = 0; t < tris; ++t) {
    e += draws * table.metric[t] / total;
    o += observed[t];
    if (e >= 5.0) {
      exp_groups.push_back(e);
      obs_groups.push_back(o);
      e = o = 0.0;
    }
  }
  if (!exp_groups.empty()) {
    exp_groups.back() += e;
    obs_groups.back() += o;
  }
  double chi2 = 0.0;
  for (std::size_t i = 0; i < exp_groups.size(); ++i) {
    chi2 += (obs_groups[i] - exp_groups[i]) * (obs_groups[i] - exp_groups[i]) / exp_groups[i];
  }
  const double dof = static_cast<double>(exp_groups.size() - 1);
  const double p = boost::math::cdf(boost::math::complement(boost::math::chi_squared(dof), chi2));
  std::ostringstream os;
  os << "chi2 = " << chi2 << " with " << dof << " dof over " << tris << " triangles, p = " << p;
  return {p > 0.01, os.str()};
}

Outcome oracle_equivalence() {
  auto d = st::plate_echo_description(3, 3000, 8);
  d.materials[0] = st::uniform_material("polished", 3, 0.1, 0.6, 0.9, 0.4, 0.2);
  d.attenuation = {0.1, 0.2, 0.3};
  d.instances[0].mesh = std::make_shared<scene::TriangleMesh>(st::bumpy_plate(2.0, 8, 6, 0.1, 3, 8, 7));
  d.instances.push_back(st::instance(
      "ball", std::make_shared<scene::TriangleMesh>(scene::make_icosphere(0.2, 2)), st::translation({0.5, 0.3, 1.0}),
      "polished"));
  d.emitters[0].diffraction_candidates = 200;
  d.emitters.push_back(st::emitter("tx2", {0.3, 0.1, 0.2}, {0.1, 0.0, 1.0}, 2000, 3, 0.7));
  d.emitters[1].diffraction_candidates = 150;
  d.receivers.push_back(st::receiver("left", {-0.4, 0.0, 0.1}));
  d.receivers.push_back(st::receiver("right", {0.4, -0.2, 0.2}));
  d.receivers.push_back(st::receiver("up", {0.0, 0.5, 0.0}));
  const auto model = acoustics::Model::prepare(scene::Scene::build(d));
  const auto& s = *model.scene;
  const auto ref = st::reference_simulate(s, *model.curvature, acoustics::kAllComponents, 31);
  const auto par = acoustics::simulate(model, {acoustics::kAllComponents, 31, 4});
  std::ostringstream os;
  os << s.triangle_count() << " triangles, " << s.emitters().size() << " emitters, " << s.receivers().size()
     << " receivers, " << s.frequencies().size() << " bins; " << ref.size() << " contributions (N = "
     << ref.specular_points << ", O = " << ref.diffraction_points << ")";
  const bool shape = s.triangle_count() <= 1000 && s.emitters().size() == 2 && s.receivers().size() == 4 &&
                     s.frequencies().size() == 3 && ref.specular_points > 0 && ref.diffraction_points > 0;
  return {shape && same_bits(par, ref), os.str()};
}

Outcome roughness() {
  const double fs = 100000.0;
  const double duration = 0.0025;
  const auto components = acoustics::kSpecular | acoustics::kDiffraction;
  auto make = [&](bool bumps) {
    auto d = st::plate_echo_description(14, 10000, 40);
    d.materials[0] = st::uniform_material("polished", 14, 0.05, 0.6, 0.9, 0.4, 0.1);
    if (bumps) {
      // The bumps are a separate object resting on the plate.
      auto strewn = d.instances[0];
      strewn.id = "bumps";
      strewn.mesh = std::make_shared<scene::TriangleMesh>(st::bump_field(2.0, 200, 0.03, 4, 10, 11));
      d.instances.push_back(std::move(strewn));
    }
    return acoustics::Model::prepare(scene::Scene::build(d));
  };
  const auto bare = make(false);
  const auto rough = make(true);
  const auto bare_set = acoustics::simulate(bare, {components, 3, 0});
  const auto rough_set = acoustics::simulate(rough, {components, 3, 0});
  const auto h_bare = pair_response(bare, bare_set, fs, duration);
  const auto h_rough = pair_response(rough, rough_set, fs, duration);
  const double spread_bare = synthesis::rms_delay_spread(h_bare.samples, fs);
  const double spread_rough = synthesis::rms_delay_spread(h_rough.samples, fs);

  const auto chirp = synthesis::linear_chirp(25000.0, 50000.0, duration, fs);
  const auto y_bare = synthesis::render_signal(h_bare, chirp);
  const auto y_rough = synthesis::render_signal(h_rough, chirp);
  const auto sg_bare = synthesis::spectrogram(y_bare.samples, fs, 256, 64);
  const auto sg_rough = synthesis::spectrogram(y_rough.samples, fs, 256, 64);
  const auto diff = synthesis::spectrogram_difference(sg_rough, sg_bare);
  double energy = 0.0;
  bool finite = true;
  for (double v : diff.magnitude) {
    finite = finite && std::isfinite(v);
    energy += v * v;
  }
  std::ostringstream os;
  os << "RMS spread bare " << spread_bare * 1e6 << " us, bumps " << spread_rough * 1e6 << " us ("
     << rough.scene->triangle_count() << " triangles); difference spectrogram " << diff.frames << "x" << diff.bins
     << ", energy " << energy;
  return {spread_rough > spread_bare && finite && energy > 0.0 && diff.frames > 0, os.str()};
}

// Walls of a 4 x 3 x 2.5 m room around a bumpy floor patch.
scene::SceneDescription room(std::uint32_t rays, std::size_t receivers, std::size_t bins) {
  scene::SceneDescription d;
  d.frequencies = st::linear_bins(25000.0, 23000.0 / static_cast<double>(std::max<std::size_t>(bins - 1, 1)), bins);
  d.materials.push_back(st::uniform_material("wall", bins, 0.1, 0.6, 0.9, 0.4, 0.05));
  d.attenuation.assign(bins, 0.3);
  auto box = std::make_shared<scene::TriangleMesh>(scene::make_box(4.0, 3.0, 2.5, 12));
  d.instances.push_back(st::instance("room", box, st::translation({0, 0, 1.25}), "wall"));
  auto patch = std::make_shared<scene::TriangleMesh>(st::bumpy_plate(1.5, 16, 40, 0.04, 3, 8, 5));
  d.instances.push_back(st::instance("patch", patch, st::translation({0.5, 0.2, 0.01}), "wall"));
  d.emitters.push_back(st::emitter("tx", {-1.0, 0.0, 1.2}, {1.0, 0.1, -0.3}, rays, bins));
  d.emitters[0].max_bounces = 2;
  for (std::size_t m = 0; m < receivers; ++m) {
    const double a = 2.0 * std::numbers::pi * static_cast<double>(m) / static_cast<double>(receivers);
    d.receivers.push_back(st::receiver("rx" + std::to_string(m), {-1.0 + 0.1 * std::cos(a), 0.1 * std::sin(a), 1.25}));
  }
  return d;
}

Outcome performance() {
  const auto t0 = Clock::now();
  const auto model = acoustics::Model::prepare(scene::Scene::build(room(80000, 32, 14)));
  const double prep = seconds_since(t0);
  const auto t1 = Clock::now();
  const auto set = acoustics::simulate(model, {acoustics::kAllComponents, 9, 0});
  const double sim = seconds_since(t1);
  std::ostringstream os;
  os << model.scene->triangle_count() << " triangles, 80000 rays, 2 bounces, 14 bins, 32 receivers: prepare "
     << fmt("%.2f", prep) << " s, simulate " << fmt("%.2f", sim) << " s, " << set.size() << " contributions on "
     << default_worker_count() << " worker(s)";
  return {set.specular_points > 0 && set.size() > 0, os.str()};
}

// Median wall time of the specular magnitude stage over `runs` runs.
double magnitude_stage_time(const scene::SceneDescription& d, int runs) {
  const auto s = scene::Scene::build(d);
  const auto curv = preproc::preprocess_scene(s);
  const auto hits = tracer::trace_specular(s, 0);
  std::vector<double> times;
  for (int i = 0; i < runs; ++i) {
    const auto t0 = Clock::now();
    const auto set = acoustics::specular_magnitudes(s, hits, curv, 1);
    times.push_back(seconds_since(t0));
    if (set.size() == 0) return 0.0;
  }
  std::nth_element(times.begin(), times.begin() + runs / 2, times.end());
  return times[runs / 2];
}

Outcome complexity() {
  const int runs = 5;
  const std::uint32_t rays = 6000;
  const std::size_t receivers = 8, bins = 14;
  const double base = magnitude_stage_time(room(rays, receivers, bins), runs);
  const double r_rays = magnitude_stage_time(room(2 * rays, receivers, bins), runs) / base;
  const double r_recv = magnitude_stage_time(room(rays, 2 * receivers, bins), runs) / base;
  const double r_bins = magnitude_stage_time(room(rays, receivers, 2 * bins), runs) / base;
  auto ok = [](double r) { return r >= 1.0 && r <= 4.0; };
  std::ostringstream os;
  os << "base " << fmt("%.3f", base) << " s; x2 rays " << fmt("%.2f", r_rays) << ", x2 receivers "
     << fmt("%.2f", r_recv) << ", x2 bins " << fmt("%.2f", r_bins) << " (allowed [1, 4])";
  return {base > 0.0 && ok(r_rays) && ok(r_recv) && ok(r_bins), os.str()};
}

}  // namespace

int main() {
  set_warning_handler([](std::string_view) {});
  int failed = 0;
  auto run = [&](const std::string& name, double limit, const std::function<Outcome()>& f) {
    if (!criterion(name, limit, f)) ++failed;
  };
  run("footprint", 1.0, footprint);
  run("plate-echo-delay", 10.0, plate_echo);
  run("inverse-square", 1.0, inverse_square);
  run("curvature", 5.0, curvature);
  run("brdf-anchors", 0.0, brdf_anchors);
  run("sampling-chi-square", 10.0, sampling_chi_square);
  run("oracle-equivalence", 30.0, oracle_equivalence);
  run("roughness-effect", 60.0, roughness);
  run("performance-smoke", 60.0, performance);
  run("complexity", 0.0, complexity);
  std::printf("%d of 10 criteria failed\n", failed);
  return failed == 0 ? 0 : 1;
}
