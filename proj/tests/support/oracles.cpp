// SPDX-FileCopyrightText: Copyright (c) 2026 The SonoTrace Authors
// SPDX-License-Identifier: Apache-2.0

#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <numbers>
#include <random>
#include <stdexcept>

#include "acoustics/losses.hpp"
#include "common/rng.hpp"
#include "tracer/tracer.hpp"

namespace sonotrace::testing {

std::optional<scene::RayHit> brute_closest(const scene::Scene& scene, const Ray& ray, double tmin, double tmax) {
  std::optional<scene::RayHit> best;
  const auto corners = scene.corners();
  for (std::uint32_t id = 0; id < corners.size(); ++id) {
    const auto t = scene::intersect_triangle(ray, corners[id].v0, corners[id].v1, corners[id].v2, tmin, tmax);
    if (!t) continue;
    if (!best || *t < best->t || (*t == best->t && id < best->triangle)) best = scene::RayHit{*t, id};
  }
  return best;
}

bool brute_line_of_sight(const scene::Scene& scene, const Vec3& a, const Vec3& b) {
  const Vec3 d = b - a;
  const double len = norm(d);
  const double eps = scene.epsilon();
  if (len <= 2.0 * eps) return true;
  const Ray ray{a, d / len};
  for (const auto& c : scene.corners()) {
    if (scene::intersect_triangle(ray, c.v0, c.v1, c.v2, eps, len - eps)) return false;
  }
  return true;
}

std::vector<double> naive_vertex_curvature(const scene::TriangleMesh& mesh) {
  const auto& tris = mesh.triangles();
  std::vector<double> out(mesh.vertex_count(), 0.0);
  for (std::size_t v = 0; v < mesh.vertex_count(); ++v) {
    const Vec3 pv = mesh.vertices()[v];
    Vec3 lap;
    double area = 0.0;
    for (std::size_t t = 0; t < tris.size(); ++t) {
      if (mesh.is_degenerate(t)) continue;
      int slot = -1;
      for (int c = 0; c < 3; ++c) {
        if (tris[t][c] == v) slot = c;
      }
      if (slot < 0) continue;
      const Vec3 pa = mesh.vertices()[tris[t][(slot + 1) % 3]];
      const Vec3 pb = mesh.vertices()[tris[t][(slot + 2) % 3]];
      auto corner_angle = [](const Vec3& at, const Vec3& p, const Vec3& q) {
        const Vec3 u = normalized(p - at);
        const Vec3 w = normalized(q - at);
        return std::acos(std::clamp(dot(u, w), -1.0, 1.0));
      };
      const double angle_v = corner_angle(pv, pa, pb);
      const double angle_a = corner_angle(pa, pb, pv);
      const double angle_b = corner_angle(pb, pv, pa);
      // Edge v-a is opposite b, edge v-b is opposite a.
      lap += (pv - pa) / std::tan(angle_b);
      lap += (pv - pb) / std::tan(angle_a);
      const double tri_area = 0.5 * norm(cross(pa - pv, pb - pv));
      const double right = std::numbers::pi / 2.0;
      if (angle_v > right) {
        area += tri_area / 2.0;
      } else if (angle_a > right || angle_b > right) {
        area += tri_area / 4.0;
      } else {
        area += (dot(pa - pv, pa - pv) / std::tan(angle_b) + dot(pb - pv, pb - pv) / std::tan(angle_a)) / 8.0;
      }
    }
    if (area > 0.0) out[v] = 0.5 * norm(lap / (2.0 * area));
  }
  return out;
}

preproc::CurvatureTable reference_curvature(const scene::Scene& scene) {
  preproc::CurvatureTable t;
  const std::size_t bins = scene.bin_count();
  const std::size_t n = scene.triangle_count();
  t.bins = static_cast<std::uint32_t>(bins);
  t.metric.assign(n, 0.0);
  t.variation.assign(n, 0.0);
  t.g_min.assign(n, 0.0);
  t.g_max.assign(n, 0.0);
  t.area.assign(n, 0.0);
  t.area_weight.assign(n, 0.0);
  t.beta.assign(n * bins, 0.0);
  t.k.assign(n * bins, 0.0);
  for (const auto& inst : scene.instances()) {
    const auto& material = scene.materials()[inst.material];
    const scene::TriangleMesh local = inst.source->transformed(Pose{}, inst.scale);
    const auto g = preproc::vertex_mean_curvature(local);
    const auto m = preproc::triangle_curvature_metric(local, g, material);
    for (std::size_t i = 0; i < inst.world.triangle_count(); ++i) {
      const std::size_t id = inst.first_triangle + i;
      t.metric[id] = m.metric[i];
      t.variation[id] = m.variation[i];
      t.g_min[id] = m.g_min[i];
      t.g_max[id] = m.g_max[i];
      t.area[id] = local.areas()[i];
      t.area_weight[id] = m.area_weight[i];
      for (std::size_t f = 0; f < bins; ++f) {
        const auto p = preproc::map_brdf(m.metric[i], material, f);
        t.beta[id * bins + f] = p.beta;
        t.k[id * bins + f] = p.k;
      }
    }
  }
  return t;
}

namespace {

struct RefHit {
  std::uint32_t ray;
  Vec3 position;
  std::uint32_t triangle;
  double path_length;
  Vec3 reflection;
};

std::vector<RefHit> reference_trace(const scene::Scene& scene, const scene::Emitter& emitter) {
  std::vector<RefHit> hits;
  const auto dirs = tracer::emitter_directions(emitter);
  const double eps = scene.epsilon();
  for (std::uint32_t i = 0; i < dirs.size(); ++i) {
    Vec3 origin = emitter.pose.position;
    Vec3 previous = origin;
    Vec3 dir = dirs[i];
    double r_total = 0.0;
    for (std::uint32_t bounce = 0; bounce <= emitter.max_bounces; ++bounce) {
      const auto hit = brute_closest(scene, {origin, dir}, 0.0, emitter.max_distance - r_total + eps);
      if (!hit) break;
      const Vec3 p = origin + dir * hit->t;
      const double step = distance(previous, p);
      if (r_total + step > emitter.max_distance) break;
      r_total += step;
      const Vec3 n = scene.triangle_normal(hit->triangle);
      const Vec3 refl = normalized(dir - 2.0 * dot(dir, n) * n);
      hits.push_back({i, p, hit->triangle, r_total, refl});
      if (r_total >= emitter.max_distance) break;
      origin = p + n * ((dot(refl, n) >= 0.0 ? 1.0 : -1.0) * eps);
      previous = p;
      dir = refl;
    }
  }
  return hits;
}

void push(acoustics::ContributionSet& set, acoustics::ContributionKind kind, std::uint32_t s, std::uint32_t m,
          std::uint32_t index, const Vec3& pos, double r, const std::vector<double>& mags) {
  acoustics::Contribution c;
  c.kind = kind;
  c.source = s;
  c.receiver = m;
  c.index = index;
  c.position = pos;
  c.path_length = r;
  set.items.push_back(c);
  set.magnitudes.insert(set.magnitudes.end(), mags.begin(), mags.end());
}

struct RefCandidate {
  Vec3 position;
  std::uint32_t triangle;
};

}  // namespace

acoustics::ContributionSet reference_simulate(const scene::Scene& scene, const preproc::CurvatureTable& curvature,
                                              std::uint32_t components, std::uint64_t seed) {
  using acoustics::atmospheric_loss;
  using acoustics::geometric_loss;
  acoustics::ContributionSet out;
  out.revision = scene.revision();
  out.sources = static_cast<std::uint32_t>(scene.emitters().size());
  out.receivers = static_cast<std::uint32_t>(scene.receivers().size());
  out.bins = static_cast<std::uint32_t>(scene.bin_count());
  out.speed_of_sound = scene.speed_of_sound();
  out.frequencies.assign(scene.frequencies().begin(), scene.frequencies().end());
  const std::size_t F = out.bins;
  const auto alpha = scene.attenuation();

  if (components & acoustics::kSpecular) {
    for (std::uint32_t s = 0; s < out.sources; ++s) {
      const auto hits = reference_trace(scene, scene.emitters()[s]);
      out.specular_points += hits.size();
      for (std::uint32_t m = 0; m < out.receivers; ++m) {
        const Vec3 rx = scene.receivers()[m].pose.position;
        for (std::uint32_t n = 0; n < hits.size(); ++n) {
          const auto& h = hits[n];
          if (!brute_line_of_sight(scene, h.position, rx)) continue;
          const double r = h.path_length + norm(rx - h.position);
          const double gamma = angle_between(h.reflection, rx - h.position);
          std::vector<double> mags(F);
          for (std::size_t f = 0; f < F; ++f) {
            const double beta = curvature.beta[h.triangle * F + f];
            const double k = curvature.k[h.triangle * F + f];
            mags[f] = geometric_loss(r) * atmospheric_loss(r, alpha[f]) *
                      (std::exp(-(gamma * gamma) / (2.0 * beta * beta)) * k);
          }
          push(out, acoustics::ContributionKind::Specular, s, m, n, h.position, r, mags);
        }
      }
    }
  }

  if (components & acoustics::kDiffraction) {
    for (std::uint32_t s = 0; s < out.sources; ++s) {
      const auto& e = scene.emitters()[s];
      std::vector<RefCandidate> kept;
      for (std::uint32_t i = 0; i < scene.instances().size(); ++i) {
        const auto& inst = scene.instances()[i];
        // Cone against bounding sphere.
        bool in_frustum = e.frustum_half_angle >= std::numbers::pi;
        if (!in_frustum) {
          const Aabb box = inst.world.bounds();
          const double radius = 0.5 * norm(box.extent());
          const Vec3 v = box.center() - e.pose.position;
          const double d = norm(v);
          const Vec3 axis = e.pose.orientation.rotate({0.0, 0.0, 1.0});
          in_frustum = d <= radius ||
                       angle_between(axis, v) <= e.frustum_half_angle + std::asin(std::min(1.0, radius / d));
        }
        if (!in_frustum || e.diffraction_candidates == 0) continue;
        const std::size_t nt = inst.world.triangle_count();
        double sum = 0.0;
        std::size_t usable = 0;
        for (std::size_t t = 0; t < nt; ++t) {
          if (inst.world.is_degenerate(t)) continue;
          sum += curvature.metric[inst.first_triangle + t];
          ++usable;
        }
        if (!(sum > 0.0)) continue;
        Rng rng(derive_seed(seed, s, i));
        const double dither = 1e-3 * sum / static_cast<double>(usable);
        std::vector<double> cdf(nt);
        double acc = 0.0;
        for (std::size_t t = 0; t < nt; ++t) {
          const double u = rng.uniform();
          if (!inst.world.is_degenerate(t)) acc += curvature.metric[inst.first_triangle + t] + u * dither;
          cdf[t] = acc;
        }
        for (std::uint32_t c = 0; c < e.diffraction_candidates; ++c) {
          const double target = rng.uniform() * acc;
          std::size_t t = 0;
          while (t < nt && !(cdf[t] > target)) ++t;
          if (t == nt) t = nt - 1;
          const double r1 = rng.uniform();
          const double r2 = rng.uniform();
          const double sq = std::sqrt(r1);
          const Vec3 p = inst.world.corner(t, 0) * (1.0 - sq) + inst.world.corner(t, 1) * (sq * (1.0 - r2)) +
                         inst.world.corner(t, 2) * (sq * r2);
          const auto id = static_cast<std::uint32_t>(inst.first_triangle + t);
          const Vec3 to_source = e.pose.position - p;
          if (norm(to_source) == 0.0) continue;
          if (angle_between(scene.triangle_normal(id), to_source) > e.max_incidence) continue;
          if (!brute_line_of_sight(scene, p, e.pose.position)) continue;
          kept.push_back({p, id});
        }
      }
      out.diffraction_points += kept.size();
      for (std::uint32_t m = 0; m < out.receivers; ++m) {
        const Vec3 rx = scene.receivers()[m].pose.position;
        for (std::uint32_t o = 0; o < kept.size(); ++o) {
          if (!brute_line_of_sight(scene, kept[o].position, rx)) continue;
          const double r = distance(e.pose.position, kept[o].position) + distance(kept[o].position, rx);
          const auto& mat = scene.triangle_material(kept[o].triangle);
          std::vector<double> mags(F);
          for (std::size_t f = 0; f < F; ++f) {
            mags[f] = geometric_loss(r) * atmospheric_loss(r, alpha[f]) * mat.diffraction[f];
          }
          push(out, acoustics::ContributionKind::Diffraction, s, m, o, kept[o].position, r, mags);
        }
      }
    }
  }

  if (components & acoustics::kPassive) {
    for (std::uint32_t s = 0; s < out.sources; ++s) {
      const auto& e = scene.emitters()[s];
      for (std::uint32_t m = 0; m < out.receivers; ++m) {
        const Vec3 rx = scene.receivers()[m].pose.position;
        const double r = distance(e.pose.position, rx);
        if (r <= scene.epsilon() || !brute_line_of_sight(scene, e.pose.position, rx)) continue;
        std::vector<double> mags(F);
        for (std::size_t f = 0; f < F; ++f) {
          mags[f] = geometric_loss(r) * atmospheric_loss(r, alpha[f]) * e.source_level[f];
        }
        push(out, acoustics::ContributionKind::Passive, s, m, 0, rx, r, mags);
      }
    }
  }
  return out;
}

std::vector<double> naive_inverse_dft(std::span<const std::complex<double>> spectrum, std::size_t n,
                                      double* imag_residue) {
  // Rebuild the full Hermitian spectrum, then sum directly.
  std::vector<std::complex<double>> full(n);
  for (std::size_t k = 0; k <= n / 2; ++k) full[k] = spectrum[k];
  full[0] = full[0].real();
  if (n % 2 == 0) full[n / 2] = full[n / 2].real();
  for (std::size_t k = n / 2 + 1; k < n; ++k) full[k] = std::conj(full[n - k]);
  std::vector<double> out(n);
  double worst = 0.0;
  for (std::size_t t = 0; t < n; ++t) {
    std::complex<double> acc = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      const double angle = 2.0 * std::numbers::pi * static_cast<double>((k * t) % n) / static_cast<double>(n);
      acc += full[k] * std::complex<double>(std::cos(angle), std::sin(angle));
    }
    acc /= static_cast<double>(n);
    out[t] = acc.real();
    worst = std::max(worst, std::abs(acc.imag()));
  }
  if (imag_residue) *imag_residue = worst;
  return out;
}

std::vector<double> naive_correlation(std::span<const double> x, std::span<const double> t) {
  if (t.size() > x.size()) return {};
  std::vector<double> out(x.size() - t.size() + 1, 0.0);
  for (std::size_t k = 0; k < out.size(); ++k) {
    double acc = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i) acc += x[i + k] * t[i];
    out[k] = acc;
  }
  return out;
}

std::vector<double> naive_convolution(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) return {};
  std::vector<double> out(a.size() + b.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
  }
  return out;
}

std::size_t argmax_abs(std::span<const double> v) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (std::abs(v[i]) > std::abs(v[best])) best = i;
  }
  return best;
}

namespace {

struct Cursor {
  std::span<const std::uint8_t> b;
  std::size_t pos = 0;
  template <typename T>
  T take() {
    if (pos + sizeof(T) > b.size()) throw std::runtime_error("export truncated");
    T v;
    std::memcpy(&v, b.data() + pos, sizeof(T));  // little-endian host
    pos += sizeof(T);
    return v;
  }
};

}  // namespace

DecodedExport decode_export(std::span<const std::uint8_t> bytes) {
  Cursor c{bytes};
  if (bytes.size() < 4 || std::memcmp(bytes.data(), "STPC", 4) != 0) throw std::runtime_error("bad export magic");
  c.pos = 4;
  DecodedExport d{};
  d.version = c.take<std::uint16_t>();
  d.components = c.take<std::uint16_t>();
  d.sources = c.take<std::uint32_t>();
  d.receivers = c.take<std::uint32_t>();
  d.bins = c.take<std::uint32_t>();
  d.specular_points = c.take<std::uint64_t>();
  d.diffraction_points = c.take<std::uint64_t>();
  const auto count = c.take<std::uint64_t>();
  d.revision = c.take<std::uint64_t>();
  d.seed = c.take<std::uint64_t>();
  d.speed_of_sound = c.take<double>();
  for (std::uint32_t f = 0; f < d.bins; ++f) d.frequencies.push_back(c.take<double>());
  for (std::uint64_t i = 0; i < count; ++i) {
    DecodedRecord r;
    r.kind = c.take<std::uint8_t>();
    r.source = c.take<std::uint32_t>();
    r.receiver = c.take<std::uint32_t>();
    for (double& p : r.position) p = c.take<double>();
    r.path_length = c.take<double>();
    r.index = c.take<std::uint32_t>();
    for (std::uint32_t f = 0; f < d.bins; ++f) r.magnitudes.push_back(c.take<double>());
    d.records.push_back(std::move(r));
  }
  if (c.pos != bytes.size()) throw std::runtime_error("trailing bytes after export");
  return d;
}

std::string make_temp_dir(const std::string& tag) {
  static std::mt19937_64 gen(std::random_device{}());
  for (;;) {
    const auto dir = std::filesystem::temp_directory_path() / ("sonotrace_" + tag + "_" + std::to_string(gen() % 1000000000));
    if (std::filesystem::create_directory(dir)) return dir.string();
  }
}

}  // namespace sonotrace::testing
