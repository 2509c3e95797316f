// SPDX-FileCopyrightText: Copyright (c) 2026 The SonoTrace Authors
// SPDX-License-Identifier: Apache-2.0

#include "scene/scene_config.hpp"

#include <fstream>
#include <map>

#include "common/error.hpp"
#include "scene/mesh_io.hpp"
#include "scene/primitives.hpp"

namespace sonotrace::scene {

using nlohmann::json;

namespace {

[[noreturn]] void config_error(const std::string& what) { fail(ErrorCode::InvalidConfig, what); }

template <typename T>
T get_or(const json& obj, const char* key, T fallback) {
  if (!obj.contains(key) || obj.at(key).is_null()) return fallback;
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception& e) {
    config_error(std::string("key '") + key + "': " + e.what());
  }
}

Vec3 parse_vec3(const json& v, const std::string& what) {
  if (!v.is_array() || v.size() != 3) config_error(what + " must be an array of three numbers");
  try {
    return {v[0].get<double>(), v[1].get<double>(), v[2].get<double>()};
  } catch (const json::exception&) {
    config_error(what + " must be an array of three numbers");
  }
}

Pose parse_pose(const json& obj, const std::string& who) {
  Pose pose;
  if (obj.contains("position")) pose.position = parse_vec3(obj.at("position"), who + " position");
  if (obj.contains("orientation")) {
    const auto& q = obj.at("orientation");
    if (!q.is_array() || q.size() != 4) config_error(who + " orientation must be [w, x, y, z]");
    pose.orientation = {q[0].get<double>(), q[1].get<double>(), q[2].get<double>(), q[3].get<double>()};
  } else if (obj.contains("direction")) {
    const Vec3 d = parse_vec3(obj.at("direction"), who + " direction");
    if (norm(d) == 0.0) config_error(who + " direction must be non-zero");
    pose.orientation = rotation_from_boresight(d);
  }
  return pose;
}

// Scalars broadcast to every bin; arrays must match the bin count (checked
// again at build).
std::vector<double> per_bin(const json& obj, const char* key, double fallback, std::size_t bins) {
  if (!obj.contains(key) || obj.at(key).is_null()) return std::vector<double>(bins, fallback);
  const auto& v = obj.at(key);
  if (v.is_number()) return std::vector<double>(bins, v.get<double>());
  if (!v.is_array()) config_error(std::string("'") + key + "' must be a number or an array");
  try {
    return v.get<std::vector<double>>();
  } catch (const json::exception&) {
    config_error(std::string("'") + key + "' must contain numbers");
  }
}

std::vector<double> parse_frequencies(const json& doc) {
  if (!doc.contains("frequencies")) fail(ErrorCode::InvalidFrequencyGrid, "scene has no 'frequencies'");
  const auto& f = doc.at("frequencies");
  if (f.is_array()) {
    try {
      return f.get<std::vector<double>>();
    } catch (const json::exception&) {
      fail(ErrorCode::InvalidFrequencyGrid, "'frequencies' must contain numbers");
    }
  }
  if (f.is_object()) {
    const double start = get_or(f, "start", 0.0);
    const double stop = get_or(f, "stop", 0.0);
    const auto count = get_or<std::int64_t>(f, "count", 0);
    if (count < 1) fail(ErrorCode::InvalidFrequencyGrid, "'frequencies.count' must be >= 1");
    std::vector<double> out(static_cast<std::size_t>(count));
    for (std::int64_t i = 0; i < count; ++i) {
      out[i] = count == 1 ? start : start + (stop - start) * static_cast<double>(i) / static_cast<double>(count - 1);
    }
    return out;
  }
  fail(ErrorCode::InvalidFrequencyGrid, "'frequencies' must be an array or {start, stop, count}");
}

std::uint32_t get_u32(const json& obj, const char* key, std::uint32_t fallback) {
  const auto v = get_or<std::int64_t>(obj, key, fallback);
  if (v < 0 || v > std::numeric_limits<std::uint32_t>::max()) config_error(std::string("'") + key + "' out of range");
  return static_cast<std::uint32_t>(v);
}

TriangleMesh make_primitive(const json& p) {
  const auto type = get_or<std::string>(p, "type", "");
  if (type == "plate") {
    return make_plate(get_or(p, "width", 1.0), get_or(p, "height", 1.0), get_u32(p, "nx", 1), get_u32(p, "ny", 1));
  }
  if (type == "box") {
    return make_box(get_or(p, "sx", 1.0), get_or(p, "sy", 1.0), get_or(p, "sz", 1.0), get_u32(p, "divisions", 1));
  }
  if (type == "beveled_box") return make_beveled_box(get_or(p, "half", 0.5), get_u32(p, "divisions", 8));
  if (type == "icosphere") return make_icosphere(get_or(p, "radius", 1.0), get_u32(p, "subdivisions", 3));
  if (type == "hemisphere") {
    return make_hemisphere(get_or(p, "radius", 1.0), get_u32(p, "rings", 8), get_u32(p, "segments", 16));
  }
  config_error("unknown primitive type '" + type + "'");
}

std::uint64_t primitive_triangles(const json& p) {
  const auto type = get_or<std::string>(p, "type", "");
  if (type == "plate") return plate_triangle_count(get_u32(p, "nx", 1), get_u32(p, "ny", 1));
  if (type == "box") return box_triangle_count(get_u32(p, "divisions", 1));
  if (type == "beveled_box") return box_triangle_count(get_u32(p, "divisions", 8));
  if (type == "icosphere") return icosphere_triangle_count(get_u32(p, "subdivisions", 3));
  if (type == "hemisphere") return hemisphere_triangle_count(get_u32(p, "rings", 8), get_u32(p, "segments", 16));
  config_error("unknown primitive type '" + type + "'");
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  const std::filesystem::path path(p);
  return path.is_absolute() ? path : base / path;
}

const json& array_or_empty(const json& doc, const char* key) {
  static const json empty = json::array();
  if (!doc.contains(key)) return empty;
  if (!doc.at(key).is_array()) config_error(std::string("'") + key + "' must be an array");
  return doc.at(key);
}

json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::IoError, "cannot open scene file '" + path + "'");
  try {
    return json::parse(in, nullptr, true, true);
  } catch (const json::parse_error& e) {
    fail(ErrorCode::ParseError, "scene file '" + path + "': " + e.what());
  }
}

json vec_json(const Vec3& v) { return json::array({v.x, v.y, v.z}); }
json quat_json(const Quat& q) { return json::array({q.w, q.x, q.y, q.z}); }

}  // namespace

SceneDescription parse_scene_description(const json& doc, const std::filesystem::path& base_dir) {
  if (!doc.is_object()) config_error("scene document must be a JSON object");
  SceneDescription d;
  d.frequencies = parse_frequencies(doc);
  const std::size_t bins = d.frequencies.size();
  d.speed_of_sound = get_or(doc, "speed_of_sound", kDefaultSpeedOfSound);
  d.attenuation = per_bin(doc, "attenuation", 0.0, bins);

  for (const auto& m : array_or_empty(doc, "materials")) {
    MaterialSpec spec;
    spec.id = get_or<std::string>(m, "id", "");
    spec.eta = get_or(m, "eta", 1.0);
    if (m.contains("area_ref") && !m.at("area_ref").is_null()) spec.area_ref = m.at("area_ref").get<double>();
    spec.c_sat = get_or(m, "c_sat", 1.0);
    spec.beta_smooth = per_bin(m, "beta_smooth", 0.2, bins);
    spec.beta_edge = per_bin(m, "beta_edge", 0.8, bins);
    spec.k_smooth = per_bin(m, "k_smooth", 0.9, bins);
    spec.k_edge = per_bin(m, "k_edge", 0.4, bins);
    spec.diffraction = per_bin(m, "diffraction", 0.1, bins);
    d.materials.push_back(std::move(spec));
  }

  std::map<std::string, std::shared_ptr<const TriangleMesh>> meshes;
  for (const auto& m : array_or_empty(doc, "meshes")) {
    const auto id = get_or<std::string>(m, "id", "");
    if (id.empty()) config_error("mesh entry needs an id");
    std::shared_ptr<const TriangleMesh> mesh;
    if (m.contains("primitive")) {
      mesh = std::make_shared<const TriangleMesh>(make_primitive(m.at("primitive")));
    } else if (m.contains("path")) {
      const auto path = resolve(base_dir, m.at("path").get<std::string>());
      if (!std::filesystem::exists(path)) fail(ErrorCode::MissingMesh, "mesh file '" + path.string() + "' not found");
      const auto fmt = get_or<std::string>(m, "format", "");
      if (fmt.empty()) {
        mesh = std::make_shared<const TriangleMesh>(load_mesh(path.string()));
      } else if (fmt == "obj" || fmt == "OBJ") {
        mesh = std::make_shared<const TriangleMesh>(load_mesh(path.string(), MeshFormat::Obj));
      } else if (fmt == "stl" || fmt == "STL") {
        mesh = std::make_shared<const TriangleMesh>(load_mesh(path.string(), MeshFormat::BinaryStl));
      } else {
        config_error("mesh '" + id + "': unknown format '" + fmt + "'");
      }
    } else {
      config_error("mesh '" + id + "' needs a 'path' or a 'primitive'");
    }
    if (!meshes.emplace(id, std::move(mesh)).second) config_error("duplicate mesh id '" + id + "'");
  }

  for (const auto& inst : array_or_empty(doc, "instances")) {
    InstanceDescription desc;
    desc.id = get_or<std::string>(inst, "id", "");
    desc.mesh_id = get_or<std::string>(inst, "mesh", "");
    const auto it = meshes.find(desc.mesh_id);
    if (it == meshes.end()) {
      fail(ErrorCode::MissingMesh, "instance '" + desc.id + "' references unknown mesh '" + desc.mesh_id + "'");
    }
    desc.mesh = it->second;
    desc.pose = parse_pose(inst, "instance '" + desc.id + "'");
    desc.scale = get_or(inst, "scale", 1.0);
    desc.material = get_or<std::string>(inst, "material", "");
    d.instances.push_back(std::move(desc));
  }

  for (const auto& e : array_or_empty(doc, "emitters")) {
    Emitter em;
    em.id = get_or<std::string>(e, "id", "");
    em.pose = parse_pose(e, "emitter '" + em.id + "'");
    em.rays = get_u32(e, "rays", em.rays);
    em.max_bounces = get_u32(e, "max_bounces", em.max_bounces);
    em.max_distance = get_or(e, "max_distance", em.max_distance);
    em.frustum_half_angle = get_or(e, "frustum_half_angle", em.frustum_half_angle);
    em.source_level = per_bin(e, "source_level", 1.0, bins);
    em.diffraction_candidates = get_u32(e, "diffraction_candidates", em.diffraction_candidates);
    em.max_incidence = get_or(e, "max_incidence", em.max_incidence);
    d.emitters.push_back(std::move(em));
  }

  for (const auto& r : array_or_empty(doc, "receivers")) {
    Receiver rc;
    rc.id = get_or<std::string>(r, "id", "");
    rc.pose = parse_pose(r, "receiver '" + rc.id + "'");
    d.receivers.push_back(std::move(rc));
  }
  return d;
}

Scene build_scene(const json& doc, const std::filesystem::path& base_dir) {
  return Scene::build(parse_scene_description(doc, base_dir));
}

Scene load_scene(const std::string& path) {
  const json doc = read_json(path);
  return build_scene(doc, std::filesystem::path(path).parent_path());
}

SceneCounts describe_scene(const std::string& path) {
  const json doc = read_json(path);
  const auto base = std::filesystem::path(path).parent_path();
  SceneCounts counts;
  counts.bins = parse_frequencies(doc).size();

  std::map<std::string, std::uint64_t> mesh_triangles;
  for (const auto& m : array_or_empty(doc, "meshes")) {
    const auto id = get_or<std::string>(m, "id", "");
    std::uint64_t n = 0;
    if (m.contains("primitive")) {
      n = primitive_triangles(m.at("primitive"));
    } else if (m.contains("path")) {
      const auto p = resolve(base, m.at("path").get<std::string>());
      if (!std::filesystem::exists(p)) fail(ErrorCode::MissingMesh, "mesh file '" + p.string() + "' not found");
      n = count_mesh_triangles(p.string());
    }
    mesh_triangles[id] = n;
  }
  for (const auto& inst : array_or_empty(doc, "instances")) {
    const auto mesh = get_or<std::string>(inst, "mesh", "");
    const auto it = mesh_triangles.find(mesh);
    if (it == mesh_triangles.end()) fail(ErrorCode::MissingMesh, "instance references unknown mesh '" + mesh + "'");
    counts.triangles += it->second;
    ++counts.instances;
  }
  counts.emitters = array_or_empty(doc, "emitters").size();
  counts.receivers = array_or_empty(doc, "receivers").size();
  for (const auto& m : array_or_empty(doc, "materials")) {
    json entry = m;
    if (!entry.contains("eta")) entry["eta"] = 1.0;
    if (!entry.contains("c_sat")) entry["c_sat"] = 1.0;
    counts.materials.push_back(std::move(entry));
  }
  return counts;
}

json material_to_json(const MaterialSpec& m) {
  json j{{"id", m.id},
         {"eta", m.eta},
         {"c_sat", m.c_sat},
         {"beta_smooth", m.beta_smooth},
         {"beta_edge", m.beta_edge},
         {"k_smooth", m.k_smooth},
         {"k_edge", m.k_edge},
         {"diffraction", m.diffraction}};
  j["area_ref"] = m.area_ref ? json(*m.area_ref) : json(nullptr);
  return j;
}

json scene_summary(const Scene& scene) {
  json j;
  j["revision"] = scene.revision();
  j["speed_of_sound"] = scene.speed_of_sound();
  j["frequencies"] = std::vector<double>(scene.frequencies().begin(), scene.frequencies().end());
  j["attenuation"] = std::vector<double>(scene.attenuation().begin(), scene.attenuation().end());
  j["triangles"] = scene.triangle_count();
  j["materials"] = json::array();
  for (const auto& m : scene.materials()) j["materials"].push_back(material_to_json(m));
  j["instances"] = json::array();
  for (const auto& i : scene.instances()) {
    j["instances"].push_back({{"id", i.id},
                              {"mesh", i.mesh_id},
                              {"material", scene.materials()[i.material].id},
                              {"triangles", i.world.triangle_count()},
                              {"scale", i.scale},
                              {"position", vec_json(i.pose.position)},
                              {"orientation", quat_json(i.pose.orientation)}});
  }
  j["emitters"] = json::array();
  for (const auto& e : scene.emitters()) {
    j["emitters"].push_back({{"id", e.id},
                             {"position", vec_json(e.pose.position)},
                             {"orientation", quat_json(e.pose.orientation)},
                             {"rays", e.rays},
                             {"max_bounces", e.max_bounces},
                             {"max_distance", e.max_distance},
                             {"frustum_half_angle", e.frustum_half_angle},
                             {"source_level", e.source_level},
                             {"diffraction_candidates", e.diffraction_candidates},
                             {"max_incidence", e.max_incidence}});
  }
  j["receivers"] = json::array();
  for (const auto& r : scene.receivers()) {
    j["receivers"].push_back(
        {{"id", r.id}, {"position", vec_json(r.pose.position)}, {"orientation", quat_json(r.pose.orientation)}});
  }
  return j;
}

}  // namespace sonotrace::scene
