// SPDX-FileCopyrightText: Copyright (c) 2026 The SonoTrace Authors
// SPDX-License-Identifier: Apache-2.0

#include "scene/mesh_io.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cctype>
#include <charconv>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>

#include "common/binary_io.hpp"
#include "common/error.hpp"

namespace sonotrace::scene {

namespace {

constexpr std::size_t kStlHeader = 80;
constexpr std::size_t kStlRecord = 50;

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

[[noreturn]] void parse_error(const std::string& path, std::size_t line, const std::string& what) {
  fail(ErrorCode::ParseError, path + ":" + std::to_string(line) + ": " + what);
}

// Resolves an OBJ face token ("7", "7/2", "7//3", "-1") to a 0-based index.
std::uint32_t obj_index(std::string_view token, std::size_t vertex_count, const std::string& path,
                        std::size_t line) {
  const auto slash = token.find('/');
  if (slash != std::string_view::npos) token = token.substr(0, slash);
  long long idx = 0;
  const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), idx);
  if (ec != std::errc{} || ptr != token.data() + token.size() || idx == 0) {
    parse_error(path, line, "bad face index '" + std::string(token) + "'");
  }
  const long long resolved = idx > 0 ? idx - 1 : static_cast<long long>(vertex_count) + idx;
  if (resolved < 0 || resolved >= static_cast<long long>(vertex_count)) {
    parse_error(path, line, "face index out of range");
  }
  return static_cast<std::uint32_t>(resolved);
}

TriangleMesh load_obj(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::IoError, "cannot open '" + path + "'");

  std::vector<Vec3> vertices;
  std::vector<TriangleIndices> triangles;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream ss(line);
    std::string tag;
    if (!(ss >> tag) || tag[0] == '#') continue;
    if (tag == "v") {
      Vec3 p;
      if (!(ss >> p.x >> p.y >> p.z)) parse_error(path, line_no, "vertex needs three coordinates");
      vertices.push_back(p);
    } else if (tag == "f") {
      std::vector<std::uint32_t> poly;
      std::string tok;
      while (ss >> tok) poly.push_back(obj_index(tok, vertices.size(), path, line_no));
      if (poly.size() < 3) parse_error(path, line_no, "face needs at least three vertices");
      for (std::size_t k = 1; k + 1 < poly.size(); ++k) {
        TriangleIndices tri{poly[0], poly[k], poly[k + 1]};
        if (tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2]) {
          parse_error(path, line_no, "face repeats a vertex");
        }
        triangles.push_back(tri);
      }
    }
    // Normals, texture coordinates, groups and materials are ignored.
  }
  if (triangles.empty()) fail(ErrorCode::EmptyMesh, "'" + path + "' contains no triangles");
  return TriangleMesh(std::move(vertices), std::move(triangles));
}

TriangleMesh load_stl(const std::string& path) {
  const auto bytes = read_file_bytes(path);
  if (bytes.size() < kStlHeader + 4) fail(ErrorCode::ParseError, "'" + path + "': truncated STL header");
  ByteReader reader(bytes);
  reader.skip(kStlHeader);
  const std::uint32_t count = reader.u32();
  if (bytes.size() != kStlHeader + 4 + static_cast<std::size_t>(count) * kStlRecord) {
    fail(ErrorCode::ParseError, "'" + path + "': size does not match facet count " + std::to_string(count));
  }
  if (count == 0) fail(ErrorCode::EmptyMesh, "'" + path + "' contains no triangles");

  // STL stores unshared corners; weld bit-identical positions so the mesh
  // has connectivity for curvature and boundary detection.
  std::map<std::array<std::uint32_t, 3>, std::uint32_t> weld;
  std::vector<Vec3> vertices;
  std::vector<TriangleIndices> triangles;
  triangles.reserve(count);
  std::size_t skipped = 0;
  for (std::uint32_t f = 0; f < count; ++f) {
    reader.skip(12);  // facet normal; recomputed from winding
    TriangleIndices tri{};
    for (int k = 0; k < 3; ++k) {
      const float x = reader.f32();
      const float y = reader.f32();
      const float z = reader.f32();
      const std::array<std::uint32_t, 3> key{std::bit_cast<std::uint32_t>(x), std::bit_cast<std::uint32_t>(y),
                                             std::bit_cast<std::uint32_t>(z)};
      auto [it, inserted] = weld.try_emplace(key, static_cast<std::uint32_t>(vertices.size()));
      if (inserted) vertices.push_back({x, y, z});
      tri[k] = it->second;
    }
    reader.skip(2);  // attribute byte count
    if (tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2]) {
      ++skipped;
      continue;
    }
    triangles.push_back(tri);
  }
  if (skipped > 0) {
    warn("'" + path + "': dropped " + std::to_string(skipped) + " facets with coincident corners");
  }
  if (triangles.empty()) fail(ErrorCode::EmptyMesh, "'" + path + "' contains no valid triangles");
  return TriangleMesh(std::move(vertices), std::move(triangles));
}

}  // namespace

MeshFormat format_from_extension(const std::string& path) {
  const auto dot = path.find_last_of('.');
  const std::string ext = dot == std::string::npos ? "" : lower(path.substr(dot));
  if (ext == ".obj") return MeshFormat::Obj;
  if (ext == ".stl") return MeshFormat::BinaryStl;
  fail(ErrorCode::ParseError, "'" + path + "': unsupported mesh extension");
}

TriangleMesh load_mesh(const std::string& path, MeshFormat format) {
  return format == MeshFormat::Obj ? load_obj(path) : load_stl(path);
}

TriangleMesh load_mesh(const std::string& path) { return load_mesh(path, format_from_extension(path)); }

std::uint64_t count_mesh_triangles(const std::string& path) {
  if (format_from_extension(path) == MeshFormat::BinaryStl) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorCode::IoError, "cannot open '" + path + "'");
    std::array<std::uint8_t, kStlHeader + 4> head{};
    if (!in.read(reinterpret_cast<char*>(head.data()), head.size())) {
      fail(ErrorCode::ParseError, "'" + path + "': truncated STL header");
    }
    ByteReader r(head);
    r.skip(kStlHeader);
    return r.u32();
  }
  std::ifstream in(path);
  if (!in) fail(ErrorCode::IoError, "cannot open '" + path + "'");
  std::uint64_t count = 0;
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream ss(line);
    std::string tag;
    if (!(ss >> tag) || tag != "f") continue;
    std::size_t corners = 0;
    std::string tok;
    while (ss >> tok) ++corners;
    if (corners >= 3) count += corners - 2;
  }
  return count;
}

void write_obj(const std::string& path, const TriangleMesh& mesh) {
  std::ofstream out(path);
  if (!out) fail(ErrorCode::IoError, "cannot open '" + path + "' for writing");
  out << std::setprecision(17);
  for (const auto& v : mesh.vertices()) out << "v " << v.x << ' ' << v.y << ' ' << v.z << '\n';
  for (const auto& t : mesh.triangles()) out << "f " << t[0] + 1 << ' ' << t[1] + 1 << ' ' << t[2] + 1 << '\n';
  if (!out) fail(ErrorCode::IoError, "write to '" + path + "' failed");
}

void write_binary_stl(const std::string& path, const TriangleMesh& mesh) {
  ByteWriter w(kStlHeader + 4 + mesh.triangle_count() * kStlRecord);
  std::string header = "sonotrace binary stl";
  header.resize(kStlHeader, ' ');
  w.bytes(header);
  w.u32(static_cast<std::uint32_t>(mesh.triangle_count()));
  for (std::size_t t = 0; t < mesh.triangle_count(); ++t) {
    const Vec3 n = mesh.normals()[t];
    w.f32(static_cast<float>(n.x));
    w.f32(static_cast<float>(n.y));
    w.f32(static_cast<float>(n.z));
    for (int k = 0; k < 3; ++k) {
      const Vec3 p = mesh.corner(t, k);
      w.f32(static_cast<float>(p.x));
      w.f32(static_cast<float>(p.y));
      w.f32(static_cast<float>(p.z));
    }
    w.u16(0);
  }
  write_file_bytes(path, w.data());
}

}  // namespace sonotrace::scene
