// SPDX-FileCopyrightText: Copyright (c) 2026 The SonoTrace Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>

#include "scene/mesh.hpp"

namespace sonotrace::scene {

enum class MeshFormat { Obj, BinaryStl };

// Throws Error(ParseError) on malformed input, Error(EmptyMesh) when the
// file yields no triangles, Error(IoError) when it cannot be opened.
TriangleMesh load_mesh(const std::string& path, MeshFormat format);

// Picks the format from the extension (.obj / .stl, case-insensitive).
TriangleMesh load_mesh(const std::string& path);
MeshFormat format_from_extension(const std::string& path);

// Triangle count without building the mesh.
std::uint64_t count_mesh_triangles(const std::string& path);

void write_obj(const std::string& path, const TriangleMesh& mesh);
void write_binary_stl(const std::string& path, const TriangleMesh& mesh);

}  // namespace sonotrace::scene
