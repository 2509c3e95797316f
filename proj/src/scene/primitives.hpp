// SPDX-FileCopyrightText: Copyright (c) 2026 The SonoTrace Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>

#include "scene/mesh.hpp"

namespace sonotrace::scene {

// Procedural meshes usable from scene files ("primitive" mesh sources) and
// in tests. All are centered on the origin.

// Flat rectangle in the z = 0 plane, normal +Z, nx * ny quads split in two.
TriangleMesh make_plate(double width, double height, std::uint32_t nx, std::uint32_t ny);

// Closed axis-aligned box, each face an n x n grid, outward normals.
TriangleMesh make_box(double sx, double sy, double sz, std::uint32_t n);

// Closed cube of half-size `half` whose edges and corners are chamfered by
// one grid step of an n x n face grid.
TriangleMesh make_beveled_box(double half, std::uint32_t n);

// Subdivided icosahedron projected onto a sphere; 20 * 4^s triangles.
TriangleMesh make_icosphere(double radius, std::uint32_t subdivisions);

// Open dome (z >= 0) with its apex on +Z; boundary ring at z = 0.
TriangleMesh make_hemisphere(double radius, std::uint32_t rings, std::uint32_t segments);

std::uint64_t plate_triangle_count(std::uint64_t nx, std::uint64_t ny);
std::uint64_t box_triangle_count(std::uint64_t n);
std::uint64_t icosphere_triangle_count(std::uint64_t subdivisions);
std::uint64_t hemisphere_triangle_count(std::uint64_t rings, std::uint64_t segments);

}  // namespace sonotrace::scene
