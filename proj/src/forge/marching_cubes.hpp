#pragma once

#include "forge/scalar_field.hpp"
#include "forge/trimesh.hpp"

#include <array>
#include <vector>

namespace forge {

// Cube corner c sits at offset (c & 1, (c >> 1) & 1, (c >> 2) & 1); edge e joins
// corners cube_edge_corners()[e]. The triangle table is derived from the
// face-crossing cycles of each corner configuration, resolving ambiguous faces
// by always separating the inside corners. Triangles list cube edges and are
// wound counter-clockwise seen from outside the enclosed region.
struct CubeCase {
  std::vector<std::array<std::uint8_t, 3>> triangles;
};

const std::array<std::array<std::uint8_t, 2>, 12>& cube_edge_corners();
const std::array<CubeCase, 256>& marching_cubes_table();

// Extracts the boundary of the inside region. Vertices are shared between
// cells and numbered in order of first use (cells scanned x fastest).
// Sign-mode fields put every vertex at an edge midpoint.
TriMesh marching_cubes(const ScalarField& field, double isovalue = 0.0);

}  // namespace forge
