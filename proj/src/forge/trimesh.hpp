#pragma once

#include "forge/common.hpp"

#include <array>
#include <cstdint>
#include <utility>
#include <vector>

namespace forge {

using Face = std::array<std::uint32_t, 3>;
using Edge = std::pair<std::uint32_t, std::uint32_t>;  // first < second

struct TriMesh {
  std::vector<Vec3> vertices;
  std::vector<Face> faces;

  std::size_t vertex_count() const noexcept { return vertices.size(); }
  std::size_t face_count() const noexcept { return faces.size(); }
};

// Throws Error(Validation) on out-of-range indices or faces repeating a vertex.
void validate_indices(const TriMesh& mesh);

// Unordered vertex pairs of all face sides, sorted and unique.
std::vector<Edge> mesh_edges(const TriMesh& mesh);

// Sorted neighbour lists from the edge set.
std::vector<std::vector<std::uint32_t>> vertex_neighbors(const TriMesh& mesh);

double mean_edge_length(const TriMesh& mesh);

}  // namespace forge
