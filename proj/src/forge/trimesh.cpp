#include "forge/trimesh.hpp"

#include <algorithm>
#include <string>

namespace forge {

void validate_indices(const TriMesh& mesh) {
  const auto n = mesh.vertices.size();
  for (std::size_t f = 0; f < mesh.faces.size(); ++f) {
    const auto& face = mesh.faces[f];
    for (auto v : face)
      if (v >= n) fail(ErrorKind::Validation, "face " + std::to_string(f) + " has out-of-range vertex index");
    if (face[0] == face[1] || face[1] == face[2] || face[0] == face[2])
      fail(ErrorKind::Validation, "face " + std::to_string(f) + " is degenerate");
  }
}

std::vector<Edge> mesh_edges(const TriMesh& mesh) {
  std::vector<Edge> edges;
  edges.reserve(mesh.faces.size() * 3);
  for (const auto& f : mesh.faces) {
    for (int k = 0; k < 3; ++k) {
      const auto a = f[k];
      const auto b = f[(k + 1) % 3];
      edges.emplace_back(std::min(a, b), std::max(a, b));
    }
  }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  return edges;
}

std::vector<std::vector<std::uint32_t>> vertex_neighbors(const TriMesh& mesh) {
  std::vector<std::vector<std::uint32_t>> nbrs(mesh.vertices.size());
  for (const auto& [a, b] : mesh_edges(mesh)) {
    nbrs[a].push_back(b);
    nbrs[b].push_back(a);
  }
  for (auto& list : nbrs) std::sort(list.begin(), list.end());
  return nbrs;
}

double mean_edge_length(const TriMesh& mesh) {
  const auto edges = mesh_edges(mesh);
  if (edges.empty()) return 0.0;
  double total = 0.0;
  for (const auto& [a, b] : edges) total += (mesh.vertices[a] - mesh.vertices[b]).norm();
  return total / static_cast<double>(edges.size());
}

}  // namespace forge
