#include "forge/smoothing.hpp"

#include "forge/topology.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace forge {

TriMesh smooth(const TriMesh& mesh, int iterations, double factor) {
  if (iterations < 0) fail(ErrorKind::Precondition, "iteration count must be nonnegative");
  if (!(factor >= 0.0 && factor <= 1.0)) fail(ErrorKind::Precondition, "smoothing factor must lie in [0, 1]");
  validate_indices(mesh);
  if (!validate_mesh(mesh).watertight) fail(ErrorKind::Precondition, "smoothing needs a closed mesh");
  TriMesh out = mesh;
  if (iterations == 0 || factor == 0.0) return out;

  const auto nbrs = vertex_neighbors(mesh);
  std::vector<Vec3> next(out.vertices.size());
  for (int it = 0; it < iterations; ++it) {
    for (std::size_t v = 0; v < out.vertices.size(); ++v) {
      const auto& list = nbrs[v];
      if (list.empty()) {
        next[v] = out.vertices[v];
        continue;
      }
      Vec3 mean = Vec3::Zero();
      for (auto u : list) mean += out.vertices[u];
      mean /= static_cast<double>(list.size());
      next[v] = out.vertices[v] + factor * (mean - out.vertices[v]);
    }
    out.vertices.swap(next);
  }
  return out;
}

double total_absolute_mean_curvature(const TriMesh& mesh) {
  std::map<Edge, std::vector<std::size_t>> incident;
  for (std::size_t f = 0; f < mesh.faces.size(); ++f) {
    const auto& face = mesh.faces[f];
    for (int k = 0; k < 3; ++k) {
      const auto a = face[k];
      const auto b = face[(k + 1) % 3];
      incident[{std::min(a, b), std::max(a, b)}].push_back(f);
    }
  }
  auto normal = [&](std::size_t f) {
    const auto& face = mesh.faces[f];
    const Vec3 n = (mesh.vertices[face[1]] - mesh.vertices[face[0]]).cross(mesh.vertices[face[2]] - mesh.vertices[face[0]]);
    const double len = n.norm();
    return len > 0.0 ? Vec3(n / len) : Vec3(Vec3::Zero());
  };
  double total = 0.0;
  for (const auto& [edge, faces] : incident) {
    if (faces.size() != 2) continue;
    const double c = std::clamp(normal(faces[0]).dot(normal(faces[1])), -1.0, 1.0);
    total += std::acos(c) * (mesh.vertices[edge.first] - mesh.vertices[edge.second]).norm();
  }
  return 0.5 * total;
}

}  // namespace forge
