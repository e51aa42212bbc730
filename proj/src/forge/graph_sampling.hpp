#pragma once

#include "forge/trimesh.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace forge {

struct SampleGraph {
  std::vector<Vec3> points;
  std::vector<Edge> edges;                  // sorted, first < second, no self-loops
  std::vector<std::uint32_t> origin_map;    // sample index -> source vertex index
  std::uint64_t rng_seed = 0;

  std::size_t size() const noexcept { return points.size(); }
};

// DFS preorder of the mesh edge graph from vertex 0, visiting neighbours in
// ascending index order. Throws Error(Precondition) listing component sizes if
// the graph is disconnected.
std::vector<std::uint32_t> vertex_order(const TriMesh& mesh);

struct SampleOptions {
  std::size_t sample_size = 3000;
  std::optional<double> ball_radius;  // default: 2x mean edge length
  double keep_prob = 0.5;
  std::uint64_t seed = 0;
};

/// Adjacency-preserving reduction of a mesh to exactly `sample_size` vertices.
///
/// Vertices are visited in vertex_order(). The current vertex is kept; each of
/// its live neighbours within the ball radius that is not yet kept survives
/// with probability keep_prob, otherwise it is contracted into the current
/// vertex (its remaining neighbours become neighbours of the current vertex).
/// The walk stops once sample_size vertices are kept or only sample_size
/// vertices remain. The first sample_size kept vertices survive; every other
/// live vertex is then removed and its neighbours reconnected, which makes
/// two survivors adjacent when they border the same connected set of removed
/// vertices. Connectivity is preserved.
SampleGraph sample(const TriMesh& mesh, const SampleOptions& options);

struct DegreeStats {
  double mean = 0.0;
  std::size_t min = 0;
  std::size_t max = 0;
};

DegreeStats degree_stats(const SampleGraph& graph);
DegreeStats degree_stats(const TriMesh& mesh);

bool is_connected(std::size_t node_count, const std::vector<Edge>& edges);

// "n", then n lines "x y z", then one "i j" line per edge.
std::string sample_to_text(const SampleGraph& graph);
void write_sample(const SampleGraph& graph, const std::string& path);

}  // namespace forge
