#include "forge/graph_sampling.hpp"

#include "forge/rng.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

namespace forge {

namespace {

std::vector<std::size_t> component_sizes(const std::vector<std::vector<std::uint32_t>>& nbrs) {
  std::vector<char> seen(nbrs.size(), 0);
  std::vector<std::size_t> sizes;
  std::vector<std::uint32_t> stack;
  for (std::uint32_t s = 0; s < nbrs.size(); ++s) {
    if (seen[s]) continue;
    std::size_t count = 0;
    seen[s] = 1;
    stack.push_back(s);
    while (!stack.empty()) {
      const auto v = stack.back();
      stack.pop_back();
      ++count;
      for (auto u : nbrs[v])
        if (!seen[u]) {
          seen[u] = 1;
          stack.push_back(u);
        }
    }
    sizes.push_back(count);
  }
  return sizes;
}

}  // namespace

std::vector<std::uint32_t> vertex_order(const TriMesh& mesh) {
  validate_indices(mesh);
  const auto nbrs = vertex_neighbors(mesh);
  if (nbrs.empty()) fail(ErrorKind::Precondition, "mesh has no vertices");
  const auto sizes = component_sizes(nbrs);
  if (sizes.size() != 1) {
    std::ostringstream msg;
    msg << "mesh graph is disconnected; component sizes:";
    for (auto s : sizes) msg << ' ' << s;
    fail(ErrorKind::Precondition, msg.str());
  }
  std::vector<std::uint32_t> order;
  order.reserve(nbrs.size());
  std::vector<char> visited(nbrs.size(), 0);
  std::vector<std::uint32_t> stack{0};
  while (!stack.empty()) {
    const auto v = stack.back();
    stack.pop_back();
    if (visited[v]) continue;
    visited[v] = 1;
    order.push_back(v);
    for (auto it = nbrs[v].rbegin(); it != nbrs[v].rend(); ++it)
      if (!visited[*it]) stack.push_back(*it);
  }
  return order;
}

SampleGraph sample(const TriMesh& mesh, const SampleOptions& options) {
  const std::size_t nv = mesh.vertices.size();
  if (options.sample_size < 1 || options.sample_size > nv)
    fail(ErrorKind::Precondition, "sample size must lie in [1, V] (V = " + std::to_string(nv) + ")");
  if (!(options.keep_prob >= 0.0 && options.keep_prob <= 1.0))
    fail(ErrorKind::Precondition, "keep probability must lie in [0, 1]");
  const double radius = options.ball_radius.value_or(2.0 * mean_edge_length(mesh));
  if (!(radius > 0.0)) fail(ErrorKind::Precondition, "ball radius must be positive");

  const auto order = vertex_order(mesh);
  const auto initial = vertex_neighbors(mesh);
  std::vector<std::set<std::uint32_t>> adj(nv);
  for (std::size_t v = 0; v < nv; ++v) adj[v].insert(initial[v].begin(), initial[v].end());

  std::vector<char> alive(nv, 1);
  std::vector<char> kept(nv, 0);
  std::vector<std::uint32_t> kept_order;
  std::size_t alive_count = nv;
  const std::size_t target = options.sample_size;
  Rng rng(options.seed);

  auto keep = [&](std::uint32_t v) {
    if (!kept[v]) {
      kept[v] = 1;
      kept_order.push_back(v);
    }
  };
  auto contract = [&](std::uint32_t victim, std::uint32_t into) {
    for (auto w : adj[victim]) {
      adj[w].erase(victim);
      if (w != into) {
        adj[w].insert(into);
        adj[into].insert(w);
      }
    }
    adj[victim].clear();
    alive[victim] = 0;
    --alive_count;
  };

  for (auto current : order) {
    if (kept_order.size() >= target || alive_count <= target) break;
    if (!alive[current]) continue;
    keep(current);
    if (kept_order.size() >= target) break;
    std::vector<std::uint32_t> candidates;
    for (auto u : adj[current])
      if (!kept[u] && (mesh.vertices[u] - mesh.vertices[current]).norm() <= radius) candidates.push_back(u);
    for (auto u : candidates) {
      if (!alive[u] || kept[u]) continue;
      if (rng.uniform() < options.keep_prob || alive_count <= target) {
        keep(u);
        if (kept_order.size() >= target) break;
      } else {
        contract(u, current);
      }
    }
  }

  // Survivors: the first `target` kept vertices, topped up in traversal order
  // when the walk ended on the alive-count bound.
  std::vector<std::uint32_t> chosen(kept_order.begin(),
                                    kept_order.begin() + static_cast<long>(std::min(target, kept_order.size())));
  if (chosen.size() < target) {
    std::vector<char> in(nv, 0);
    for (auto v : chosen) in[v] = 1;
    for (auto v : order) {
      if (chosen.size() == target) break;
      if (alive[v] && !in[v]) {
        chosen.push_back(v);
        in[v] = 1;
      }
    }
  }

  // Every other live vertex is removed and its neighbours reconnected, so two
  // survivors end up adjacent when a path through removed vertices joins them.
  constexpr std::uint32_t kNone = std::numeric_limits<std::uint32_t>::max();
  std::vector<std::uint32_t> slot(nv, kNone);
  for (std::uint32_t s = 0; s < chosen.size(); ++s) slot[chosen[s]] = s;

  SampleGraph out;
  out.rng_seed = options.seed;
  out.points.reserve(target);
  out.origin_map = chosen;
  for (auto v : chosen) out.points.push_back(mesh.vertices[v]);
  for (auto v : chosen)
    for (auto u : adj[v])
      if (slot[u] != kNone && slot[v] < slot[u]) out.edges.emplace_back(slot[v], slot[u]);

  std::vector<char> seen(nv, 0);
  std::vector<std::uint32_t> stack;
  std::vector<std::uint32_t> boundary;
  for (std::uint32_t root = 0; root < nv; ++root) {
    if (!alive[root] || slot[root] != kNone || seen[root]) continue;
    boundary.clear();
    stack.assign(1, root);
    seen[root] = 1;
    while (!stack.empty()) {
      const auto v = stack.back();
      stack.pop_back();
      for (auto u : adj[v]) {
        if (slot[u] != kNone) {
          boundary.push_back(slot[u]);
        } else if (!seen[u]) {
          seen[u] = 1;
          stack.push_back(u);
        }
      }
    }
    std::sort(boundary.begin(), boundary.end());
    boundary.erase(std::unique(boundary.begin(), boundary.end()), boundary.end());
    for (std::size_t a = 0; a < boundary.size(); ++a)
      for (std::size_t b = a + 1; b < boundary.size(); ++b) out.edges.emplace_back(boundary[a], boundary[b]);
  }
  std::sort(out.edges.begin(), out.edges.end());
  out.edges.erase(std::unique(out.edges.begin(), out.edges.end()), out.edges.end());
  return out;
}

namespace {

DegreeStats stats_from(std::size_t n, const std::vector<Edge>& edges) {
  DegreeStats s;
  if (n == 0) return s;
  std::vector<std::size_t> deg(n, 0);
  for (const auto& [a, b] : edges) {
    ++deg[a];
    ++deg[b];
  }
  s.mean = 2.0 * static_cast<double>(edges.size()) / static_cast<double>(n);
  s.min = *std::min_element(deg.begin(), deg.end());
  s.max = *std::max_element(deg.begin(), deg.end());
  return s;
}

}  // namespace

DegreeStats degree_stats(const SampleGraph& graph) { return stats_from(graph.points.size(), graph.edges); }

DegreeStats degree_stats(const TriMesh& mesh) { return stats_from(mesh.vertices.size(), mesh_edges(mesh)); }

bool is_connected(std::size_t node_count, const std::vector<Edge>& edges) {
  if (node_count == 0) return true;
  std::vector<std::vector<std::uint32_t>> nbrs(node_count);
  for (const auto& [a, b] : edges) {
    nbrs[a].push_back(b);
    nbrs[b].push_back(a);
  }
  return component_sizes(nbrs).size() == 1;
}

std::string sample_to_text(const SampleGraph& graph) {
  std::string out = std::to_string(graph.points.size()) + '\n';
  char buf[32];
  for (const auto& p : graph.points) {
    for (int k = 0; k < 3; ++k) {
      const auto res = std::to_chars(buf, buf + sizeof(buf), p[k]);
      out.append(buf, res.ptr);
      out += k < 2 ? ' ' : '\n';
    }
  }
  for (const auto& [a, b] : graph.edges) out += std::to_string(a) + ' ' + std::to_string(b) + '\n';
  return out;
}

void write_sample(const SampleGraph& graph, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::Io, "cannot write '" + path + "'");
  out << sample_to_text(graph);
  if (!out) fail(ErrorKind::Io, "failed writing '" + path + "'");
}

}  // namespace forge
