#include "check.hpp"
#include "fixtures.hpp"

#include "forge/graph_sampling.hpp"
#include "forge/marching_cubes.hpp"
#include "forge/scalar_field.hpp"

#include <algorithm>
#include <deque>
#include <set>

using forge::ErrorKind;
using forge::SampleOptions;
using forge::TriMesh;
using forge::Vec3;

namespace {

TriMesh tube_mesh() {
  const auto circle = forge::sample_uniform(forge::unit_circle_spec(), 1024);
  return forge::marching_cubes(forge::rasterize(circle, forge::RadiusProfile{0.25, 0.0, 0, 0.0},
                                                std::array<int, 3>{40, 40, 40}, forge::FieldMode::Sign));
}

TriMesh knot_mesh() {
  const auto curve = forge::sample_uniform(fixture::lissajous(1, 2, 3, 0, forge::kPi / 2, 0), 2048);
  return forge::marching_cubes(forge::rasterize(curve, forge::RadiusProfile{0.1, 0.0, 0, 0.0},
                                                std::array<int, 3>{40, 40, 40}, forge::FieldMode::Sign));
}

std::vector<TriMesh> corpus() {
  return {fixture::octahedron(), fixture::torus_grid(30, 20), fixture::torus_grid(12, 40), tube_mesh(), knot_mesh()};
}

// Breadth-first reachability on an explicit edge list.
bool connected(std::size_t n, const std::vector<forge::Edge>& edges) {
  if (n == 0) return true;
  std::vector<std::vector<std::uint32_t>> nb(n);
  for (const auto& [a, b] : edges) {
    nb[a].push_back(b);
    nb[b].push_back(a);
  }
  std::vector<char> seen(n, 0);
  std::deque<std::uint32_t> q{0};
  seen[0] = 1;
  std::size_t count = 1;
  while (!q.empty()) {
    const auto v = q.front();
    q.pop_front();
    for (auto u : nb[v])
      if (!seen[u]) {
        seen[u] = 1;
        ++count;
        q.push_back(u);
      }
  }
  return count == n;
}

// Each sample edge must stand for a mesh path whose inner vertices were all dropped.
bool edges_follow_dropped_paths(const TriMesh& mesh, const forge::SampleGraph& g) {
  const auto nb = forge::vertex_neighbors(mesh);
  std::vector<int> slot(mesh.vertices.size(), -1);
  for (std::size_t s = 0; s < g.origin_map.size(); ++s) slot[g.origin_map[s]] = static_cast<int>(s);
  for (std::size_t s = 0; s < g.size(); ++s) {
    std::set<int> reach;
    std::vector<char> seen(mesh.vertices.size(), 0);
    std::vector<std::uint32_t> stack{g.origin_map[s]};
    seen[g.origin_map[s]] = 1;
    while (!stack.empty()) {
      const auto v = stack.back();
      stack.pop_back();
      for (auto u : nb[v]) {
        if (seen[u]) continue;
        seen[u] = 1;
        if (slot[u] >= 0)
          reach.insert(slot[u]);
        else
          stack.push_back(u);
      }
    }
    for (const auto& [a, b] : g.edges) {
      if (a == s && !reach.count(static_cast<int>(b))) return false;
      if (b == s && !reach.count(static_cast<int>(a))) return false;
    }
  }
  return true;
}

}  // namespace

TEST_CASE("vertex order is a depth-first preorder with ascending neighbours") {
  CHECK(forge::vertex_order(fixture::strip4()) == std::vector<std::uint32_t>{0, 1, 2, 3});
  CHECK(forge::vertex_order(fixture::octahedron()) == std::vector<std::uint32_t>{0, 2, 1, 3, 4, 5});
  for (const auto& mesh : {fixture::torus_grid(9, 7), knot_mesh()}) {
    auto order = forge::vertex_order(mesh);
    CHECK(order == forge::vertex_order(mesh));
    std::sort(order.begin(), order.end());
    for (std::size_t i = 0; i < order.size(); ++i) REQUIRE(order[i] == i);
  }
}

TEST_CASE("a disconnected mesh has no vertex order") {
  const auto m = fixture::merged(fixture::octahedron(), fixture::translated(fixture::octahedron(), Vec3(4, 0, 0)));
  CHECK_FORGE_ERROR(forge::vertex_order(m), ErrorKind::Precondition);
  try {
    (void)forge::vertex_order(m);
  } catch (const forge::Error& e) {
    CHECK(std::string(e.what()).find("6 6") != std::string::npos);
  }
}

TEST_CASE("sampling every vertex returns the mesh graph") {
  const auto mesh = fixture::torus_grid(10, 6);
  const auto g = forge::sample(mesh, {mesh.vertices.size(), std::nullopt, 0.5, 3});
  CHECK(g.size() == mesh.vertices.size());
  std::vector<forge::Edge> mapped;
  for (const auto& [a, b] : g.edges)
    mapped.emplace_back(std::min(g.origin_map[a], g.origin_map[b]), std::max(g.origin_map[a], g.origin_map[b]));
  std::sort(mapped.begin(), mapped.end());
  CHECK(mapped == forge::mesh_edges(mesh));
}

TEST_CASE("octahedron reduces to three connected points") {
  const auto g = forge::sample(fixture::octahedron(), {3, std::nullopt, 0.5, 11});
  CHECK(g.size() == 3);
  CHECK(connected(g.size(), g.edges));
  CHECK(forge::is_connected(g.size(), g.edges));
}

TEST_CASE("degree statistics") {
  const auto oct = forge::degree_stats(fixture::octahedron());
  CHECK(oct.mean == 4.0);
  CHECK(oct.min == 4);
  CHECK(oct.max == 4);
  TriMesh tri;
  tri.vertices = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}};
  tri.faces = {{0, 1, 2}};
  CHECK(forge::degree_stats(tri).mean == 2.0);
  const double tube = forge::degree_stats(tube_mesh()).mean;
  CHECK(tube >= 5.9);
  CHECK(tube <= 6.1);
}

TEST_CASE("sampling preconditions") {
  const auto oct = fixture::octahedron();
  CHECK_FORGE_ERROR(forge::sample(oct, {0, std::nullopt, 0.5, 0}), ErrorKind::Precondition);
  CHECK_FORGE_ERROR(forge::sample(oct, {7, std::nullopt, 0.5, 0}), ErrorKind::Precondition);
  CHECK_FORGE_ERROR(forge::sample(oct, {3, std::nullopt, 1.5, 0}), ErrorKind::Precondition);
  CHECK_FORGE_ERROR(forge::sample(oct, {3, -1.0, 0.5, 0}), ErrorKind::Precondition);
}

TEST_CASE("300-point samples are exact, connected and denser") {
  for (const auto& mesh : corpus()) {
    if (mesh.vertices.size() < 900) continue;
    const auto g = forge::sample(mesh, {300, std::nullopt, 0.5, 42});
    CHECK(g.size() == 300);
    CHECK(connected(g.size(), g.edges));
    CHECK(forge::degree_stats(g).mean > forge::degree_stats(mesh).mean);
    CHECK(edges_follow_dropped_paths(mesh, g));
  }
}

TEST_CASE("seeded runs are reproducible and keep mesh positions") {
  const auto meshes = corpus();
  for (std::size_t m = 0; m < meshes.size(); ++m) {
    const auto& mesh = meshes[m];
    const std::size_t nv = mesh.vertices.size();
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      const std::size_t size = std::max<std::size_t>(1, nv / (2 + seed % 5));
      const SampleOptions opts{size, std::nullopt, 0.2 + 0.06 * static_cast<double>(seed), seed};
      const auto g = forge::sample(mesh, opts);
      const auto again = forge::sample(mesh, opts);
      CHECK(g.points == again.points);
      CHECK(g.edges == again.edges);
      CHECK(g.size() == size);
      CHECK(connected(g.size(), g.edges));
      std::set<std::uint32_t> distinct(g.origin_map.begin(), g.origin_map.end());
      CHECK(distinct.size() == size);
      for (std::size_t s = 0; s < g.size(); ++s) CHECK(g.points[s] == mesh.vertices[g.origin_map[s]]);
      for (const auto& [a, b] : g.edges) CHECK(a < b);
      if (nv >= 100 && size <= nv / 3) CHECK(forge::degree_stats(g).mean >= forge::degree_stats(mesh).mean);
    }
  }
}

TEST_CASE("sample text format") {
  const auto g = forge::sample(fixture::strip4(), {4, std::nullopt, 0.5, 0});
  CHECK(forge::sample_to_text(g) == "4\n0 0 0\n1 0 0\n0 1 0\n1 1 0\n0 1\n0 2\n1 2\n1 3\n2 3\n");
}
