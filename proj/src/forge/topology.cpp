#include "forge/topology.hpp"

#include "forge/parallel.hpp"
#include "forge/stl.hpp"

#include <json.hpp>

#include <algorithm>
#include <numeric>
#include <sstream>
#include <unordered_map>

namespace forge {

namespace {

struct UnionFind {
  explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  std::size_t find(std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
  std::vector<std::size_t> parent;
};

struct EdgeUse {
  std::uint32_t face;
  bool forward;  // face traverses the edge from the smaller to the larger index
};

std::uint64_t edge_key(std::uint32_t a, std::uint32_t b) {
  return (static_cast<std::uint64_t>(std::min(a, b)) << 32) | std::max(a, b);
}

}  // namespace

TopologyReport validate_mesh(const TriMesh& mesh) {
  validate_indices(mesh);
  TopologyReport report;
  const std::size_t nf = mesh.faces.size();

  std::unordered_map<std::uint64_t, std::vector<EdgeUse>> uses;
  uses.reserve(nf * 2);
  for (std::uint32_t f = 0; f < nf; ++f) {
    const auto& face = mesh.faces[f];
    for (int k = 0; k < 3; ++k) {
      const auto a = face[k];
      const auto b = face[(k + 1) % 3];
      uses[edge_key(a, b)].push_back({f, a < b});
    }
  }

  UnionFind faces_uf(nf);
  for (const auto& [key, list] : uses) {
    if (list.size() == 1) ++report.boundary_edges;
    if (list.size() > 2) ++report.nonmanifold_edges;
    for (std::size_t k = 1; k < list.size(); ++k) faces_uf.unite(list[0].face, list[k].face);
  }
  report.watertight = nf > 0 && report.boundary_edges == 0 && report.nonmanifold_edges == 0;

  std::vector<char> root_seen(nf, 0);
  for (std::size_t f = 0; f < nf; ++f) {
    const auto r = faces_uf.find(f);
    if (!root_seen[r]) {
      root_seen[r] = 1;
      ++report.components;
    }
  }

  // Vertex stars: faces around v must form one cycle through edges incident to v.
  std::vector<std::vector<std::uint32_t>> star(mesh.vertices.size());
  for (std::uint32_t f = 0; f < nf; ++f)
    for (auto v : mesh.faces[f]) star[v].push_back(f);
  for (std::size_t v = 0; v < star.size(); ++v) {
    const auto& fs = star[v];
    if (fs.empty()) continue;
    std::unordered_map<std::uint32_t, std::size_t> local;
    for (std::size_t k = 0; k < fs.size(); ++k) local[fs[k]] = k;
    UnionFind uf(fs.size());
    for (std::size_t k = 0; k < fs.size(); ++k) {
      const auto& face = mesh.faces[fs[k]];
      for (auto w : face) {
        if (w == v) continue;
        const auto it = uses.find(edge_key(static_cast<std::uint32_t>(v), w));
        if (it == uses.end()) continue;
        for (const auto& use : it->second) uf.unite(k, local.at(use.face));
      }
    }
    std::size_t groups = 0;
    for (std::size_t k = 0; k < fs.size(); ++k)
      if (uf.find(k) == k) ++groups;
    if (groups != 1) ++report.nonmanifold_vertices;
  }
  report.manifold = report.watertight && report.nonmanifold_vertices == 0;

  // Orientation: propagate flips across two-face edges; a conflict means non-orientable.
  std::vector<std::vector<std::pair<std::uint32_t, bool>>> adjacency(nf);  // (neighbour, same_direction)
  report.consistently_wound = true;
  for (const auto& [key, list] : uses) {
    if (list.size() != 2) continue;
    const bool same = list[0].forward == list[1].forward;
    if (same) report.consistently_wound = false;
    adjacency[list[0].face].push_back({list[1].face, same});
    adjacency[list[1].face].push_back({list[0].face, same});
  }
  std::vector<int> flip(nf, -1);
  bool orientable = true;
  std::vector<std::uint32_t> stack;
  for (std::uint32_t s = 0; s < nf && orientable; ++s) {
    if (flip[s] >= 0) continue;
    flip[s] = 0;
    stack.push_back(s);
    while (!stack.empty() && orientable) {
      const auto f = stack.back();
      stack.pop_back();
      for (const auto& [g, same] : adjacency[f]) {
        const int want = same ? 1 - flip[f] : flip[f];
        if (flip[g] < 0) {
          flip[g] = want;
          stack.push_back(g);
        } else if (flip[g] != want) {
          orientable = false;
          break;
        }
      }
    }
  }
  report.orientable = orientable && nf > 0;
  if (!report.orientable) report.consistently_wound = false;
  return report;
}

long euler_characteristic(const TriMesh& mesh) {
  return static_cast<long>(mesh.vertices.size()) - static_cast<long>(mesh_edges(mesh).size()) +
         static_cast<long>(mesh.faces.size());
}

int genus(const TriMesh& mesh) {
  const TopologyReport r = validate_mesh(mesh);
  if (!r.watertight) {
    std::ostringstream msg;
    msg << "mesh is not watertight (" << r.boundary_edges << " boundary edges, " << r.nonmanifold_edges
        << " edges with more than two faces); genus is undefined";
    fail(ErrorKind::Topology, msg.str());
  }
  if (!r.manifold)
    fail(ErrorKind::Topology, "mesh is not manifold (" + std::to_string(r.nonmanifold_vertices) +
                                  " vertices with a pinched star); genus is undefined");
  if (!r.orientable) fail(ErrorKind::Topology, "mesh is not orientable; genus is undefined");
  if (r.components != 1)
    fail(ErrorKind::Topology, "mesh has " + std::to_string(r.components) + " components; genus is undefined");
  const long chi = euler_characteristic(mesh);
  if (chi > 2 || chi % 2 != 0)
    fail(ErrorKind::Topology, "Euler characteristic " + std::to_string(chi) + " is not even and <= 2");
  return static_cast<int>((2 - chi) / 2);
}

int AuditReport::invalid_count() const {
  return static_cast<int>(std::count_if(entries.begin(), entries.end(),
                                        [](const AuditEntry& e) { return !e.genus && !e.unreadable; }));
}

int AuditReport::unreadable_count() const {
  return static_cast<int>(std::count_if(entries.begin(), entries.end(), [](const AuditEntry& e) { return e.unreadable; }));
}

bool AuditReport::uniform() const {
  if (histogram.empty()) return true;
  const int first = histogram.begin()->second;
  return std::all_of(histogram.begin(), histogram.end(), [&](const auto& kv) { return kv.second == first; });
}

AuditReport audit_dataset(const std::vector<std::string>& paths) {
  AuditReport report;
  report.entries.resize(paths.size());
  parallel_for(paths.size(), [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      AuditEntry& entry = report.entries[i];
      entry.path = paths[i];
      TriMesh mesh;
      try {
        mesh = read_stl(paths[i]);
      } catch (const Error& e) {
        entry.unreadable = true;
        entry.problem = e.what();
        continue;
      }
      entry.euler = euler_characteristic(mesh);
      try {
        entry.genus = genus(mesh);
      } catch (const Error& e) {
        entry.problem = e.what();
      }
    }
  });
  for (const auto& e : report.entries)
    if (e.genus) ++report.histogram[*e.genus];
  return report;
}

std::string audit_to_csv(const AuditReport& report) {
  std::ostringstream out;
  out << "genus,count\n";
  for (const auto& [g, n] : report.histogram) out << g << ',' << n << '\n';
  out << "invalid," << report.invalid_count() << '\n';
  out << "unreadable," << report.unreadable_count() << '\n';
  out << "uniform," << (report.uniform() ? "true" : "false") << '\n';
  return out.str();
}

std::string audit_to_json(const AuditReport& report) {
  nlohmann::json j;
  nlohmann::json hist = nlohmann::json::object();
  for (const auto& [g, n] : report.histogram) hist[std::to_string(g)] = n;
  j["histogram"] = hist;
  j["uniform"] = report.uniform();
  nlohmann::json entries = nlohmann::json::array();
  for (const auto& e : report.entries) {
    nlohmann::json je{{"path", e.path}, {"euler", e.euler}};
    je["genus"] = e.genus ? nlohmann::json(*e.genus) : nlohmann::json(nullptr);
    if (!e.problem.empty()) je["problem"] = e.problem;
    if (e.unreadable) je["unreadable"] = true;
    entries.push_back(je);
  }
  j["entries"] = entries;
  j["invalid"] = report.invalid_count();
  j["unreadable"] = report.unreadable_count();
  return j.dump(2);
}

}  // namespace forge
