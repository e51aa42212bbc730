#pragma once

#include "forge/trimesh.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace forge {

struct TopologyReport {
  bool watertight = false;   // every edge has exactly two incident faces
  bool manifold = false;     // watertight and every vertex star is a single disk
  bool orientable = false;   // a consistent winding exists
  int components = 0;        // connected components of the face adjacency graph
  std::size_t boundary_edges = 0;
  std::size_t nonmanifold_edges = 0;
  std::size_t nonmanifold_vertices = 0;
  bool consistently_wound = false;  // the stored winding is already consistent

  bool closed_surface() const { return watertight && manifold && orientable && components == 1; }
};

TopologyReport validate_mesh(const TriMesh& mesh);

// V - E + F with V the stored vertex count and E from unordered index pairs.
long euler_characteristic(const TriMesh& mesh);

// (2 - chi) / 2 for a single closed orientable manifold; otherwise throws
// Error(Topology) naming the violated property.
int genus(const TriMesh& mesh);

struct AuditEntry {
  std::string path;
  std::optional<int> genus;
  long euler = 0;
  std::string problem;  // non-empty when invalid or unreadable
  bool unreadable = false;
};

struct AuditReport {
  std::map<int, int> histogram;
  std::vector<AuditEntry> entries;  // same order as the input paths

  int invalid_count() const;
  int unreadable_count() const;
  bool uniform() const;
};

AuditReport audit_dataset(const std::vector<std::string>& paths);

std::string audit_to_csv(const AuditReport& report);
std::string audit_to_json(const AuditReport& report);

}  // namespace forge
