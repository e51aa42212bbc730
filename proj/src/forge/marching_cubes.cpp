#include "forge/marching_cubes.hpp"

#include "forge/parallel.hpp"

#include <algorithm>
#include <functional>
#include <optional>
#include <sstream>

namespace forge {

namespace {

Vec3 corner_offset(int c) { return {double(c & 1), double((c >> 1) & 1), double((c >> 2) & 1)}; }

std::array<std::array<std::uint8_t, 2>, 12> build_edges() {
  std::array<std::array<std::uint8_t, 2>, 12> edges{};
  int e = 0;
  for (int c = 0; c < 8; ++c)
    for (int axis = 0; axis < 3; ++axis)
      if (!(c & (1 << axis))) edges[e++] = {static_cast<std::uint8_t>(c), static_cast<std::uint8_t>(c | (1 << axis))};
  return edges;
}

struct CubeFace {
  std::array<int, 4> corners;  // counter-clockwise seen from outside
  std::array<int, 4> edges;    // edges[k] joins corners[k] and corners[k+1]
  Vec3 normal;
};

int edge_between(const std::array<std::array<std::uint8_t, 2>, 12>& edges, int a, int b) {
  for (int e = 0; e < 12; ++e)
    if ((edges[e][0] == a && edges[e][1] == b) || (edges[e][0] == b && edges[e][1] == a)) return e;
  return -1;
}

std::array<CubeFace, 6> build_faces(const std::array<std::array<std::uint8_t, 2>, 12>& edges) {
  std::array<CubeFace, 6> faces{};
  int f = 0;
  for (int axis = 0; axis < 3; ++axis) {
    const int u = (axis + 1) % 3;
    const int v = (axis + 2) % 3;
    for (int side = 0; side < 2; ++side) {
      CubeFace face;
      const std::array<std::pair<int, int>, 4> uv{{{0, 0}, {1, 0}, {1, 1}, {0, 1}}};
      for (int k = 0; k < 4; ++k)
        face.corners[k] = (side << axis) | (uv[k].first << u) | (uv[k].second << v);
      // (u, v) order is counter-clockwise seen from +axis; reverse for the low side.
      if (side == 0) std::reverse(face.corners.begin(), face.corners.end());
      for (int k = 0; k < 4; ++k) face.edges[k] = edge_between(edges, face.corners[k], face.corners[(k + 1) % 4]);
      face.normal = Vec3::Zero();
      face.normal[axis] = side ? 1.0 : -1.0;
      faces[f++] = face;
    }
  }
  return faces;
}

Vec3 edge_mid(const std::array<std::array<std::uint8_t, 2>, 12>& edges, int e) {
  return 0.5 * (corner_offset(edges[e][0]) + corner_offset(edges[e][1]));
}

std::array<CubeCase, 256> build_table() {
  const auto edges = build_edges();
  const auto faces = build_faces(edges);
  std::array<std::array<bool, 12>, 12> share_face{};
  for (const auto& face : faces)
    for (int a : face.edges)
      for (int b : face.edges) share_face[a][b] = true;

  std::array<CubeCase, 256> table{};
  for (int config = 0; config < 256; ++config) {
    auto inside = [&](int c) { return (config >> c) & 1; };
    std::array<int, 12> next;
    next.fill(-1);
    for (const auto& face : faces) {
      auto add_segment = [&](int e1, int e2, int corner) {
        const Vec3 m1 = edge_mid(edges, e1);
        const Vec3 m2 = edge_mid(edges, e2);
        // Inside corner on the left of the segment, viewed from outside the cube.
        if ((m2 - m1).cross(corner_offset(corner) - m1).dot(face.normal) < 0.0) std::swap(e1, e2);
        next[e1] = e2;
      };
      std::array<int, 4> crossing{};
      int nc = 0;
      for (int k = 0; k < 4; ++k)
        if (inside(face.corners[k]) != inside(face.corners[(k + 1) % 4])) crossing[nc++] = k;
      if (nc == 2) {
        int corner = -1;
        for (int c : face.corners)
          if (inside(c)) corner = c;
        add_segment(face.edges[crossing[0]], face.edges[crossing[1]], corner);
      } else if (nc == 4) {
        // Diagonal pattern: cut off each inside corner on its own.
        for (int k = 0; k < 4; ++k) {
          const int c = face.corners[k];
          if (!inside(c)) continue;
          add_segment(face.edges[(k + 3) % 4], face.edges[k], c);
        }
      }
    }

    std::array<bool, 12> used{};
    CubeCase& out = table[config];
    for (int start = 0; start < 12; ++start) {
      if (next[start] < 0 || used[start]) continue;
      std::vector<int> cycle;
      for (int e = start; !used[e]; e = next[e]) {
        used[e] = true;
        cycle.push_back(e);
      }
      // Triangulate without diagonals that join two edges of one cube face:
      // such a segment could also appear in the neighbouring cell.
      std::vector<std::array<std::uint8_t, 3>> tris;
      std::function<bool(std::vector<int>)> triangulate = [&](std::vector<int> poly) -> bool {
        const std::size_t m = poly.size();
        if (m < 3) return true;
        if (m == 3) {
          tris.push_back({static_cast<std::uint8_t>(poly[0]), static_cast<std::uint8_t>(poly[1]),
                          static_cast<std::uint8_t>(poly[2])});
          return true;
        }
        for (std::size_t k = 1; k + 1 < m; ++k) {
          const bool left_diag = k != 1;
          const bool right_diag = k != m - 2;
          if (left_diag && share_face[poly[0]][poly[k]]) continue;
          if (right_diag && share_face[poly[k]][poly[m - 1]]) continue;
          const std::size_t mark = tris.size();
          tris.push_back({static_cast<std::uint8_t>(poly[0]), static_cast<std::uint8_t>(poly[k]),
                          static_cast<std::uint8_t>(poly[m - 1])});
          if (triangulate(std::vector<int>(poly.begin(), poly.begin() + static_cast<long>(k) + 1)) &&
              triangulate(std::vector<int>(poly.begin() + static_cast<long>(k), poly.end())))
            return true;
          tris.resize(mark);
        }
        return false;
      };
      bool ok = false;
      for (std::size_t rot = 0; rot < cycle.size() && !ok; ++rot) {
        tris.clear();
        std::vector<int> poly(cycle.begin() + static_cast<long>(rot), cycle.end());
        poly.insert(poly.end(), cycle.begin(), cycle.begin() + static_cast<long>(rot));
        ok = triangulate(poly);
      }
      if (!ok) throw std::logic_error("marching cubes table: cycle without admissible triangulation");
      out.triangles.insert(out.triangles.end(), tris.begin(), tris.end());
    }
  }

  // Orient so normals leave the inside region: check the single-corner case.
  const auto& probe = table[1].triangles.front();
  const Vec3 a = edge_mid(edges, probe[0]);
  const Vec3 b = edge_mid(edges, probe[1]);
  const Vec3 c = edge_mid(edges, probe[2]);
  if ((b - a).cross(c - a).dot((a + b + c) / 3.0 - corner_offset(0)) < 0.0)
    for (auto& cs : table)
      for (auto& t : cs.triangles) std::swap(t[1], t[2]);
  return table;
}

}  // namespace

const std::array<std::array<std::uint8_t, 2>, 12>& cube_edge_corners() {
  static const auto edges = build_edges();
  return edges;
}

const std::array<CubeCase, 256>& marching_cubes_table() {
  static const auto table = build_table();
  return table;
}

TriMesh marching_cubes(const ScalarField& field, double isovalue) {
  const auto& grid = field.grid;
  validate(grid);
  if (field.values.size() != grid.node_count()) fail(ErrorKind::Validation, "field value count does not match grid");
  const int nx = grid.dims[0];
  const int ny = grid.dims[1];
  const int nz = grid.dims[2];
  for (int k = 0; k < nz; ++k)
    for (int j = 0; j < ny; ++j)
      for (int i = 0; i < nx; ++i)
        if (grid.on_boundary(i, j, k) && field.inside(grid.index(i, j, k), isovalue)) {
          std::ostringstream msg;
          msg << "inside node (" << i << ", " << j << ", " << k << ") on the grid boundary";
          fail(ErrorKind::Geometry, msg.str());
        }

  const auto& table = marching_cubes_table();
  const auto& edges = cube_edge_corners();
  std::array<std::array<int, 3>, 8> corner_step{};
  for (int c = 0; c < 8; ++c) corner_step[c] = {c & 1, (c >> 1) & 1, (c >> 2) & 1};

  // Per z-layer of cells: triangles as global edge keys (node index * 3 + axis).
  const int layers = nz - 1;
  std::vector<std::vector<std::array<std::uint64_t, 3>>> per_layer(static_cast<std::size_t>(layers));
  parallel_for(static_cast<std::size_t>(layers), [&](std::size_t k0, std::size_t k1) {
    for (int k = static_cast<int>(k0); k < static_cast<int>(k1); ++k) {
      auto& tris = per_layer[static_cast<std::size_t>(k)];
      for (int j = 0; j + 1 < ny; ++j) {
        for (int i = 0; i + 1 < nx; ++i) {
          int config = 0;
          for (int c = 0; c < 8; ++c) {
            const auto& s = corner_step[c];
            if (field.inside(grid.index(i + s[0], j + s[1], k + s[2]), isovalue)) config |= 1 << c;
          }
          if (config == 0 || config == 255) continue;
          for (const auto& t : table[config].triangles) {
            std::array<std::uint64_t, 3> keys{};
            for (int v = 0; v < 3; ++v) {
              const int c0 = edges[t[v]][0];
              const int c1 = edges[t[v]][1];
              const int axis = (c0 ^ c1) == 1 ? 0 : ((c0 ^ c1) == 2 ? 1 : 2);
              const auto& s = corner_step[c0];
              keys[v] = grid.index(i + s[0], j + s[1], k + s[2]) * 3 + static_cast<std::uint64_t>(axis);
            }
            tris.push_back(keys);
          }
        }
      }
    }
  });

  TriMesh mesh;
  std::vector<std::int32_t> vertex_of(grid.node_count() * 3, -1);
  for (const auto& layer : per_layer) {
    for (const auto& keys : layer) {
      Face face{};
      for (int v = 0; v < 3; ++v) {
        auto& slot = vertex_of[keys[v]];
        if (slot < 0) {
          slot = static_cast<std::int32_t>(mesh.vertices.size());
          const std::size_t node = keys[v] / 3;
          const int axis = static_cast<int>(keys[v] % 3);
          const int i = static_cast<int>(node % static_cast<std::size_t>(nx));
          const int j = static_cast<int>((node / static_cast<std::size_t>(nx)) % static_cast<std::size_t>(ny));
          const int k = static_cast<int>(node / (static_cast<std::size_t>(nx) * ny));
          Vec3 p = grid.node(i, j, k);
          double frac = 0.5;
          if (field.mode == FieldMode::Distance) {
            std::array<int, 3> step{0, 0, 0};
            step[axis] = 1;
            const double v0 = field.values[node];
            const double v1 = field.at(i + step[0], j + step[1], k + step[2]);
            frac = (isovalue - v0) / (v1 - v0);
          }
          p[axis] = grid.origin[axis] + (std::array<int, 3>{i, j, k}[axis] + frac) * grid.spacing[axis];
          mesh.vertices.push_back(p);
        }
        face[v] = static_cast<std::uint32_t>(slot);
      }
      mesh.faces.push_back(face);
    }
  }
  if (mesh.faces.empty()) fail(ErrorKind::EmptyMesh, "field has no inside region; the mesh would be empty");
  return mesh;
}

}  // namespace forge
