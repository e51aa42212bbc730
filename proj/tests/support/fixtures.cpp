#include "fixtures.hpp"

#include "forge/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace fixture {

using forge::Face;
using forge::TriMesh;
using forge::Vec3;

TriMesh octahedron() {
  TriMesh m;
  m.vertices = {{1, 0, 0}, {-1, 0, 0}, {0, 1, 0}, {0, -1, 0}, {0, 0, 1}, {0, 0, -1}};
  // Counter-clockwise seen from outside.
  m.faces = {{0, 2, 4}, {2, 1, 4}, {1, 3, 4}, {3, 0, 4}, {2, 0, 5}, {1, 2, 5}, {3, 1, 5}, {0, 3, 5}};
  return m;
}

TriMesh torus_grid(int n, int m) {
  TriMesh t;
  const double R = 2.0, r = 0.7;
  for (int j = 0; j < m; ++j)
    for (int i = 0; i < n; ++i) {
      const double u = 2 * M_PI * i / n, v = 2 * M_PI * j / m;
      t.vertices.push_back({(R + r * std::cos(v)) * std::cos(u), (R + r * std::cos(v)) * std::sin(u), r * std::sin(v)});
    }
  auto id = [&](int i, int j) { return static_cast<std::uint32_t>(((j + m) % m) * n + (i + n) % n); };
  for (int j = 0; j < m; ++j)
    for (int i = 0; i < n; ++i) {
      t.faces.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
      t.faces.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
    }
  return t;
}

TriMesh strip4() {
  TriMesh m;
  m.vertices = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {1, 1, 0}};
  m.faces = {{0, 1, 2}, {1, 3, 2}};
  return m;
}

TriMesh translated(const TriMesh& mesh, const Vec3& offset) {
  TriMesh out = mesh;
  for (auto& v : out.vertices) v += offset;
  return out;
}

TriMesh merged(const TriMesh& a, const TriMesh& b) {
  TriMesh out = a;
  const auto base = static_cast<std::uint32_t>(a.vertices.size());
  out.vertices.insert(out.vertices.end(), b.vertices.begin(), b.vertices.end());
  for (const auto& f : b.faces) out.faces.push_back({f[0] + base, f[1] + base, f[2] + base});
  return out;
}

forge::PolyCurve stadium(double half_gap, double length, int points_per_side) {
  std::vector<Vec3> pts;
  const double x0 = -length / 2, x1 = length / 2;
  for (int i = 0; i < points_per_side; ++i) pts.push_back({x0 + length * i / points_per_side, -half_gap, 0});
  for (int i = 0; i < points_per_side; ++i) {
    const double a = -M_PI / 2 + M_PI * i / points_per_side;
    pts.push_back({x1 + half_gap * std::cos(a), half_gap * std::sin(a), 0});
  }
  for (int i = 0; i < points_per_side; ++i) pts.push_back({x1 - length * i / points_per_side, half_gap, 0});
  for (int i = 0; i < points_per_side; ++i) {
    const double a = M_PI / 2 + M_PI * i / points_per_side;
    pts.push_back({x0 + half_gap * std::cos(a), half_gap * std::sin(a), 0});
  }
  return forge::polycurve_from_points(std::move(pts), true);
}

forge::KnotSpec lissajous(int nx, int ny, int nz, double px, double py, double pz) {
  forge::KnotSpec s;
  s.family = forge::KnotFamily::Lissajous;
  s.frequencies = {nx, ny, nz};
  s.phases = {px, py, pz};
  return s;
}

forge::KnotSpec fibonacci(int nx, int ny, int nz, double px, double py, double pz) {
  auto s = lissajous(nx, ny, nz, px, py, pz);
  s.family = forge::KnotFamily::Fibonacci;
  return s;
}

forge::KnotSpec figure_eight() {
  forge::KnotSpec s;
  s.family = forge::KnotFamily::FourierGeneral;
  s.frequencies = {0, 0, 0};
  s.terms = {{0, 1.0, 1, -M_PI / 2}, {1, 1.0, 2, -M_PI / 2}};
  return s;
}

}  // namespace fixture

namespace fixture {

bool multiply_covered(const forge::KnotSpec& spec) {
  // Generic parameters are never crossings of a simply traced curve.
  const double probes[] = {0.3721, 1.1234, 2.9017};
  const int samples = 20000;
  for (double t : probes) {
    const forge::Vec3 p = forge::evaluate(spec, t);
    double best = std::numeric_limits<double>::infinity();
    double best_s = 0.0;
    for (int i = 0; i < samples; ++i) {
      const double s = 2 * M_PI * i / samples;
      const double gap = std::min(std::abs(s - t), 2 * M_PI - std::abs(s - t));
      if (gap < 1e-2) continue;
      const double d = (forge::evaluate(spec, s) - p).norm();
      if (d < best) {
        best = d;
        best_s = s;
      }
    }
    // Ternary search on the distance around the best sample.
    double lo = best_s - 2 * M_PI / samples, hi = best_s + 2 * M_PI / samples;
    for (int it = 0; it < 100; ++it) {
      const double m1 = lo + (hi - lo) / 3, m2 = hi - (hi - lo) / 3;
      if ((forge::evaluate(spec, m1) - p).norm() < (forge::evaluate(spec, m2) - p).norm())
        hi = m2;
      else
        lo = m1;
    }
    if ((forge::evaluate(spec, 0.5 * (lo + hi)) - p).norm() > 1e-9) return false;
  }
  return true;
}

forge::KnotSpec random_search_space_spec(forge::Rng& rng, std::size_t max_segments) {
  const double phases[] = {M_PI / 2, M_PI / 3, M_PI / 5, M_PI / 7};
  for (;;) {
    int n[3];
    for (int& v : n) v = 1 + static_cast<int>(rng.below(12));
    std::sort(n, n + 3);
    if (n[0] == n[1] || n[1] == n[2]) continue;
    if (std::gcd(n[0], std::gcd(n[1], n[2])) != 1) continue;
    double phi[3] = {0, 0, 0};
    phi[rng.below(3)] = phases[rng.below(4)];
    auto spec = rng.below(2) == 0 ? lissajous(n[0], n[1], n[2], phi[0], phi[1], phi[2])
                                  : fibonacci(n[0], n[1], n[2], phi[0], phi[1], phi[2]);
    if (multiply_covered(spec)) continue;
    if (forge::discretize(spec).segment_count() <= max_segments) return spec;
  }
}

}  // namespace fixture
