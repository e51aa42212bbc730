#pragma once

#include "forge/knot.hpp"
#include "forge/trimesh.hpp"

namespace fixture {

forge::TriMesh octahedron();

// Flat torus: an n x m grid with wraparound, two triangles per cell.
forge::TriMesh torus_grid(int n, int m);

// Unit square split into triangles (0,1,2) and (1,3,2); one boundary loop.
forge::TriMesh strip4();

forge::TriMesh translated(const forge::TriMesh& mesh, const forge::Vec3& offset);
forge::TriMesh merged(const forge::TriMesh& a, const forge::TriMesh& b);

// Two parallel segments at distance 2h joined by semicircles (a stadium), in z = 0.
forge::PolyCurve stadium(double half_gap, double length, int points_per_side);

forge::KnotSpec lissajous(int nx, int ny, int nz, double px = 0, double py = 0, double pz = 0);
forge::KnotSpec fibonacci(int nx, int ny, int nz, double px = 0, double py = 0, double pz = 0);

// Planar figure eight x = sin t, y = sin 2t, z = 0.
forge::KnotSpec figure_eight();

}  // namespace fixture

namespace forge {
class Rng;
}

namespace fixture {

// True when the closed curve traces itself more than once, so its crossing
// set is not finite.
bool multiply_covered(const forge::KnotSpec& spec);

// Lissajous or Fibonacci spec from the dataset search space: frequencies in
// [1, 12] without a common factor and one nonzero phase from
// {pi/2, pi/3, pi/5, pi/7}. Multiply covered curves are skipped. Redrawn until discretize() gives at most
// max_segments segments.
forge::KnotSpec random_search_space_spec(forge::Rng& rng, std::size_t max_segments);

}  // namespace fixture
