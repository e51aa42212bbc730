#pragma once

#include "forge/trimesh.hpp"

namespace forge {

// Uniform Laplacian smoothing, Jacobi style: every iteration moves each vertex
// by factor * (mean of neighbours - v) using the previous positions.
// Connectivity is untouched. The mesh must be closed (watertight).
TriMesh smooth(const TriMesh& mesh, int iterations = 10, double factor = 0.5);

// Sum over interior edges of |dihedral angle deviation| * edge length; a
// discrete total absolute mean curvature.
double total_absolute_mean_curvature(const TriMesh& mesh);

}  // namespace forge
