#pragma once

#include "forge/differential_evolution.hpp"
#include "forge/knot.hpp"

#include <utility>
#include <vector>

namespace forge {

struct ParamInterval {
  double begin = 0.0;
  double end = 0.0;
};

struct ArcDistance {
  double xi = 0.0;    // global parameter on the first arc
  double zeta = 0.0;  // global parameter on the second arc
  double distance = 0.0;
};

// Minimum distance between two arcs of the curve, each reparameterized to [0, 1],
// found by differential evolution followed by a Gauss-Newton polish; polishes
// started from a 3x3 grid of (u, v) points are kept when they do better.
// Arcs that overlap or share an endpoint are rejected with Error(Precondition).
ArcDistance min_arc_distance(const KnotSpec& spec, ParamInterval arc_i, ParamInterval arc_j, const DEConfig& cfg);

struct IntersectionOptions {
  double rel_err = 0.025;       // discretization tolerance for the segment partition
  double threshold = 1e-6;      // distance below which a pair is a crossing
  double dedup_radius = 1e-4;   // crossings closer than this are the same point
};

struct PairMinimum {
  std::size_t i = 0;
  std::size_t j = 0;
  ArcDistance arc;
};

struct IntersectionSet {
  std::vector<Vec3> points;
  std::vector<std::pair<double, double>> parameter_pairs;
  std::size_t segments = 0;
  // Minimum found for every non-adjacent segment pair that survived the
  // bounding-ball test, in (i, j) order. A pair holding several crossings
  // contributes one further entry per crossing found after splitting it around
  // the first. Loops closing within a segment (i, i) or across a shared vertex
  // (i, i + 1) appear only when they cross.
  std::vector<PairMinimum> pair_minima;

  std::size_t count() const noexcept { return points.size(); }
  // Pairs with distance below `threshold`, before deduplication.
  std::size_t raw_hits(double threshold) const;
};

IntersectionSet count_self_intersections(const KnotSpec& spec, const DEConfig& cfg,
                                         const IntersectionOptions& opts = {});
// Uses the segment partition of an existing parametric polygon.
IntersectionSet count_self_intersections(const PolyCurve& curve, const DEConfig& cfg,
                                         const IntersectionOptions& opts = {});

// Closed curve with n crossings bounds a genus n + 1 surface; an open arc with
// n crossings bounds genus n.
int genus_from_intersections(int n, bool closed);

}  // namespace forge
