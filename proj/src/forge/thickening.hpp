#pragma once

#include "forge/knot.hpp"

#include <optional>
#include <utility>
#include <vector>

namespace forge {

// Tube radius along the curve: delta(t) = c + a cos(f t + phase).
struct RadiusProfile {
  double constant = 0.1;
  double amplitude = 0.0;
  int frequency = 0;
  double phase = 0.0;

  double at(double t) const;
  double min_radius() const { return constant - amplitude; }
  double max_radius() const { return constant + amplitude; }

  bool operator==(const RadiusProfile&) const = default;
};

void validate(const RadiusProfile& profile);

inline constexpr double kReachCap = 1e6;

struct ReachEstimate {
  double reach = kReachCap;
  std::optional<std::pair<std::size_t, std::size_t>> limiting_pair;  // set when a segment pair binds
  bool curvature_limited = false;
  bool capped = false;  // no finite bound was found
};

/// Reach of a polygonal curve, with the neighbourhoods of known crossings removed.
///
/// The estimate is min(R_curv, d_min / 2), where R_curv is the smallest
/// circumradius of consecutive point triples and d_min the smallest distance
/// between segments that are at least pi * R_curv apart along the curve
/// (closer pairs cannot undercut R_curv). Pairs with either midpoint inside
/// `exclusion_radius` of a crossing are ignored.
ReachEstimate estimate_reach(const PolyCurve& curve, const std::vector<Vec3>& exclusions, double exclusion_radius);

inline constexpr double kReachSafety = 0.95;
inline constexpr double kMinRadiusVoxels = 2.0;

/// Largest admissible sinusoidal profile: c + a <= min(0.95 rho, max_radius) and
/// c - a >= 2 voxels, with a = a_frac * (r_hi - r_lo) / 2 and c + a pinned to r_hi.
/// Throws Error(Infeasible) naming the binding constraint.
RadiusProfile admissible_profile(const ReachEstimate& reach, double voxel_size, int frequency, double a_frac,
                                 std::optional<double> max_radius = std::nullopt, double phase = 0.0);

}  // namespace forge
