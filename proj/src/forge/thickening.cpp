#include "forge/thickening.hpp"

#include "forge/geometry.hpp"
#include "forge/parallel.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace forge {

double RadiusProfile::at(double t) const { return constant + amplitude * std::cos(frequency * t + phase); }

void validate(const RadiusProfile& profile) {
  if (!std::isfinite(profile.constant) || !std::isfinite(profile.amplitude) || !std::isfinite(profile.phase))
    fail(ErrorKind::Validation, "radius profile values must be finite");
  if (profile.amplitude < 0.0) fail(ErrorKind::Validation, "radius amplitude must be nonnegative");
  if (profile.frequency < 0) fail(ErrorKind::Validation, "radius frequency must be nonnegative");
  if (!(profile.min_radius() > 0.0)) fail(ErrorKind::Validation, "radius profile must stay positive (c - a > 0)");
}

ReachEstimate estimate_reach(const PolyCurve& curve, const std::vector<Vec3>& exclusions, double exclusion_radius) {
  if (!(exclusion_radius >= 0.0)) fail(ErrorKind::Precondition, "exclusion radius must be nonnegative");
  const auto& pts = curve.points;
  const std::size_t np = pts.size();
  const std::size_t ns = curve.segment_count();
  if (ns < 2) fail(ErrorKind::Precondition, "curve needs at least two segments");

  double r_curv = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < np; ++i) {
    if (!curve.closed && (i == 0 || i + 1 == np)) continue;
    const Vec3& prev = pts[(i + np - 1) % np];
    const Vec3& next = pts[(i + 1) % np];
    r_curv = std::min(r_curv, circumradius(prev, pts[i], next));
  }

  std::vector<double> mid_arc(ns);
  std::vector<Vec3> mids(ns);
  std::vector<double> half_len(ns);
  std::vector<char> usable(ns, 1);
  double s = 0.0;
  for (std::size_t i = 0; i < ns; ++i) {
    const double len = (curve.segment_end(i) - curve.segment_start(i)).norm();
    mid_arc[i] = s + 0.5 * len;
    s += len;
    const Vec3 mid = 0.5 * (curve.segment_start(i) + curve.segment_end(i));
    mids[i] = mid;
    half_len[i] = 0.5 * len;
    for (const auto& x : exclusions)
      if ((mid - x).norm() <= exclusion_radius) usable[i] = 0;
  }
  const double total = s;
  const double min_separation = kPi * r_curv;

  struct Best {
    double d = std::numeric_limits<double>::infinity();
    std::size_t i = 0, j = 0;
  };
  const std::size_t workers = worker_count();
  std::vector<Best> partial(ns);
  parallel_for(ns, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      Best best;
      if (!usable[i]) {
        partial[i] = best;
        continue;
      }
      for (std::size_t j = i + 2; j < ns; ++j) {
        if (!usable[j]) continue;
        if (curve.closed && i == 0 && j + 1 == ns) continue;
        double sep = mid_arc[j] - mid_arc[i];
        if (curve.closed) sep = std::min(sep, total - sep);
        if (!(sep >= min_separation)) continue;
        if ((mids[i] - mids[j]).norm() - half_len[i] - half_len[j] >= best.d) continue;
        const double d = segment_segment(curve.segment_start(i), curve.segment_end(i), curve.segment_start(j),
                                         curve.segment_end(j));
        if (d < best.d) best = {d, i, j};
      }
      partial[i] = best;
    }
  }, std::max<std::size_t>(1, ns / (8 * workers)));

  Best best;
  for (const auto& b : partial)
    if (b.d < best.d) best = b;

  ReachEstimate out;
  const double pair_bound = 0.5 * best.d;
  if (pair_bound < r_curv) {
    out.reach = pair_bound;
    out.limiting_pair = std::make_pair(best.i, best.j);
  } else {
    out.reach = r_curv;
    out.curvature_limited = std::isfinite(r_curv);
  }
  if (!(out.reach < kReachCap)) {
    out.reach = kReachCap;
    out.capped = true;
    out.curvature_limited = false;
    out.limiting_pair.reset();
  }
  return out;
}

RadiusProfile admissible_profile(const ReachEstimate& reach, double voxel_size, int frequency, double a_frac,
                                 std::optional<double> max_radius, double phase) {
  if (frequency < 1 || frequency > 20) fail(ErrorKind::Precondition, "radial frequency must lie in [1, 20]");
  if (!(a_frac >= 0.0 && a_frac < 1.0)) fail(ErrorKind::Precondition, "a_frac must lie in [0, 1)");
  if (!(voxel_size > 0.0)) fail(ErrorKind::Precondition, "voxel size must be positive");
  if (!(reach.reach > 0.0)) fail(ErrorKind::Infeasible, "reach is zero; exclude the crossings first");

  const double reach_limit = kReachSafety * reach.reach;
  const double floor = kMinRadiusVoxels * voxel_size;
  double r_hi = reach_limit;
  if (max_radius) {
    if (*max_radius > reach_limit) {
      std::ostringstream msg;
      msg << "requested radius " << *max_radius << " exceeds 0.95 * reach = " << reach_limit << " (binding: reach)";
      fail(ErrorKind::Infeasible, msg.str());
    }
    r_hi = *max_radius;
  }
  if (r_hi < floor) {
    std::ostringstream msg;
    msg << "largest radius " << r_hi << " is below the 2-voxel floor " << floor << " (binding: voxel size)";
    fail(ErrorKind::Infeasible, msg.str());
  }
  RadiusProfile profile;
  profile.frequency = frequency;
  profile.phase = phase;
  profile.amplitude = a_frac * (r_hi - floor) / 2.0;
  profile.constant = r_hi - profile.amplitude;
  return profile;
}

}  // namespace forge
