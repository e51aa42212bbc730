#include "forge/self_intersect.hpp"

#include "forge/parallel.hpp"
#include "forge/rng.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>

namespace forge {

namespace {

bool arcs_touch(const ParamInterval& a, const ParamInterval& b, bool closed, double period) {
  constexpr double eps = 1e-12;
  const std::array<double, 3> shifts{-period, 0.0, period};
  for (double s : shifts) {
    if (!closed && s != 0.0) continue;
    if (a.begin <= b.end + s + eps && b.begin + s <= a.end + eps) return true;
  }
  return false;
}

// Squared-distance polish: damped Gauss-Newton on r(u, v) = K(a(u)) - K(b(v)), clamped to the unit box.
void polish(const KnotSpec& spec, const ParamInterval& a, const ParamInterval& b, double& u, double& v,
            double& dist2) {
  const double la = a.end - a.begin;
  const double lb = b.end - b.begin;
  double lambda = 1e-9;
  for (int it = 0; it < 60; ++it) {
    const double ta = a.begin + u * la;
    const double tb = b.begin + v * lb;
    const Vec3 r = evaluate(spec, ta) - evaluate(spec, tb);
    Eigen::Matrix<double, 3, 2> jac;
    jac.col(0) = derivative(spec, ta) * la;
    jac.col(1) = -derivative(spec, tb) * lb;
    const Eigen::Matrix2d jtj = jac.transpose() * jac;
    const Eigen::Vector2d g = jac.transpose() * r;
    bool improved = false;
    for (int attempt = 0; attempt < 8 && !improved; ++attempt) {
      Eigen::Matrix2d damped = jtj;
      damped.diagonal().array() += lambda * (1.0 + jtj.diagonal().array());
      const Eigen::Vector2d step = damped.ldlt().solve(-g);
      if (!step.allFinite()) break;
      const double nu = std::clamp(u + step[0], 0.0, 1.0);
      const double nv = std::clamp(v + step[1], 0.0, 1.0);
      const double d2 = (evaluate(spec, a.begin + nu * la) - evaluate(spec, b.begin + nv * lb)).squaredNorm();
      if (d2 < dist2) {
        const double gain = dist2 - d2;
        u = nu;
        v = nv;
        dist2 = d2;
        lambda = std::max(lambda * 0.1, 1e-15);
        improved = true;
        if (gain <= 1e-32) return;
      } else {
        lambda *= 10.0;
      }
    }
    if (!improved) return;
  }
}

ArcDistance minimize_arcs(const KnotSpec& spec, const ParamInterval& a, const ParamInterval& b, const DEConfig& cfg) {
  const double la = a.end - a.begin;
  const double lb = b.end - b.begin;
  const Objective objective = [&](std::span<const double> x) {
    return (evaluate(spec, a.begin + x[0] * la) - evaluate(spec, b.begin + x[1] * lb)).squaredNorm();
  };
  const std::array<double, 2> lower{0.0, 0.0};
  const std::array<double, 2> upper{1.0, 1.0};
  const DEResult de = differential_evolution(objective, lower, upper, cfg);
  double u = de.x[0];
  double v = de.x[1];
  double d2 = de.value;
  polish(spec, a, b, u, v, d2);
  // Polished grid starts guard against DE settling in a boundary basin.
  for (int gi = 0; gi < 3; ++gi)
    for (int gj = 0; gj < 3; ++gj) {
      double su = (gi + 0.5) / 3.0;
      double sv = (gj + 0.5) / 3.0;
      double s2 = objective(std::array<double, 2>{su, sv});
      polish(spec, a, b, su, sv, s2);
      if (s2 < d2) {
        u = su;
        v = sv;
        d2 = s2;
      }
    }
  return {a.begin + u * la, b.begin + v * lb, std::sqrt(d2)};
}

constexpr int kMaxSplitDepth = 4;

// Minimum of the arc pair, then, when it is a crossing, the sub-rectangles of
// the pair left after cutting out a band around it. Points inside the band lie
// within dedup_radius of the crossing, so every further distinct crossing of
// the pair stays searchable. Only the first result may be a non-crossing;
// later ones must be interior minima of their sub-rectangle.
void search_pair(const KnotSpec& spec, const ParamInterval& a, const ParamInterval& b, const DEConfig& cfg,
                 const IntersectionOptions& opts, double speed, int depth, std::vector<ArcDistance>& out) {
  const ArcDistance m = minimize_arcs(spec, a, b, cfg);
  const bool hit = m.distance < opts.threshold;
  if (depth > 0) {
    // A minimum on the sub-rectangle edge is the tail of a tangential contact
    // already recorded, not a further crossing.
    const double eps = 1e-9 * ((a.end - a.begin) + (b.end - b.begin));
    const bool interior = m.xi > a.begin + eps && m.xi < a.end - eps && m.zeta > b.begin + eps && m.zeta < b.end - eps;
    if (!hit || !interior) return;
  }
  out.push_back(m);
  if (!hit || depth >= kMaxSplitDepth || speed <= 0.0) return;
  const double band = opts.dedup_radius / speed;
  const std::array<ParamInterval, 2> sa{ParamInterval{a.begin, m.xi - band}, ParamInterval{m.xi + band, a.end}};
  const std::array<ParamInterval, 2> sb{ParamInterval{b.begin, m.zeta - band}, ParamInterval{m.zeta + band, b.end}};
  int child = 0;
  for (const auto& x : sa)
    for (const auto& y : sb) {
      ++child;
      if (!(x.begin < x.end) || !(y.begin < y.end)) continue;
      const double gap = (evaluate(spec, 0.5 * (x.begin + x.end)) - evaluate(spec, 0.5 * (y.begin + y.end))).norm() -
                         0.5 * speed * ((x.end - x.begin) + (y.end - y.begin));
      if (gap > opts.threshold) continue;
      DEConfig sub = cfg;
      sub.rng_seed = mix_seed(cfg.rng_seed, static_cast<std::uint64_t>(child));
      search_pair(spec, x, y, sub, opts, speed, depth + 1, out);
    }
}

}  // namespace

ArcDistance min_arc_distance(const KnotSpec& spec, ParamInterval arc_i, ParamInterval arc_j, const DEConfig& cfg) {
  validate(spec);
  validate(cfg);
  if (!(arc_i.begin < arc_i.end) || !(arc_j.begin < arc_j.end))
    fail(ErrorKind::Precondition, "arc intervals must have positive length");
  if (arcs_touch(arc_i, arc_j, spec.closed(), spec.t_max()))
    fail(ErrorKind::Precondition, "arcs are adjacent or overlapping; their distance is trivially zero");
  return minimize_arcs(spec, arc_i, arc_j, cfg);
}

std::size_t IntersectionSet::raw_hits(double threshold) const {
  return static_cast<std::size_t>(std::count_if(pair_minima.begin(), pair_minima.end(),
                                                [&](const PairMinimum& p) { return p.arc.distance < threshold; }));
}

IntersectionSet count_self_intersections(const KnotSpec& spec, const DEConfig& cfg, const IntersectionOptions& opts) {
  return count_self_intersections(discretize(spec, opts.rel_err), cfg, opts);
}

IntersectionSet count_self_intersections(const PolyCurve& curve, const DEConfig& cfg, const IntersectionOptions& opts) {
  validate(cfg);
  const KnotSpec& spec = curve.source;
  validate(spec);
  if (!(opts.threshold > 0.0) || !(opts.dedup_radius >= 0.0))
    fail(ErrorKind::Precondition, "threshold must be positive and dedup radius nonnegative");

  const std::size_t n = curve.segment_count();
  IntersectionSet out;
  out.segments = n;

  // Each arc lies in a ball around its parameter midpoint whose radius follows from the speed bound.
  const double speed = speed_bound(spec);
  std::vector<ParamInterval> arcs(n);
  std::vector<Vec3> centers(n);
  std::vector<double> radii(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto [t0, t1] = curve.segment_params(i);
    arcs[i] = {t0, t1};
    centers[i] = evaluate(spec, 0.5 * (t0 + t1));
    radii[i] = 0.5 * (t1 - t0) * speed;
  }

  // Regular jobs are the non-adjacent segment pairs. Local jobs look
  // for small loops closing within one segment or across a shared vertex: the
  // two sides of the segment midpoint or shared vertex are searched with a
  // band around it removed, keeping only interior minima.
  struct Job {
    std::size_t i = 0;
    std::size_t j = 0;
    ParamInterval a, b;
    bool local = false;
  };
  const double band = speed > 0.0 ? opts.dedup_radius / speed : 0.0;
  std::vector<Job> jobs;
  for (std::size_t i = 0; i < n; ++i) {
    const double mid = 0.5 * (arcs[i].begin + arcs[i].end);
    jobs.push_back({i, i, {arcs[i].begin, mid - band}, {mid + band, arcs[i].end}, true});
    const bool wraps = curve.closed && i + 1 == n;
    if (i + 1 < n || wraps) {
      const std::size_t j = wraps ? 0 : i + 1;
      const double shift = wraps ? curve.param_period : 0.0;
      jobs.push_back({i, j, {arcs[i].begin, arcs[i].end - band}, {arcs[j].begin + shift + band, arcs[j].end + shift}, true});
    }
    for (std::size_t j = i + 2; j < n; ++j) {
      if (curve.closed && i == 0 && j == n - 1) continue;  // wraparound neighbours
      if ((centers[i] - centers[j]).norm() - radii[i] - radii[j] > opts.threshold) continue;
      jobs.push_back({i, j, arcs[i], arcs[j], false});
    }
  }
  std::erase_if(jobs, [](const Job& job) { return !(job.a.begin < job.a.end) || !(job.b.begin < job.b.end); });

  std::vector<std::vector<ArcDistance>> found(jobs.size());
  parallel_for(jobs.size(), [&](std::size_t begin, std::size_t end) {
    for (std::size_t k = begin; k < end; ++k) {
      const Job& job = jobs[k];
      DEConfig local = cfg;
      local.rng_seed = mix_seed(cfg.rng_seed, (static_cast<std::uint64_t>(job.i) << 32) | job.j);
      if (job.local) local.rng_seed = mix_seed(local.rng_seed, 1);
      search_pair(spec, job.a, job.b, local, opts, speed, job.local ? 1 : 0, found[k]);
    }
  });

  std::vector<PairMinimum> minima;
  minima.reserve(jobs.size());
  for (std::size_t k = 0; k < jobs.size(); ++k)
    for (const auto& arc : found[k]) minima.push_back({jobs[k].i, jobs[k].j, arc});

  for (const auto& m : minima) {
    if (!(m.arc.distance < opts.threshold)) continue;
    const Vec3 p = evaluate(spec, m.arc.xi);
    const bool seen = std::any_of(out.points.begin(), out.points.end(),
                                  [&](const Vec3& q) { return (p - q).norm() < opts.dedup_radius; });
    if (seen) continue;
    out.points.push_back(p);
    out.parameter_pairs.emplace_back(m.arc.xi, m.arc.zeta);
  }
  out.pair_minima = std::move(minima);
  return out;
}

int genus_from_intersections(int n, bool closed) {
  if (n < 0) fail(ErrorKind::Domain, "intersection count must be nonnegative");
  return closed ? n + 1 : n;
}

}  // namespace forge
