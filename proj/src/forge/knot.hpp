#pragma once

#include "forge/common.hpp"

#include <json.hpp>

#include <array>
#include <optional>
#include <string>
#include <vector>

namespace forge {

enum class KnotFamily { Lissajous, Fibonacci, FourierGeneral, OpenArc };

const char* to_string(KnotFamily family) noexcept;
KnotFamily parse_family(const std::string& name);

// One cosine term A*cos(n*t + phi) contributing to a single coordinate axis.
struct FourierTerm {
  int axis = 0;  // 0 = x, 1 = y, 2 = z
  double amplitude = 1.0;
  int frequency = 1;
  double phase = 0.0;

  bool operator==(const FourierTerm&) const = default;
};

/// Frequency/phase description of a closed (or, for OpenArc, open) parametric curve.
///
/// Lissajous:  (cos(nx t + px), cos(ny t + py), cos(nz t + pz)),  t in [0, 2pi)
/// Fibonacci:  as Lissajous but z = cos(nz t + pz)/2 + sin(ny t + py)/2
/// FourierGeneral: each axis is the sum of its `terms`
/// OpenArc:    the Lissajous formula restricted to t in [0, pi]; not closed
struct KnotSpec {
  KnotFamily family = KnotFamily::Lissajous;
  std::array<int, 3> frequencies{1, 2, 3};
  std::array<double, 3> phases{0.0, 0.0, 0.0};
  std::vector<FourierTerm> terms;

  bool closed() const noexcept { return family != KnotFamily::OpenArc; }
  // Parameter domain is [0, t_max()].
  double t_max() const noexcept { return closed() ? kTwoPi : kPi; }

  bool operator==(const KnotSpec&) const = default;
};

// Throws Error(Validation) when the spec violates its family's invariants.
void validate(const KnotSpec& spec);

Vec3 evaluate(const KnotSpec& spec, double t);
Vec3 derivative(const KnotSpec& spec, double t);

// Upper bound on |K'(t)| over all t.
double speed_bound(const KnotSpec& spec);

struct LissajousReport {
  bool coprime_ok = false;
  std::optional<int> forbidden_phase_hit;
};

// Report-only check of the classical Lissajous non-singularity conditions:
// pairwise coprime frequencies, and phases avoiding
//   px = m pi/nz,  py = m pi/nz,  px = (nx/ny) py + m pi/ny   for 0 < m < nz.
LissajousReport validate_lissajous(const KnotSpec& spec);

struct PolyCurve {
  std::vector<Vec3> points;
  std::vector<double> params;  // curve parameter of each point
  double param_period = kTwoPi;  // parameter at which a closed curve returns to points[0]
  bool closed = true;
  double chord_length = 0.0;
  KnotSpec source;

  std::size_t segment_count() const noexcept {
    return closed ? points.size() : (points.empty() ? 0 : points.size() - 1);
  }
  // Parameter interval [t0, t1] of segment i (t1 may equal t_max for the closing segment).
  std::pair<double, double> segment_params(std::size_t i) const;
  const Vec3& segment_start(std::size_t i) const { return points[i]; }
  const Vec3& segment_end(std::size_t i) const { return points[(i + 1) % points.size()]; }
};

// Polygon through n uniformly spaced parameter values.
PolyCurve sample_uniform(const KnotSpec& spec, std::size_t n);

double polygon_length(const KnotSpec& spec, std::size_t n);

// Smallest uniform polygon whose length is within rel_err of a 64x oversampled reference.
PolyCurve discretize(const KnotSpec& spec, double rel_err = 0.025);

// Builds a PolyCurve from explicit points (test fixtures and non-parametric inputs).
// Parameters are assigned as cumulative chord length.
PolyCurve polycurve_from_points(std::vector<Vec3> points, bool closed);

// The unit circle in the z = 0 plane as a FourierGeneral spec.
KnotSpec unit_circle_spec();

void to_json(nlohmann::json& j, const KnotSpec& spec);
void from_json(const nlohmann::json& j, KnotSpec& spec);

KnotSpec load_knot(const std::string& path);

}  // namespace forge
