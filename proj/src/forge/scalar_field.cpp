#include "forge/scalar_field.hpp"

#include "forge/geometry.hpp"
#include "forge/parallel.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace forge {

const char* to_string(FieldMode mode) noexcept { return mode == FieldMode::Sign ? "sign" : "distance"; }

FieldMode parse_field_mode(const std::string& name) {
  if (name == "sign") return FieldMode::Sign;
  if (name == "distance") return FieldMode::Distance;
  fail(ErrorKind::Validation, "unknown field mode '" + name + "' (expected sign or distance)");
}

void validate(const GridSpec& grid) {
  for (int a = 0; a < 3; ++a) {
    if (grid.dims[a] < 2) fail(ErrorKind::Validation, "grid needs at least 2 nodes per axis");
    if (!(grid.spacing[a] > 0.0) || !std::isfinite(grid.spacing[a]))
      fail(ErrorKind::Validation, "grid spacing must be positive");
    if (!std::isfinite(grid.origin[a])) fail(ErrorKind::Validation, "grid origin must be finite");
  }
}

CurveFoot point_to_curve(const Vec3& p, const PolyCurve& curve) {
  const std::size_t n = curve.segment_count();
  if (n == 0) fail(ErrorKind::Precondition, "curve has no segments");
  CurveFoot best{std::numeric_limits<double>::infinity(), 0.0, 0};
  double best_s = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const SegmentFoot f = point_segment(p, curve.segment_start(i), curve.segment_end(i));
    if (f.distance < best.distance) {
      best.distance = f.distance;
      best.segment = i;
      best_s = f.s;
    }
  }
  const auto [t0, t1] = curve.segment_params(best.segment);
  best.t = t0 + best_s * (t1 - t0);
  return best;
}

namespace {

std::pair<Vec3, Vec3> bounds(const PolyCurve& curve) {
  Vec3 lo = Vec3::Constant(std::numeric_limits<double>::infinity());
  Vec3 hi = -lo;
  for (const auto& p : curve.points) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  return {lo, hi};
}

// Uniform bucket grid over segments, each registered in every cell its
// radius-inflated bounding box touches. Cell lists keep ascending segment order.
class SegmentBuckets {
 public:
  SegmentBuckets(const PolyCurve& curve, double radius) : curve_(curve) {
    auto [lo, hi] = bounds(curve);
    lo.array() -= radius;
    hi.array() += radius;
    origin_ = lo;
    const Vec3 extent = hi - lo;
    cell_ = std::max({radius, extent.maxCoeff() / 64.0, 1e-12});
    for (int a = 0; a < 3; ++a) cells_[a] = std::max(1, static_cast<int>(std::floor(extent[a] / cell_)) + 1);
    lists_.resize(static_cast<std::size_t>(cells_[0]) * cells_[1] * cells_[2]);
    for (std::size_t s = 0; s < curve.segment_count(); ++s) {
      const Vec3 a = curve.segment_start(s);
      const Vec3 b = curve.segment_end(s);
      const Vec3 smin = a.cwiseMin(b).array() - radius;
      const Vec3 smax = a.cwiseMax(b).array() + radius;
      std::array<int, 3> c0{}, c1{};
      for (int ax = 0; ax < 3; ++ax) {
        c0[ax] = clamp_cell(ax, smin[ax]);
        c1[ax] = clamp_cell(ax, smax[ax]);
      }
      for (int k = c0[2]; k <= c1[2]; ++k)
        for (int j = c0[1]; j <= c1[1]; ++j)
          for (int i = c0[0]; i <= c1[0]; ++i) lists_[flat(i, j, k)].push_back(static_cast<std::uint32_t>(s));
    }
  }

  // Segments possibly within `radius` of p; empty if p is outside the inflated box.
  const std::vector<std::uint32_t>* candidates(const Vec3& p) const {
    std::array<int, 3> c{};
    for (int ax = 0; ax < 3; ++ax) {
      const double u = (p[ax] - origin_[ax]) / cell_;
      if (u < 0.0 || u >= cells_[ax]) return nullptr;
      c[ax] = static_cast<int>(u);
    }
    return &lists_[flat(c[0], c[1], c[2])];
  }

 private:
  int clamp_cell(int ax, double x) const {
    return std::clamp(static_cast<int>(std::floor((x - origin_[ax]) / cell_)), 0, cells_[ax] - 1);
  }
  std::size_t flat(int i, int j, int k) const {
    return static_cast<std::size_t>(i) + static_cast<std::size_t>(cells_[0]) * (j + static_cast<std::size_t>(cells_[1]) * k);
  }

  const PolyCurve& curve_;
  Vec3 origin_;
  double cell_ = 1.0;
  std::array<int, 3> cells_{};
  std::vector<std::vector<std::uint32_t>> lists_;
};

}  // namespace

double grid_spacing_for(const PolyCurve& curve, double max_radius, const std::array<int, 3>& dims) {
  const auto [lo, hi] = bounds(curve);
  double spacing = 0.0;
  for (int a = 0; a < 3; ++a) {
    if (dims[a] < 6) fail(ErrorKind::Validation, "fitted grids need at least 6 nodes per axis");
    spacing = std::max(spacing, (hi[a] - lo[a] + 2.0 * max_radius) / (dims[a] - 5));
  }
  return spacing;
}

GridSpec fit_grid(const PolyCurve& curve, double max_radius, const std::array<int, 3>& dims) {
  const auto [lo, hi] = bounds(curve);
  GridSpec grid;
  grid.dims = dims;
  const double s = grid_spacing_for(curve, max_radius, dims);
  grid.spacing = Vec3::Constant(s);
  for (int a = 0; a < 3; ++a) grid.origin[a] = 0.5 * (lo[a] + hi[a]) - 0.5 * s * (dims[a] - 1);
  return grid;
}

ScalarField rasterize(const PolyCurve& curve, const RadiusProfile& profile, const GridSpec& grid, FieldMode mode) {
  validate(grid);
  validate(profile);
  if (curve.segment_count() == 0) fail(ErrorKind::Precondition, "curve has no segments");
  ScalarField field;
  field.grid = grid;
  field.mode = mode;
  field.values.assign(grid.node_count(), 0.0);
  const int nx = grid.dims[0];
  const int ny = grid.dims[1];
  const int nz = grid.dims[2];
  const double reach_out = profile.max_radius();
  const SegmentBuckets buckets(curve, reach_out);

  parallel_for(static_cast<std::size_t>(nz), [&](std::size_t k0, std::size_t k1) {
    for (int k = static_cast<int>(k0); k < static_cast<int>(k1); ++k) {
      for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
          const Vec3 p = grid.node(i, j, k);
          double value;
          if (mode == FieldMode::Distance) {
            const CurveFoot foot = point_to_curve(p, curve);
            value = foot.distance - profile.at(foot.t);
          } else {
            value = -1.0;
            if (const auto* list = buckets.candidates(p); list && !list->empty()) {
              double best = std::numeric_limits<double>::infinity();
              std::size_t seg = 0;
              double s = 0.0;
              for (std::uint32_t c : *list) {
                const SegmentFoot f = point_segment(p, curve.segment_start(c), curve.segment_end(c));
                if (f.distance < best) {
                  best = f.distance;
                  seg = c;
                  s = f.s;
                }
              }
              if (best < reach_out) {
                const auto [t0, t1] = curve.segment_params(seg);
                if (best < profile.at(t0 + s * (t1 - t0))) value = 1.0;
              }
            }
          }
          field.values[grid.index(i, j, k)] = value;
        }
      }
    }
  });

  for (int k = 0; k < nz; ++k)
    for (int j = 0; j < ny; ++j)
      for (int i = 0; i < nx; ++i)
        if (grid.on_boundary(i, j, k) && field.inside(grid.index(i, j, k))) {
          std::ostringstream msg;
          msg << "tube exits the grid at node (" << i << ", " << j << ", " << k << ")";
          fail(ErrorKind::Geometry, msg.str());
        }
  return field;
}

ScalarField rasterize(const PolyCurve& curve, const RadiusProfile& profile, const std::array<int, 3>& dims,
                      FieldMode mode) {
  return rasterize(curve, profile, fit_grid(curve, profile.max_radius(), dims), mode);
}

namespace {

void append_number(std::string& out, double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  out.append(buf, res.ptr);
}

}  // namespace

std::string field_to_text(const ScalarField& field) {
  const auto& g = field.grid;
  std::string out;
  out.reserve(field.values.size() * (field.mode == FieldMode::Sign ? 3 : 20) + 128);
  out += std::to_string(g.dims[0]) + ' ' + std::to_string(g.dims[1]) + ' ' + std::to_string(g.dims[2]) + '\n';
  for (int a = 0; a < 3; ++a) {
    append_number(out, g.origin[a]);
    out += ' ';
  }
  for (int a = 0; a < 3; ++a) {
    append_number(out, g.spacing[a]);
    out += a < 2 ? ' ' : '\n';
  }
  const std::size_t row = static_cast<std::size_t>(g.dims[0]);
  for (std::size_t idx = 0; idx < field.values.size(); ++idx) {
    if (field.mode == FieldMode::Sign)
      out += field.values[idx] > 0.0 ? "1" : "-1";
    else
      append_number(out, field.values[idx]);
    out += (idx + 1) % row == 0 ? '\n' : ' ';
  }
  return out;
}

void write_field(const ScalarField& field, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::Io, "cannot write '" + path + "'");
  const std::string text = field_to_text(field);
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) fail(ErrorKind::Io, "failed writing '" + path + "'");
}

ScalarField field_from_text(const std::string& text) {
  const char* p = text.data();
  const char* end = p + text.size();
  std::size_t token_no = 0;
  auto next_token = [&]() -> std::string_view {
    while (p < end && std::isspace(static_cast<unsigned char>(*p))) ++p;
    const char* start = p;
    while (p < end && !std::isspace(static_cast<unsigned char>(*p))) ++p;
    ++token_no;
    if (start == p) fail(ErrorKind::Parse, "field file truncated at token " + std::to_string(token_no));
    return {start, static_cast<std::size_t>(p - start)};
  };
  auto parse_double = [&](std::string_view tok) {
    double v = 0.0;
    const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (res.ec != std::errc() || res.ptr != tok.data() + tok.size())
      fail(ErrorKind::Parse, "bad number '" + std::string(tok) + "' at token " + std::to_string(token_no));
    return v;
  };
  ScalarField field;
  for (int a = 0; a < 3; ++a) {
    const auto tok = next_token();
    int v = 0;
    const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (res.ec != std::errc() || res.ptr != tok.data() + tok.size())
      fail(ErrorKind::Parse, "bad grid dimension '" + std::string(tok) + "'");
    field.grid.dims[a] = v;
  }
  for (int a = 0; a < 3; ++a) field.grid.origin[a] = parse_double(next_token());
  for (int a = 0; a < 3; ++a) field.grid.spacing[a] = parse_double(next_token());
  validate(field.grid);
  const std::size_t count = field.grid.node_count();
  field.values.resize(count);
  bool all_unit = true;
  for (std::size_t i = 0; i < count; ++i) {
    const auto tok = next_token();
    all_unit = all_unit && (tok == "1" || tok == "-1");
    field.values[i] = parse_double(tok);
  }
  while (p < end && std::isspace(static_cast<unsigned char>(*p))) ++p;
  if (p != end) fail(ErrorKind::Parse, "trailing data after " + std::to_string(count) + " field values");
  field.mode = all_unit ? FieldMode::Sign : FieldMode::Distance;
  return field;
}

ScalarField read_field(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::Io, "cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return field_from_text(buf.str());
}

}  // namespace forge
