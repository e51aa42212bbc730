#pragma once

#include "forge/knot.hpp"
#include "forge/thickening.hpp"

#include <array>
#include <string>
#include <vector>

namespace forge {

// Sign mode stores +1 inside the tube and -1 outside. Distance mode stores
// distance(p, curve) - delta(t*), i.e. negative inside.
enum class FieldMode { Sign, Distance };

const char* to_string(FieldMode mode) noexcept;
FieldMode parse_field_mode(const std::string& name);

struct GridSpec {
  std::array<int, 3> dims{100, 100, 100};
  Vec3 origin = Vec3::Zero();
  Vec3 spacing = Vec3::Constant(0.02);

  std::size_t node_count() const { return static_cast<std::size_t>(dims[0]) * dims[1] * dims[2]; }
  std::size_t index(int i, int j, int k) const {
    return static_cast<std::size_t>(i) + static_cast<std::size_t>(dims[0]) * (j + static_cast<std::size_t>(dims[1]) * k);
  }
  Vec3 node(int i, int j, int k) const {
    return {origin[0] + i * spacing[0], origin[1] + j * spacing[1], origin[2] + k * spacing[2]};
  }
  bool on_boundary(int i, int j, int k) const {
    return i == 0 || j == 0 || k == 0 || i == dims[0] - 1 || j == dims[1] - 1 || k == dims[2] - 1;
  }
};

void validate(const GridSpec& grid);

struct ScalarField {
  GridSpec grid;
  FieldMode mode = FieldMode::Sign;
  std::vector<double> values;  // x fastest, z slowest

  double at(int i, int j, int k) const { return values[grid.index(i, j, k)]; }
  bool inside(std::size_t idx, double isovalue = 0.0) const {
    return mode == FieldMode::Sign ? values[idx] > isovalue : values[idx] < isovalue;
  }
};

struct CurveFoot {
  double distance = 0.0;
  double t = 0.0;            // global curve parameter of the foot point
  std::size_t segment = 0;
};

// Exact nearest point on the polygon; ties resolve to the lowest segment index.
CurveFoot point_to_curve(const Vec3& p, const PolyCurve& curve);

// Isotropic spacing so that the curve's bounding box grown by max_radius plus
// two voxels fits in `dims` nodes on every axis.
double grid_spacing_for(const PolyCurve& curve, double max_radius, const std::array<int, 3>& dims);
GridSpec fit_grid(const PolyCurve& curve, double max_radius, const std::array<int, 3>& dims);

// Throws Error(Geometry) if the tube reaches the grid boundary.
ScalarField rasterize(const PolyCurve& curve, const RadiusProfile& profile, const GridSpec& grid, FieldMode mode);
ScalarField rasterize(const PolyCurve& curve, const RadiusProfile& profile, const std::array<int, 3>& dims,
                      FieldMode mode);

// Text format: "nx ny nz", "ox oy oz sx sy sz", then nx*ny*nz values (x fastest).
void write_field(const ScalarField& field, const std::string& path);
std::string field_to_text(const ScalarField& field);
ScalarField read_field(const std::string& path);
ScalarField field_from_text(const std::string& text);

}  // namespace forge
