#include "check.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

#include "forge/marching_cubes.hpp"
#include "forge/rng.hpp"
#include "forge/scalar_field.hpp"

#include <cmath>
#include <cstdlib>

using forge::ErrorKind;
using forge::FieldMode;
using forge::GridSpec;
using forge::RadiusProfile;
using forge::Vec3;

namespace {

constexpr double kPi = forge::kPi;

double segment_distance(const Vec3& p, const Vec3& a, const Vec3& b) {
  const Vec3 ab = b - a;
  const double s = std::clamp((p - a).dot(ab) / ab.squaredNorm(), 0.0, 1.0);
  return (p - (a + s * ab)).norm();
}

GridSpec box_grid(const Vec3& lo, const Vec3& hi, double spacing) {
  GridSpec g;
  g.origin = lo;
  g.spacing = Vec3::Constant(spacing);
  for (int a = 0; a < 3; ++a) g.dims[a] = static_cast<int>(std::round((hi[a] - lo[a]) / spacing)) + 1;
  return g;
}

struct ThreadCount {
  explicit ThreadCount(const char* n) { setenv("FORGE_THREADS", n, 1); }
  ~ThreadCount() { unsetenv("FORGE_THREADS"); }
};

}  // namespace

TEST_CASE("distance from the circle axis point is sqrt 2") {
  const auto circle = forge::sample_uniform(forge::unit_circle_spec(), 4096);
  const auto foot = forge::point_to_curve({0, 0, 1}, circle);
  CHECK(std::abs(foot.distance - std::sqrt(2.0)) < 1e-6);
  CHECK(foot.distance <= std::sqrt(2.0));
}

TEST_CASE("points on the polygon are at distance zero") {
  const auto curve = forge::sample_uniform(fixture::lissajous(3, 4, 7, 0.1, 0.2, 0), 300);
  for (std::size_t i = 0; i < curve.points.size(); i += 17) {
    const auto foot = forge::point_to_curve(curve.points[i], curve);
    CHECK(foot.distance < 1e-12);
    CHECK((forge::evaluate(curve.source, foot.t) - curve.points[i]).norm() < 1e-12);
  }
}

TEST_CASE("point_to_curve agrees with projection and dense sampling oracles") {
  const auto spec = fixture::lissajous(2, 3, 5, 0.3, 0, 0);
  const auto curve = forge::sample_uniform(spec, 2000);
  // Chord sag bound: speed^2 * dt^2 / 8 with the speed bound as a curvature proxy.
  const double dt = 2 * kPi / 2000;
  const double sag = forge::speed_bound(spec) * forge::speed_bound(spec) * dt * dt / 8;
  forge::Rng rng(5);
  for (int k = 0; k < 8; ++k) {
    const Vec3 p(2 * rng.uniform() - 1, 2 * rng.uniform() - 1, 2 * rng.uniform() - 1);
    const auto foot = forge::point_to_curve(p, curve);
    CHECK(std::abs(foot.distance - oracle::polygon_distance(p, curve)) < 1e-12);
    CHECK(std::abs(foot.distance - oracle::sampled_curve_distance(p, spec, 1000000)) < 1e-9 + sag);
  }
}

TEST_CASE("sign field of a straight segment matches a per-node recount") {
  const auto seg = forge::polycurve_from_points({{0, 0, 0}, {1, 0, 0}}, false);
  const GridSpec grid = box_grid({-0.2, -0.2, -0.2}, {1.2, 0.2, 0.2}, 0.02);
  const auto field = forge::rasterize(seg, RadiusProfile{0.1, 0.0, 0, 0.0}, grid, FieldMode::Sign);
  std::size_t expected = 0, inside = 0;
  for (int k = 0; k < grid.dims[2]; ++k)
    for (int j = 0; j < grid.dims[1]; ++j)
      for (int i = 0; i < grid.dims[0]; ++i) {
        const bool in = segment_distance(grid.node(i, j, k), {0, 0, 0}, {1, 0, 0}) < 0.1;
        expected += in;
        const double v = field.at(i, j, k);
        CHECK((v == 1.0 || v == -1.0));
        inside += v == 1.0;
        if ((v == 1.0) != in) FAIL_CHECK("node ", i, " ", j, " ", k);
      }
  CHECK(inside == expected);
  CHECK(inside > 0);
}

TEST_CASE("a vanishing radius leaves no inside node and no mesh") {
  const auto seg = forge::polycurve_from_points({{0, 0, 0}, {1, 0, 0}}, false);
  const GridSpec grid = box_grid({-0.21, -0.21, -0.21}, {1.21, 0.21, 0.21}, 0.02);
  const auto field = forge::rasterize(seg, RadiusProfile{1e-6, 0.0, 0, 0.0}, grid, FieldMode::Sign);
  for (double v : field.values) CHECK(v == -1.0);
  CHECK_FORGE_ERROR(forge::marching_cubes(field), ErrorKind::EmptyMesh);
}

TEST_CASE("distance mode and sign mode agree in sign") {
  const auto curve = forge::sample_uniform(fixture::lissajous(1, 2, 3, 0, kPi / 2, 0), 256);
  const RadiusProfile profile{0.12, 0.03, 3, 0.5};
  const auto grid = forge::fit_grid(curve, profile.max_radius(), {32, 32, 32});
  const auto sign = forge::rasterize(curve, profile, grid, FieldMode::Sign);
  const auto dist = forge::rasterize(curve, profile, grid, FieldMode::Distance);
  std::size_t inside = 0;
  for (std::size_t i = 0; i < sign.values.size(); ++i) {
    CHECK((sign.values[i] > 0) == (dist.values[i] < 0));
    inside += sign.values[i] > 0;
  }
  CHECK(inside > 0);
}

TEST_CASE("parallel rasterization is bit-identical to sequential") {
  const auto curve = forge::sample_uniform(fixture::fibonacci(2, 3, 5, 0, kPi / 2, 0), 512);
  const RadiusProfile profile{0.05, 0.01, 4, 0.0};
  const auto grid = forge::fit_grid(curve, profile.max_radius(), {40, 40, 40});
  forge::ScalarField seq, par, seq_d, par_d;
  {
    ThreadCount one("1");
    seq = forge::rasterize(curve, profile, grid, FieldMode::Sign);
    seq_d = forge::rasterize(curve, profile, grid, FieldMode::Distance);
  }
  {
    ThreadCount many("7");
    par = forge::rasterize(curve, profile, grid, FieldMode::Sign);
    par_d = forge::rasterize(curve, profile, grid, FieldMode::Distance);
  }
  CHECK(seq.values == par.values);
  CHECK(seq_d.values == par_d.values);
}

TEST_CASE("mirror-symmetric curve gives a mirror-symmetric field") {
  const auto circle = forge::sample_uniform(forge::unit_circle_spec(), 64);
  for (const RadiusProfile& profile : {RadiusProfile{0.2, 0.0, 0, 0.0}, RadiusProfile{0.2, 0.05, 2, 0.0}}) {
    const auto grid = forge::fit_grid(circle, profile.max_radius(), {41, 41, 21});
    const auto field = forge::rasterize(circle, profile, grid, FieldMode::Sign);
    std::size_t mismatches = 0;
    for (int k = 0; k < grid.dims[2]; ++k)
      for (int j = 0; j < grid.dims[1]; ++j)
        for (int i = 0; i < grid.dims[0]; ++i)
          mismatches += field.at(i, j, k) != field.at(grid.dims[0] - 1 - i, j, k);
    CHECK(mismatches == 0);
  }
}

TEST_CASE("fitted grids keep a -1 boundary shell") {
  const auto curve = forge::sample_uniform(fixture::lissajous(3, 4, 7, 0.2, 0.7, 0), 512);
  const RadiusProfile profile{0.04, 0.01, 2, 0.0};
  const auto field = forge::rasterize(curve, profile, std::array<int, 3>{30, 30, 30}, FieldMode::Sign);
  const auto& g = field.grid;
  for (int k = 0; k < g.dims[2]; ++k)
    for (int j = 0; j < g.dims[1]; ++j)
      for (int i = 0; i < g.dims[0]; ++i)
        if (g.on_boundary(i, j, k)) CHECK(field.at(i, j, k) == -1.0);
  CHECK(g.spacing[0] == g.spacing[1]);
  CHECK(g.spacing[1] == g.spacing[2]);
}

TEST_CASE("a tube leaving the grid is a geometry error") {
  const auto seg = forge::polycurve_from_points({{0, 0, 0}, {1, 0, 0}}, false);
  const GridSpec grid = box_grid({0.2, -0.2, -0.2}, {0.8, 0.2, 0.2}, 0.02);
  CHECK_FORGE_ERROR(forge::rasterize(seg, RadiusProfile{0.1, 0.0, 0, 0.0}, grid, FieldMode::Sign),
                    ErrorKind::Geometry);
}

TEST_CASE("every sign-changing edge carries exactly one mesh vertex") {
  const auto curve = forge::sample_uniform(fixture::lissajous(1, 2, 3, 0, kPi / 2, 0), 512);
  const auto field = forge::rasterize(curve, RadiusProfile{0.15, 0.0, 0, 0.0}, std::array<int, 3>{36, 36, 36},
                                      FieldMode::Sign);
  const auto& g = field.grid;
  std::size_t changes = 0;
  for (int k = 0; k < g.dims[2]; ++k)
    for (int j = 0; j < g.dims[1]; ++j)
      for (int i = 0; i < g.dims[0]; ++i) {
        const double v = field.at(i, j, k);
        if (i + 1 < g.dims[0]) changes += v != field.at(i + 1, j, k);
        if (j + 1 < g.dims[1]) changes += v != field.at(i, j + 1, k);
        if (k + 1 < g.dims[2]) changes += v != field.at(i, j, k + 1);
      }
  CHECK(forge::marching_cubes(field).vertices.size() == changes);
}

TEST_CASE("field text format round trip") {
  const auto curve = forge::sample_uniform(forge::unit_circle_spec(), 64);
  const RadiusProfile profile{0.2, 0.0, 0, 0.0};
  for (FieldMode mode : {FieldMode::Sign, FieldMode::Distance}) {
    const auto field = forge::rasterize(curve, profile, std::array<int, 3>{12, 12, 8}, mode);
    const std::string text = forge::field_to_text(field);
    CHECK(text.rfind("12 12 8\n", 0) == 0);
    const auto back = forge::field_from_text(text);
    CHECK(back.grid.dims == field.grid.dims);
    CHECK(back.grid.origin == field.grid.origin);
    CHECK(back.grid.spacing == field.grid.spacing);
    CHECK(back.values == field.values);
    CHECK(back.mode == mode);
    CHECK(forge::field_to_text(back) == text);
  }
  CHECK_FORGE_ERROR(forge::field_from_text("2 2 2\n0 0 0 1 1 1\n1 1 1"), ErrorKind::Parse);
  CHECK_FORGE_ERROR(forge::field_from_text("2 2 2\n0 0 0 1 1 1\n1 1 1 1 1 1 1 x"), ErrorKind::Parse);
  CHECK_FORGE_ERROR(forge::read_field("/nonexistent/field.txt"), ErrorKind::Io);
}

TEST_CASE("grid and mode validation") {
  GridSpec g;
  g.dims = {1, 4, 4};
  CHECK_FORGE_ERROR(forge::validate(g), ErrorKind::Validation);
  g.dims = {4, 4, 4};
  g.spacing = Vec3(0.1, 0.0, 0.1);
  CHECK_FORGE_ERROR(forge::validate(g), ErrorKind::Validation);
  CHECK(forge::parse_field_mode("sign") == FieldMode::Sign);
  CHECK(forge::parse_field_mode("distance") == FieldMode::Distance);
  CHECK_FORGE_ERROR(forge::parse_field_mode("binary"), ErrorKind::Validation);
}
