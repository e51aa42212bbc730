#include "check.hpp"
#include "fixtures.hpp"

#include "forge/knot.hpp"
#include "forge/rng.hpp"
#include "forge/self_intersect.hpp"

#include <cmath>
#include <numeric>

using forge::ErrorKind;
using forge::KnotFamily;
using forge::KnotSpec;
using forge::Vec3;

namespace {

constexpr double kPi = forge::kPi;

KnotSpec fourier_example() {
  KnotSpec s;
  s.family = KnotFamily::FourierGeneral;
  s.frequencies = {0, 0, 0};
  s.terms = {{0, 1.0, 1, 0.0}, {1, 0.5, 3, 0.2}, {2, 0.35, 4, 0.0}, {0, 0.2, 2, 1.0}};
  return s;
}

}  // namespace

TEST_CASE("lissajous 3-4-7 starts at (1,1,1)") {
  const Vec3 p = forge::evaluate(fixture::lissajous(3, 4, 7), 0.0);
  CHECK(p.isApprox(Vec3(1, 1, 1), 1e-15));
}

TEST_CASE("fibonacci 2-3-5 with phi_y = pi/2 starts at (1,0,1)") {
  const Vec3 p = forge::evaluate(fixture::fibonacci(2, 3, 5, 0, kPi / 2, 0), 0.0);
  CHECK(p[0] == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(std::abs(p[1]) < 1e-15);
  CHECK(p[2] == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("closed families are 2pi periodic") {
  forge::Rng rng(11);
  const KnotSpec specs[] = {fixture::lissajous(3, 4, 7, 0.3, 0, 0), fixture::fibonacci(3, 5, 8, 0, kPi / 2, kPi / 2),
                            fourier_example()};
  for (const auto& spec : specs) {
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
      const double t = 2 * kPi * rng.uniform();
      worst = std::max(worst, (forge::evaluate(spec, t) - forge::evaluate(spec, t + 2 * kPi)).norm());
    }
    CHECK(worst < 1e-12);
  }
}

TEST_CASE("coordinates stay in [-1, 1]") {
  const auto liss = fixture::lissajous(2, 5, 7, 0.4, 0.1, 0);
  const auto fib = fixture::fibonacci(3, 5, 8, 0, 0.7, 1.3);
  for (int i = 0; i <= 5000; ++i) {
    const double t = 2 * kPi * i / 5000.0;
    CHECK(forge::evaluate(liss, t).cwiseAbs().maxCoeff() <= 1.0);
    CHECK(std::abs(forge::evaluate(fib, t)[2]) <= 1.0);
  }
}

TEST_CASE("derivative matches central differences") {
  for (const auto& spec : {fixture::fibonacci(2, 3, 5, 0, kPi / 2, 0), fourier_example()}) {
    for (double t : {0.1, 1.7, 4.2}) {
      const double h = 1e-6;
      const Vec3 fd = (forge::evaluate(spec, t + h) - forge::evaluate(spec, t - h)) / (2 * h);
      CHECK((fd - forge::derivative(spec, t)).norm() < 1e-7);
      CHECK(forge::derivative(spec, t).norm() <= forge::speed_bound(spec) + 1e-12);
    }
  }
}

TEST_CASE("spec validation") {
  CHECK_NOTHROW(forge::validate(fixture::lissajous(1, 2, 3)));
  CHECK_FORGE_ERROR(forge::validate(fixture::lissajous(3, 2, 5)), ErrorKind::Validation);
  CHECK_FORGE_ERROR(forge::validate(fixture::lissajous(0, 2, 5)), ErrorKind::Validation);
  CHECK_FORGE_ERROR(forge::validate(fixture::lissajous(2, 2, 5)), ErrorKind::Validation);
  CHECK_FORGE_ERROR(forge::validate(fixture::lissajous(1, 2, 3, NAN)), ErrorKind::Validation);
  CHECK_FORGE_ERROR(forge::validate(fixture::fibonacci(-1, 2, 3)), ErrorKind::Validation);
  KnotSpec empty;
  empty.family = KnotFamily::FourierGeneral;
  CHECK_FORGE_ERROR(forge::validate(empty), ErrorKind::Validation);
  CHECK_FORGE_ERROR(forge::sample_uniform(fixture::lissajous(2, 1, 3), 64), ErrorKind::Validation);
}

TEST_CASE("validate_lissajous examples") {
  auto ok = forge::validate_lissajous(fixture::lissajous(2, 3, 5, 0.1, 0.2, 0));
  CHECK(ok.coprime_ok);
  CHECK_FALSE(ok.forbidden_phase_hit.has_value());

  CHECK_FALSE(forge::validate_lissajous(fixture::lissajous(2, 4, 5)).coprime_ok);

  auto hit = forge::validate_lissajous(fixture::lissajous(1, 2, 3, kPi / 3, 0, 0));
  REQUIRE(hit.forbidden_phase_hit.has_value());
  CHECK(*hit.forbidden_phase_hit == 1);

  CHECK_FORGE_ERROR(forge::validate_lissajous(fixture::fibonacci(2, 3, 5)), ErrorKind::Precondition);
}

TEST_CASE("discretize the unit circle") {
  const auto circle = forge::unit_circle_spec();
  const auto poly = forge::discretize(circle, 0.025);
  CHECK(poly.points.size() == 9);
  CHECK(poly.chord_length == doctest::Approx(18 * std::sin(kPi / 9)).epsilon(1e-12));
  CHECK(forge::discretize(circle, 0.5).points.size() == 4);
  CHECK_FORGE_ERROR(forge::discretize(circle, 0.0), ErrorKind::Precondition);
  CHECK_FORGE_ERROR(forge::discretize(circle, 1.0), ErrorKind::Precondition);
}

TEST_CASE("discretized length is within rel_err of a 10x refinement") {
  for (const auto& spec : {fixture::lissajous(3, 4, 7, 0.2, 0.7, 0), fixture::fibonacci(2, 3, 5, 0, kPi / 2, 0),
                           fourier_example()}) {
    for (double rel : {0.025, 0.1}) {
      const auto poly = forge::discretize(spec, rel);
      const double fine = forge::polygon_length(spec, 10 * poly.points.size());
      CHECK(std::abs(poly.chord_length - fine) <= rel * fine);
      if (poly.points.size() > 4) {
        const double coarser = forge::polygon_length(spec, poly.points.size() - 1);
        const double ref = forge::polygon_length(spec, 64 * (poly.points.size() - 1));
        CHECK(std::abs(coarser - ref) > rel * ref);
      }
    }
  }
}

TEST_CASE("circle chord length grows with refinement") {
  const auto circle = forge::unit_circle_spec();
  double prev = 0.0;
  for (std::size_t n = 4; n <= 256; ++n) {
    const double len = forge::sample_uniform(circle, n).chord_length;
    CHECK(len >= prev);
    CHECK(len < 2 * kPi);
    prev = len;
  }
}

TEST_CASE("polygon invariants") {
  const auto poly = forge::sample_uniform(fixture::fibonacci(2, 3, 5, 0, kPi / 2, 0), 200);
  CHECK(poly.closed);
  CHECK(poly.segment_count() == 200);
  CHECK(poly.segment_end(199) == poly.points[0]);
  for (std::size_t i = 0; i < poly.segment_count(); ++i)
    CHECK((poly.segment_end(i) - poly.segment_start(i)).norm() > 0.0);
  CHECK_FORGE_ERROR(forge::sample_uniform(forge::unit_circle_spec(), 3), ErrorKind::Discretization);
}

TEST_CASE("open arc covers [0, pi] and is not closed") {
  KnotSpec arc = fixture::lissajous(1, 2, 3);
  arc.family = KnotFamily::OpenArc;
  CHECK_FALSE(arc.closed());
  CHECK(arc.t_max() == doctest::Approx(kPi));
  const auto poly = forge::sample_uniform(arc, 50);
  CHECK(poly.segment_count() == 49);
  CHECK(poly.params.back() == doctest::Approx(kPi));
  CHECK(poly.points.back().isApprox(forge::evaluate(arc, kPi)));
}

TEST_CASE("json round trip and phase strings") {
  for (const auto& spec : {fixture::lissajous(3, 4, 7, 0, 0, kPi / 2), fixture::fibonacci(3, 5, 8, 0, 0.5, 0.5),
                           fourier_example()}) {
    const nlohmann::json j = spec;
    CHECK(j.get<KnotSpec>() == spec);
  }
  const auto parsed = nlohmann::json::parse(R"({"family":"fib","n":[2,3,5],"phi":[0,"pi/2","-2pi/3"]})").get<KnotSpec>();
  CHECK(parsed.family == KnotFamily::Fibonacci);
  CHECK(parsed.phases[1] == doctest::Approx(kPi / 2));
  CHECK(parsed.phases[2] == doctest::Approx(-2 * kPi / 3));
  CHECK_FORGE_ERROR(nlohmann::json::parse(R"({"family":"liss","n":[1,2]})").get<KnotSpec>(), ErrorKind::Parse);
  CHECK_FORGE_ERROR(nlohmann::json::parse(R"({"family":"torus","n":[1,2,3]})").get<KnotSpec>(), ErrorKind::Validation);
  CHECK_FORGE_ERROR(forge::load_knot("/nonexistent/knot.json"), ErrorKind::Io);
}

TEST_CASE("validated lissajous specs with generic phases have no crossings") {
  forge::Rng rng(2024);
  int checked = 0;
  while (checked < 20) {
    int n[3];
    for (int& v : n) v = 1 + static_cast<int>(rng.below(7));
    std::sort(n, n + 3);
    if (n[0] == n[1] || n[1] == n[2]) continue;
    const auto spec = fixture::lissajous(n[0], n[1], n[2], 2 * kPi * rng.uniform(), 2 * kPi * rng.uniform(),
                                         2 * kPi * rng.uniform());
    const auto report = forge::validate_lissajous(spec);
    if (!report.coprime_ok || report.forbidden_phase_hit) continue;
    forge::DEConfig cfg;
    cfg.rng_seed = static_cast<std::uint64_t>(checked);
    INFO("frequencies ", n[0], " ", n[1], " ", n[2]);
    CHECK(forge::count_self_intersections(spec, cfg).count() == 0);
    ++checked;
  }
}

// The phase rules leave out the case where two phases vanish together, which
// makes the curve symmetric under t -> -t on two axes at once.
TEST_CASE("a validated lissajous spec can still cross itself") {
  const auto spec = fixture::lissajous(1, 2, 3, 0, kPi / 2, 0);
  const auto report = forge::validate_lissajous(spec);
  CHECK(report.coprime_ok);
  CHECK_FALSE(report.forbidden_phase_hit.has_value());
  CHECK(forge::count_self_intersections(spec, forge::DEConfig{}).count() == 1);
}
