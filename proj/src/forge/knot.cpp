#include "forge/knot.hpp"

#include <cmath>
#include <fstream>
#include <numeric>
#include <regex>
#include <sstream>

namespace forge {

const char* to_string(KnotFamily family) noexcept {
  switch (family) {
    case KnotFamily::Lissajous: return "lissajous";
    case KnotFamily::Fibonacci: return "fibonacci";
    case KnotFamily::FourierGeneral: return "fourier";
    case KnotFamily::OpenArc: return "open_arc";
  }
  return "unknown";
}

KnotFamily parse_family(const std::string& name) {
  std::string s;
  for (char c : name) s += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (s == "lissajous" || s == "liss") return KnotFamily::Lissajous;
  if (s == "fibonacci" || s == "fib") return KnotFamily::Fibonacci;
  if (s == "fourier" || s == "fourier_general" || s == "fouriergeneral") return KnotFamily::FourierGeneral;
  if (s == "open_arc" || s == "openarc" || s == "arc") return KnotFamily::OpenArc;
  fail(ErrorKind::Validation, "unknown knot family '" + name + "'");
}

void validate(const KnotSpec& spec) {
  for (double p : spec.phases)
    if (!std::isfinite(p)) fail(ErrorKind::Validation, "phases must be finite");
  if (spec.family == KnotFamily::FourierGeneral) {
    if (spec.terms.empty()) fail(ErrorKind::Validation, "fourier knot needs at least one term");
    bool moving = false;
    for (const auto& term : spec.terms) {
      if (term.axis < 0 || term.axis > 2) fail(ErrorKind::Validation, "fourier term axis must be 0, 1 or 2");
      if (term.frequency < 0) fail(ErrorKind::Validation, "fourier term frequency must be nonnegative");
      if (!std::isfinite(term.amplitude) || !std::isfinite(term.phase))
        fail(ErrorKind::Validation, "fourier term amplitude and phase must be finite");
      moving = moving || (term.frequency > 0 && term.amplitude != 0.0);
    }
    if (!moving) fail(ErrorKind::Validation, "fourier knot is constant");
    return;
  }
  for (int n : spec.frequencies)
    if (n < 0) fail(ErrorKind::Validation, "frequencies must be nonnegative");
  if (spec.frequencies == std::array<int, 3>{0, 0, 0}) fail(ErrorKind::Validation, "all frequencies are zero");
  if (spec.family == KnotFamily::Lissajous) {
    const auto [nx, ny, nz] = spec.frequencies;
    if (!(0 < nx && nx < ny && ny < nz))
      fail(ErrorKind::Validation, "lissajous frequencies must satisfy 0 < nx < ny < nz");
  }
}

Vec3 evaluate(const KnotSpec& spec, double t) {
  const auto& n = spec.frequencies;
  const auto& p = spec.phases;
  switch (spec.family) {
    case KnotFamily::Lissajous:
    case KnotFamily::OpenArc:
      return {std::cos(n[0] * t + p[0]), std::cos(n[1] * t + p[1]), std::cos(n[2] * t + p[2])};
    case KnotFamily::Fibonacci:
      return {std::cos(n[0] * t + p[0]), std::cos(n[1] * t + p[1]),
              0.5 * std::cos(n[2] * t + p[2]) + 0.5 * std::sin(n[1] * t + p[1])};
    case KnotFamily::FourierGeneral: {
      Vec3 out = Vec3::Zero();
      for (const auto& term : spec.terms) out[term.axis] += term.amplitude * std::cos(term.frequency * t + term.phase);
      return out;
    }
  }
  return Vec3::Zero();
}

Vec3 derivative(const KnotSpec& spec, double t) {
  const auto& n = spec.frequencies;
  const auto& p = spec.phases;
  switch (spec.family) {
    case KnotFamily::Lissajous:
    case KnotFamily::OpenArc:
      return {-n[0] * std::sin(n[0] * t + p[0]), -n[1] * std::sin(n[1] * t + p[1]),
              -n[2] * std::sin(n[2] * t + p[2])};
    case KnotFamily::Fibonacci:
      return {-n[0] * std::sin(n[0] * t + p[0]), -n[1] * std::sin(n[1] * t + p[1]),
              -0.5 * n[2] * std::sin(n[2] * t + p[2]) + 0.5 * n[1] * std::cos(n[1] * t + p[1])};
    case KnotFamily::FourierGeneral: {
      Vec3 out = Vec3::Zero();
      for (const auto& term : spec.terms)
        out[term.axis] -= term.amplitude * term.frequency * std::sin(term.frequency * t + term.phase);
      return out;
    }
  }
  return Vec3::Zero();
}

double speed_bound(const KnotSpec& spec) {
  Vec3 bound = Vec3::Zero();
  const auto& n = spec.frequencies;
  switch (spec.family) {
    case KnotFamily::Lissajous:
    case KnotFamily::OpenArc:
      bound = Vec3(n[0], n[1], n[2]);
      break;
    case KnotFamily::Fibonacci:
      bound = Vec3(n[0], n[1], 0.5 * (n[2] + n[1]));
      break;
    case KnotFamily::FourierGeneral:
      for (const auto& term : spec.terms) bound[term.axis] += std::abs(term.amplitude * term.frequency);
      break;
  }
  return bound.norm();
}

LissajousReport validate_lissajous(const KnotSpec& spec) {
  if (spec.family != KnotFamily::Lissajous) fail(ErrorKind::Precondition, "validate_lissajous needs a lissajous spec");
  const auto [nx, ny, nz] = spec.frequencies;
  const auto [px, py, pz] = spec.phases;
  (void)pz;
  LissajousReport report;
  report.coprime_ok = std::gcd(nx, ny) == 1 && std::gcd(nx, nz) == 1 && std::gcd(ny, nz) == 1;
  constexpr double tol = 1e-9;
  for (int m = 1; m < nz; ++m) {
    const bool hit = std::abs(px - m * kPi / nz) <= tol || std::abs(py - m * kPi / nz) <= tol ||
                     (ny != 0 && std::abs(px - static_cast<double>(nx) / ny * py - m * kPi / ny) <= tol);
    if (hit) {
      report.forbidden_phase_hit = m;
      break;
    }
  }
  return report;
}

std::pair<double, double> PolyCurve::segment_params(std::size_t i) const {
  if (i + 1 < params.size()) return {params[i], params[i + 1]};
  return {params[i], param_period};
}

namespace {

double param_at(const KnotSpec& spec, std::size_t k, std::size_t n) {
  return spec.closed() ? kTwoPi * static_cast<double>(k) / static_cast<double>(n)
                       : kPi * static_cast<double>(k) / static_cast<double>(n - 1);
}

std::size_t min_points(const KnotSpec&) { return 4; }

}  // namespace

double polygon_length(const KnotSpec& spec, std::size_t n) {
  double total = 0.0;
  Vec3 first = evaluate(spec, param_at(spec, 0, n));
  Vec3 prev = first;
  for (std::size_t k = 1; k < n; ++k) {
    const Vec3 cur = evaluate(spec, param_at(spec, k, n));
    total += (cur - prev).norm();
    prev = cur;
  }
  if (spec.closed()) total += (first - prev).norm();
  return total;
}

PolyCurve sample_uniform(const KnotSpec& spec, std::size_t n) {
  validate(spec);
  if (n < min_points(spec)) fail(ErrorKind::Discretization, "a polygonal curve needs at least 4 points");
  PolyCurve curve;
  curve.closed = spec.closed();
  curve.source = spec;
  curve.param_period = spec.t_max();
  curve.points.reserve(n);
  curve.params.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double t = param_at(spec, k, n);
    curve.params.push_back(t);
    curve.points.push_back(evaluate(spec, t));
  }
  for (std::size_t i = 0; i < curve.segment_count(); ++i) {
    const double len = (curve.segment_end(i) - curve.segment_start(i)).norm();
    if (len == 0.0)
      fail(ErrorKind::Discretization, "consecutive polygon points coincide at segment " + std::to_string(i));
    curve.chord_length += len;
  }
  return curve;
}

PolyCurve discretize(const KnotSpec& spec, double rel_err) {
  validate(spec);
  if (!(rel_err > 0.0 && rel_err < 1.0)) fail(ErrorKind::Precondition, "rel_err must lie in (0, 1)");
  constexpr std::size_t kMaxPoints = std::size_t{1} << 20;
  auto accepts = [&](std::size_t n) {
    const double reference = polygon_length(spec, 64 * n);
    return std::abs(polygon_length(spec, n) - reference) <= rel_err * reference;
  };

  const std::size_t floor = min_points(spec);
  std::size_t lo = floor;
  std::size_t hi = 16;
  if (accepts(floor)) return sample_uniform(spec, floor);
  while (!accepts(hi)) {
    lo = hi;
    hi *= 2;
    if (hi > kMaxPoints)
      fail(ErrorKind::Discretization, "no polygon within relative error after 2^20 points");
  }
  // Invariant: lo rejected, hi accepted.
  while (hi - lo > 1) {
    const std::size_t mid = lo + (hi - lo) / 2;
    (accepts(mid) ? hi : lo) = mid;
  }
  return sample_uniform(spec, hi);
}

PolyCurve polycurve_from_points(std::vector<Vec3> points, bool closed) {
  if (points.size() < (closed ? 3u : 2u)) fail(ErrorKind::Discretization, "too few points for a polygonal curve");
  PolyCurve curve;
  curve.closed = closed;
  curve.points = std::move(points);
  curve.params.reserve(curve.points.size());
  double s = 0.0;
  for (std::size_t i = 0; i < curve.points.size(); ++i) {
    if (i > 0) s += (curve.points[i] - curve.points[i - 1]).norm();
    curve.params.push_back(s);
  }
  curve.param_period = closed ? s + (curve.points.front() - curve.points.back()).norm() : s;
  curve.chord_length = closed ? curve.param_period : s;
  curve.source.family = KnotFamily::FourierGeneral;
  return curve;
}

KnotSpec unit_circle_spec() {
  KnotSpec spec;
  spec.family = KnotFamily::FourierGeneral;
  spec.frequencies = {0, 0, 0};
  spec.terms = {{0, 1.0, 1, 0.0}, {1, 1.0, 1, -kPi / 2}};
  return spec;
}

namespace {

// Accepts plain numbers or strings such as "pi/2", "-2pi/3", "0.5".
double parse_phase(const nlohmann::json& j) {
  if (j.is_number()) return j.get<double>();
  if (!j.is_string()) fail(ErrorKind::Parse, "phase must be a number or a string like \"pi/2\"");
  std::string s;
  for (char c : j.get<std::string>())
    if (!std::isspace(static_cast<unsigned char>(c))) s += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  static const std::regex pattern(R"(^([+-]?)(\d*\.?\d*)\*?(pi)?(?:/(\d+))?$)");
  std::smatch m;
  if (!std::regex_match(s, m, pattern) || (m[2].length() == 0 && !m[3].matched))
    fail(ErrorKind::Parse, "cannot parse phase '" + j.get<std::string>() + "'");
  double value = m[2].length() ? std::stod(m[2].str()) : 1.0;
  if (m[3].matched) value *= kPi;
  if (m[4].matched) value /= std::stod(m[4].str());
  return m[1] == "-" ? -value : value;
}

int parse_axis(const nlohmann::json& j) {
  if (j.is_number_integer()) return j.get<int>();
  const auto s = j.get<std::string>();
  if (s == "x") return 0;
  if (s == "y") return 1;
  if (s == "z") return 2;
  fail(ErrorKind::Parse, "unknown axis '" + s + "'");
}

}  // namespace

void to_json(nlohmann::json& j, const KnotSpec& spec) {
  j = nlohmann::json{{"family", to_string(spec.family)},
                     {"n", spec.frequencies},
                     {"phi", spec.phases}};
  nlohmann::json terms = nlohmann::json::array();
  for (const auto& t : spec.terms)
    terms.push_back({{"axis", t.axis}, {"A", t.amplitude}, {"n", t.frequency}, {"phi", t.phase}});
  j["terms"] = terms;
}

void from_json(const nlohmann::json& j, KnotSpec& spec) {
  try {
    spec = KnotSpec{};
    spec.family = parse_family(j.at("family").get<std::string>());
    if (j.contains("n")) {
      const auto& n = j.at("n");
      if (!n.is_array() || n.size() != 3) fail(ErrorKind::Parse, "'n' must hold three integers");
      for (int k = 0; k < 3; ++k) spec.frequencies[k] = n.at(k).get<int>();
    } else if (spec.family != KnotFamily::FourierGeneral) {
      fail(ErrorKind::Parse, "missing 'n'");
    } else {
      spec.frequencies = {0, 0, 0};
    }
    if (j.contains("phi")) {
      const auto& phi = j.at("phi");
      if (!phi.is_array() || phi.size() != 3) fail(ErrorKind::Parse, "'phi' must hold three phases");
      for (int k = 0; k < 3; ++k) spec.phases[k] = parse_phase(phi.at(k));
    }
    if (j.contains("terms")) {
      for (const auto& t : j.at("terms")) {
        FourierTerm term;
        term.axis = parse_axis(t.at("axis"));
        term.amplitude = t.value("A", 1.0);
        term.frequency = t.value("n", 1);
        term.phase = t.contains("phi") ? parse_phase(t.at("phi")) : 0.0;
        spec.terms.push_back(term);
      }
    }
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::Parse, std::string("malformed knot spec: ") + e.what());
  }
}

KnotSpec load_knot(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::Io, "cannot open '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::Parse, path + ": " + e.what());
  }
  return j.get<KnotSpec>();
}

}  // namespace forge
