#include "forge/pipeline.hpp"

#include "forge/marching_cubes.hpp"
#include "forge/parallel.hpp"
#include "forge/smoothing.hpp"
#include "forge/stl.hpp"
#include "forge/trimesh.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

namespace fs = std::filesystem;
using nlohmann::json;

namespace forge {

namespace {

constexpr double kCoarseRelErr = 0.025;
constexpr double kInitialRadius = 0.3;
constexpr double kExclusionFactor = 3.0;

std::string fixed4(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

std::string stage_error(const std::exception& e) {
  if (const auto* err = dynamic_cast<const Error*>(&e)) return std::string(to_string(err->kind())) + ": " + e.what();
  return e.what();
}

}  // namespace

// ---------------------------------------------------------------------------
// Curve analysis and thickening

CurveAnalysis analyze_curve(const KnotSpec& knot, std::uint64_t seed, std::size_t fine_points) {
  validate(knot);
  CurveAnalysis a;
  a.knot = knot;
  DEConfig cfg;
  cfg.rng_seed = seed;
  IntersectionOptions opts;
  opts.rel_err = kCoarseRelErr;
  a.intersections = count_self_intersections(knot, cfg, opts);
  a.fine = sample_uniform(knot, fine_points);
  a.target_genus = genus_from_intersections(static_cast<int>(a.intersections.count()), knot.closed());
  return a;
}

std::shared_ptr<const CurveAnalysis> AnalysisCache::get(const KnotSpec& knot, std::uint64_t seed,
                                                        std::size_t fine_points) {
  const std::string key = json(knot).dump() + '|' + std::to_string(seed) + '|' + std::to_string(fine_points);
  {
    std::lock_guard lock(mutex_);
    if (auto it = entries_.find(key); it != entries_.end()) return it->second;
  }
  auto value = std::make_shared<const CurveAnalysis>(analyze_curve(knot, seed, fine_points));
  std::lock_guard lock(mutex_);
  return entries_.emplace(key, std::move(value)).first->second;
}

std::size_t AnalysisCache::size() const {
  std::lock_guard lock(mutex_);
  return entries_.size();
}

Thickening plan_thickening(const CurveAnalysis& analysis, const ProfileRequest& request, int voxels) {
  const std::array<int, 3> dims{voxels, voxels, voxels};
  const auto& crossings = analysis.intersections.points;
  Thickening out;
  double r = 0.0;
  if (request.radius) {
    r = *request.radius;
    if (!(r > 0.0)) fail(ErrorKind::Precondition, "requested radius must be positive");
    out.reach = estimate_reach(analysis.fine, crossings, kExclusionFactor * r);
  } else {
    // Shrink until the tube clears the reach and leaves at least one voxel
    // between strands that pass each other.
    r = kInitialRadius;
    bool settled = false;
    for (int iter = 0; iter < 64 && !settled; ++iter) {
      out.reach = estimate_reach(analysis.fine, crossings, kExclusionFactor * r);
      const double s = grid_spacing_for(analysis.fine, r, dims);
      const double bound = std::min(kReachSafety * out.reach.reach, out.reach.reach - 0.5 * s);
      if (bound >= r * (1.0 - 1e-12)) {
        settled = true;
      } else if (bound < kMinRadiusVoxels * s) {
        fail(ErrorKind::Infeasible, "binding constraint: voxel size (reach " + fixed4(out.reach.reach) +
                                        " leaves no radius above two voxels of " + fixed4(s) + ")");
      } else {
        r = bound;
      }
    }
    if (!settled) fail(ErrorKind::Infeasible, "tube radius did not settle");
  }
  out.grid = fit_grid(analysis.fine, r, dims);
  out.profile = admissible_profile(out.reach, out.grid.spacing[0], request.frequency, request.a_frac, r, request.phase);
  return out;
}

// ---------------------------------------------------------------------------
// Naming

std::string phase_token(double phase) {
  if (std::abs(phase) < 1e-12) return "0";
  const std::string sign = phase < 0 ? "m" : "";
  const double x = std::abs(phase) / kPi;
  for (int q = 1; q <= 12; ++q) {
    const double p = std::round(x * q);
    if (p >= 1 && std::abs(x * q - p) < 1e-9 * q && std::gcd(static_cast<long>(p), static_cast<long>(q)) == 1) {
      std::string t = sign + (p == 1 ? "" : std::to_string(static_cast<long>(p))) + "pi";
      if (q > 1) t += std::to_string(q);
      return t;
    }
  }
  return sign + fixed4(std::abs(phase));
}

std::string name_files(const ManifestEntry& e) {
  static const char* family_tokens[] = {"liss", "fib", "fourier", "arc"};
  const auto& k = e.knot;
  std::string stem = "g" + std::to_string(e.target_genus) + "_" + family_tokens[static_cast<int>(k.family)] + "_";
  if (k.family == KnotFamily::FourierGeneral) {
    std::string freqs, phases;
    for (std::size_t i = 0; i < k.terms.size(); ++i) {
      const char* sep = i ? "-" : "";
      freqs += sep + std::to_string(k.terms[i].frequency);
      phases += sep + phase_token(k.terms[i].phase);
    }
    stem += freqs + "_p" + phases;
  } else {
    stem += std::to_string(k.frequencies[0]) + "-" + std::to_string(k.frequencies[1]) + "-" +
            std::to_string(k.frequencies[2]) + "_p" + phase_token(k.phases[0]) + "-" + phase_token(k.phases[1]) + "-" +
            phase_token(k.phases[2]);
  }
  stem += "_f" + std::to_string(e.frequency) + "_c" + fixed4(e.profile.constant) + "_a" + fixed4(e.profile.amplitude) +
          "_r" + fixed4(e.profile.min_radius()) + "-" + fixed4(e.profile.max_radius()) + "_v";
  const auto& v = e.voxels;
  stem += (v[0] == v[1] && v[1] == v[2]) ? std::to_string(v[0])
                                         : std::to_string(v[0]) + "x" + std::to_string(v[1]) + "x" + std::to_string(v[2]);
  return stem;
}

// ---------------------------------------------------------------------------
// Surface generation

void write_file_atomic(const std::string& path, const std::string& bytes) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorKind::Io, "cannot write '" + tmp + "'");
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) fail(ErrorKind::Io, "short write to '" + tmp + "'");
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    fail(ErrorKind::Io, "cannot rename '" + tmp + "' to '" + path + "'");
  }
}

ManifestEntry generate_surface(const KnotSpec& knot, const ProfileRequest& request, const SurfaceOptions& options,
                               std::uint64_t seed, const std::string& out_dir, AnalysisCache* cache,
                               const std::string& stem_override) {
  ManifestEntry e;
  e.knot = knot;
  e.frequency = request.frequency;
  e.voxels = {options.voxels, options.voxels, options.voxels};
  e.mode = options.mode;
  e.seed = seed;
  std::string stage = "spec";
  try {
    validate(knot);
    stage = "intersections";
    std::shared_ptr<const CurveAnalysis> analysis =
        cache ? cache->get(knot, seed, options.fine_points)
              : std::make_shared<const CurveAnalysis>(analyze_curve(knot, seed, options.fine_points));
    e.intersections = static_cast<int>(analysis->intersections.count());
    e.target_genus = analysis->target_genus;

    stage = "thickening";
    const Thickening th = plan_thickening(*analysis, request, options.voxels);
    e.reach = th.reach.reach;
    e.profile = th.profile;

    stage = "rasterize";
    const ScalarField field = rasterize(analysis->fine, th.profile, th.grid, options.mode);

    stage = "marching_cubes";
    const TriMesh mesh = marching_cubes(field);

    stage = "topology";
    e.validity = validate_mesh(mesh);
    e.euler = euler_characteristic(mesh);
    e.measured_genus = genus(mesh);
    if (*e.measured_genus != e.target_genus)
      fail(ErrorKind::Topology, "measured genus " + std::to_string(*e.measured_genus) + " differs from target " +
                                    std::to_string(e.target_genus));

    stage = "smooth";
    const TriMesh smoothed = smooth(mesh, options.smooth_iterations, options.smooth_factor);
    if (euler_characteristic(smoothed) != *e.euler)
      fail(ErrorKind::Topology, "smoothing changed the Euler characteristic");

    stage = "write";
    const std::string stem = stem_override.empty() ? name_files(e) : stem_override;
    e.mesh_file = stem + ".stl";
    e.smooth_file = stem + "_smooth.stl";
    e.field_file = stem + "_field.txt";
    const auto as_string = [](const std::vector<unsigned char>& b) { return std::string(b.begin(), b.end()); };
    const fs::path dir(out_dir);
    const std::string mesh_bytes = as_string(encode_stl(mesh));
    const std::string smooth_bytes = as_string(encode_stl(smoothed));
    const std::string field_text = field_to_text(field);
    std::vector<fs::path> written;
    try {
      for (const auto& [name, bytes] : {std::pair{e.mesh_file, &mesh_bytes}, std::pair{e.smooth_file, &smooth_bytes},
                                        std::pair{e.field_file, &field_text}}) {
        write_file_atomic((dir / name).string(), *bytes);
        written.push_back(dir / name);
      }
    } catch (...) {
      std::error_code ec;
      for (const auto& p : written) fs::remove(p, ec);
      throw;
    }
    e.ok = true;
  } catch (const std::exception& ex) {
    e.ok = false;
    e.failed_stage = stage;
    e.reason = stage_error(ex);
    e.mesh_file.clear();
    e.smooth_file.clear();
    e.field_file.clear();
  }
  return e;
}

// ---------------------------------------------------------------------------
// Plans and datasets

DatasetPlan plan_from_json(const json& j) {
  DatasetPlan plan;
  try {
    const json& items = j.is_array() ? j : j.at("items");
    for (const auto& it : items) {
      PlanItem item;
      item.knot = it.at("knot").get<KnotSpec>();
      validate(item.knot);
      item.frequencies = it.value("frequencies", std::vector<int>{1});
      if (it.contains("genus")) item.genus = it.at("genus").get<int>();
      if (it.contains("radius")) item.radius = it.at("radius").get<double>();
      item.a_frac = it.value("a_frac", 0.5);
      if (item.frequencies.empty()) fail(ErrorKind::Validation, "plan item without frequencies");
      plan.items.push_back(std::move(item));
    }
  } catch (const json::exception& ex) {
    fail(ErrorKind::Parse, std::string("malformed plan: ") + ex.what());
  }
  return plan;
}

DatasetPlan load_plan(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::Io, "cannot open plan '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& ex) {
    fail(ErrorKind::Parse, path + ": " + ex.what());
  }
  return plan_from_json(j);
}

DatasetManifest build_dataset(const DatasetPlan& plan, const BuildOptions& options, const std::string& out_dir) {
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) fail(ErrorKind::Io, "cannot create '" + out_dir + "'");

  AnalysisCache cache;
  const auto& surf = options.surface;
  std::vector<std::shared_ptr<const CurveAnalysis>> analyses(plan.items.size());
  parallel_for(plan.items.size(), [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) analyses[i] = cache.get(plan.items[i].knot, options.seed, surf.fine_points);
  });

  std::map<int, std::size_t> per_genus;
  for (std::size_t i = 0; i < plan.items.size(); ++i) {
    const auto& item = plan.items[i];
    const int predicted = analyses[i]->target_genus;
    if (item.genus && *item.genus != predicted)
      fail(ErrorKind::Precondition, "plan item " + std::to_string(i) + " declares genus " + std::to_string(*item.genus) +
                                        " but its curve has " + std::to_string(analyses[i]->intersections.count()) +
                                        " crossings (genus " + std::to_string(predicted) + ")");
    per_genus[predicted] += item.frequencies.size();
  }
  std::set<std::size_t> counts;
  for (const auto& [g, c] : per_genus) counts.insert(c);
  if (counts.size() > 1) {
    std::string detail;
    for (const auto& [g, c] : per_genus) detail += " g" + std::to_string(g) + "=" + std::to_string(c);
    fail(ErrorKind::Precondition, "plan is not uniform over genus:" + detail);
  }

  struct Job {
    std::size_t item;
    int frequency;
  };
  std::vector<Job> jobs;
  for (std::size_t i = 0; i < plan.items.size(); ++i)
    for (int f : plan.items[i].frequencies) jobs.push_back({i, f});

  DatasetManifest m;
  m.tool_version = FORGE_VERSION_STRING;
  m.created = options.created;
  m.voxels = surf.voxels;
  m.seed = options.seed;
  m.entries.resize(jobs.size());

  // Stems are fixed up front so collisions resolve in plan order.
  std::vector<std::string> stems(jobs.size());
  std::map<std::string, int> seen;
  for (std::size_t k = 0; k < jobs.size(); ++k) {
    const auto& item = plan.items[jobs[k].item];
    ManifestEntry probe;
    probe.knot = item.knot;
    probe.frequency = jobs[k].frequency;
    probe.target_genus = analyses[jobs[k].item]->target_genus;
    probe.voxels = {surf.voxels, surf.voxels, surf.voxels};
    ProfileRequest req{item.radius, item.a_frac, jobs[k].frequency, 0.0};
    try {
      probe.profile = plan_thickening(*analyses[jobs[k].item], req, surf.voxels).profile;
    } catch (const Error&) {
      // The entry will fail at the thickening stage and write nothing.
    }
    std::string stem = name_files(probe);
    if (int n = seen[stem]++; n > 0) {
      stem += "_s" + std::to_string(options.seed);
      if (n > 1) stem += "-" + std::to_string(n);
    }
    stems[k] = stem;
  }

  parallel_for(jobs.size(), [&](std::size_t b, std::size_t e) {
    for (std::size_t k = b; k < e; ++k) {
      const auto& item = plan.items[jobs[k].item];
      ProfileRequest req{item.radius, item.a_frac, jobs[k].frequency, 0.0};
      ManifestEntry entry = generate_surface(item.knot, req, surf, options.seed, out_dir, &cache, stems[k]);
      entry.group = static_cast<int>(jobs[k].item);
      m.entries[k] = std::move(entry);
    }
  });

  std::vector<std::string> paths;
  for (const auto& e : m.entries)
    if (e.ok) paths.push_back((fs::path(out_dir) / e.mesh_file).string());
  const AuditReport audit = audit_dataset(paths);
  m.audit_histogram = audit.histogram;
  m.audit_invalid = audit.invalid_count() + audit.unreadable_count();
  m.audit_uniform = m.failed_count() == 0 && audit.uniform() && m.audit_invalid == 0;

  write_file_atomic((fs::path(out_dir) / "manifest.json").string(), manifest_to_text(m));
  return m;
}

std::string manifest_report_csv(const DatasetManifest& m) {
  std::map<int, std::pair<int, int>> rows;  // target genus -> (ok, failed)
  for (const auto& e : m.entries) {
    auto& r = rows[e.target_genus];
    (e.ok ? r.first : r.second) += 1;
  }
  std::string out = "genus,count,failed\n";
  for (const auto& [g, r] : rows)
    out += std::to_string(g) + "," + std::to_string(r.first) + "," + std::to_string(r.second) + "\n";
  return out;
}

// ---------------------------------------------------------------------------
// Manifest serialization

std::size_t DatasetManifest::failed_count() const {
  return static_cast<std::size_t>(std::count_if(entries.begin(), entries.end(), [](const auto& e) { return !e.ok; }));
}

bool ManifestEntry::operator==(const ManifestEntry& o) const { return json(*this) == json(o); }
bool DatasetManifest::operator==(const DatasetManifest& o) const { return json(*this) == json(o); }

void to_json(json& j, const ManifestEntry& e) {
  j = json{{"knot", e.knot},
           {"group", e.group},
           {"frequency", e.frequency},
           {"intersections", e.intersections},
           {"target_genus", e.target_genus},
           {"profile",
            {{"c", e.profile.constant}, {"a", e.profile.amplitude}, {"f", e.profile.frequency}, {"phase", e.profile.phase}}},
           {"reach", e.reach},
           {"voxels", e.voxels},
           {"mode", to_string(e.mode)},
           {"files", {{"mesh", e.mesh_file}, {"field", e.field_file}, {"smooth", e.smooth_file}}},
           {"euler", e.euler ? json(*e.euler) : json(nullptr)},
           {"genus", e.measured_genus ? json(*e.measured_genus) : json(nullptr)},
           {"validity",
            {{"watertight", e.validity.watertight},
             {"manifold", e.validity.manifold},
             {"orientable", e.validity.orientable},
             {"components", e.validity.components},
             {"boundary_edges", e.validity.boundary_edges},
             {"nonmanifold_edges", e.validity.nonmanifold_edges},
             {"nonmanifold_vertices", e.validity.nonmanifold_vertices},
             {"consistently_wound", e.validity.consistently_wound}}},
           {"seed", e.seed},
           {"status", e.ok ? "ok" : "failed"}};
  if (!e.ok) j["failure"] = {{"stage", e.failed_stage}, {"reason", e.reason}};
}

void from_json(const json& j, ManifestEntry& e) {
  e = ManifestEntry{};
  e.knot = j.at("knot").get<KnotSpec>();
  e.group = j.at("group").get<int>();
  e.frequency = j.at("frequency").get<int>();
  e.intersections = j.at("intersections").get<int>();
  e.target_genus = j.at("target_genus").get<int>();
  const auto& p = j.at("profile");
  e.profile = {p.at("c").get<double>(), p.at("a").get<double>(), p.at("f").get<int>(), p.at("phase").get<double>()};
  e.reach = j.at("reach").get<double>();
  e.voxels = j.at("voxels").get<std::array<int, 3>>();
  e.mode = parse_field_mode(j.at("mode").get<std::string>());
  const auto& f = j.at("files");
  e.mesh_file = f.at("mesh").get<std::string>();
  e.field_file = f.at("field").get<std::string>();
  e.smooth_file = f.at("smooth").get<std::string>();
  if (!j.at("euler").is_null()) e.euler = j.at("euler").get<long>();
  if (!j.at("genus").is_null()) e.measured_genus = j.at("genus").get<int>();
  const auto& v = j.at("validity");
  e.validity.watertight = v.at("watertight").get<bool>();
  e.validity.manifold = v.at("manifold").get<bool>();
  e.validity.orientable = v.at("orientable").get<bool>();
  e.validity.components = v.at("components").get<int>();
  e.validity.boundary_edges = v.at("boundary_edges").get<std::size_t>();
  e.validity.nonmanifold_edges = v.at("nonmanifold_edges").get<std::size_t>();
  e.validity.nonmanifold_vertices = v.at("nonmanifold_vertices").get<std::size_t>();
  e.validity.consistently_wound = v.at("consistently_wound").get<bool>();
  e.seed = j.at("seed").get<std::uint64_t>();
  e.ok = j.at("status").get<std::string>() == "ok";
  if (j.contains("failure")) {
    e.failed_stage = j.at("failure").at("stage").get<std::string>();
    e.reason = j.at("failure").at("reason").get<std::string>();
  }
}

void to_json(json& j, const DatasetManifest& m) {
  json hist = json::object();
  for (const auto& [g, c] : m.audit_histogram) hist[std::to_string(g)] = c;
  j = json{{"tool_version", m.tool_version},
           {"created", m.created},
           {"voxels", m.voxels},
           {"seed", m.seed},
           {"entries", m.entries},
           {"audit", {{"histogram", hist}, {"uniform", m.audit_uniform}, {"invalid", m.audit_invalid}}}};
}

void from_json(const json& j, DatasetManifest& m) {
  m = DatasetManifest{};
  m.tool_version = j.at("tool_version").get<std::string>();
  m.created = j.at("created").get<std::string>();
  m.voxels = j.at("voxels").get<int>();
  m.seed = j.at("seed").get<std::uint64_t>();
  m.entries = j.at("entries").get<std::vector<ManifestEntry>>();
  const auto& a = j.at("audit");
  for (const auto& [g, c] : a.at("histogram").items()) m.audit_histogram[std::stoi(g)] = c.get<int>();
  m.audit_uniform = a.at("uniform").get<bool>();
  m.audit_invalid = a.at("invalid").get<int>();
}

std::string manifest_to_text(const DatasetManifest& m) { return json(m).dump(2) + "\n"; }

DatasetManifest manifest_from_text(const std::string& text) {
  try {
    return json::parse(text).get<DatasetManifest>();
  } catch (const json::exception& ex) {
    fail(ErrorKind::Parse, std::string("malformed manifest: ") + ex.what());
  }
}

DatasetManifest read_manifest(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::Io, "cannot open manifest '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return manifest_from_text(buf.str());
}

}  // namespace forge
