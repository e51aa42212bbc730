// Command-line front end; talks to the library only through the C API.
#include "forge/forge.h"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <iostream>
#include <memory>
#include <optional>
#include <string>

namespace {

using nlohmann::json;

struct Failure {
  forge_status status;
};

void check(forge_status s) {
  if (s != FORGE_OK) throw Failure{s};
}

struct StringDeleter {
  void operator()(char* s) const { forge_string_free(s); }
};
using OwnedString = std::unique_ptr<char, StringDeleter>;

template <typename Fn>
std::string take_string(Fn&& fn) {
  char* raw = nullptr;
  check(fn(&raw));
  OwnedString owned(raw);
  return owned.get();
}

struct KnotDeleter {
  void operator()(forge_knot* k) const { forge_knot_free(k); }
};
struct FieldDeleter {
  void operator()(forge_field* f) const { forge_field_free(f); }
};
struct MeshDeleter {
  void operator()(forge_mesh* m) const { forge_mesh_free(m); }
};
struct SampleDeleter {
  void operator()(forge_sample* s) const { forge_sample_free(s); }
};

std::unique_ptr<forge_knot, KnotDeleter> load_knot(const std::string& path) {
  forge_knot* k = nullptr;
  check(forge_knot_load(path.c_str(), &k));
  return std::unique_ptr<forge_knot, KnotDeleter>(k);
}

std::unique_ptr<forge_mesh, MeshDeleter> load_mesh(const std::string& path) {
  forge_mesh* m = nullptr;
  check(forge_mesh_read_stl(path.c_str(), &m));
  return std::unique_ptr<forge_mesh, MeshDeleter>(m);
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

std::string iso8601(std::time_t t) {
  char buf[32];
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// Explicit option first, then SOURCE_DATE_EPOCH, then the clock.
std::string build_timestamp(const std::string& option) {
  if (!option.empty()) return option;
  if (const char* epoch = std::getenv("SOURCE_DATE_EPOCH"); epoch && *epoch)
    return iso8601(static_cast<std::time_t>(std::strtoll(epoch, nullptr, 10)));
  return iso8601(std::chrono::system_clock::to_time_t(std::chrono::system_clock::now()));
}

void print_topology(const std::string& topo_json) {
  const json t = json::parse(topo_json);
  std::cout << "V " << t["vertices"] << "  E " << t["edges"] << "  F " << t["faces"] << "\n";
  std::cout << "euler " << t["euler"] << "\n";
  std::cout << "watertight " << t["watertight"] << "  manifold " << t["manifold"] << "  orientable "
            << t["orientable"] << "  components " << t["components"] << "\n";
  if (t["genus"].is_null())
    std::cout << "genus undefined (" << t["problem"].get<std::string>() << ")\n";
  else
    std::cout << "genus " << t["genus"] << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"forge: surfaces of known genus from self-intersecting knot curves"};
  app.set_version_flag("--version", forge_version());
  app.require_subcommand(1);

  // knots
  auto* knots = app.add_subcommand("knots", "Knot specifications");
  knots->require_subcommand(1);
  std::string knot_path;
  std::uint64_t seed = 0;
  auto* kvalidate = knots->add_subcommand("validate", "Validate a knot spec");
  kvalidate->add_option("spec", knot_path, "Knot spec JSON")->required();
  auto* kinter = knots->add_subcommand("intersections", "Count self-intersections");
  kinter->add_option("spec", knot_path, "Knot spec JSON")->required();
  kinter->add_option("--seed", seed, "Optimizer seed");

  // reach
  int voxels = 64;
  double radius = 0.0;
  auto* reach = app.add_subcommand("reach", "Reach and admissible radius interval");
  reach->add_option("spec", knot_path, "Knot spec JSON")->required();
  reach->add_option("--voxels", voxels, "Grid resolution per axis");
  reach->add_option("--radius", radius, "Requested maximum radius (default: automatic)");
  reach->add_option("--seed", seed, "Optimizer seed");

  // field
  std::string mode = "sign";
  std::string output;
  int frequency = 1;
  double a_frac = 0.5;
  auto* field = app.add_subcommand("field", "Rasterize a thickened knot");
  field->add_option("spec", knot_path, "Knot spec JSON")->required();
  field->add_option("--voxels", voxels, "Grid resolution per axis");
  field->add_option("--mode", mode, "sign or distance")->check(CLI::IsMember({"sign", "distance"}));
  field->add_option("--radius", radius, "Maximum tube radius (default: automatic)");
  field->add_option("--frequency,-f", frequency, "Radial frequency (1..20)");
  field->add_option("--a-frac", a_frac, "Amplitude fraction in [0, 1)");
  field->add_option("--seed", seed, "Optimizer seed");
  field->add_option("-o,--output", output, "Output field file")->required();

  // mesh
  std::string input;
  int smooth_iters = 0;
  double lambda = 0.5;
  auto* mesh = app.add_subcommand("mesh", "Extract a mesh from a field file");
  mesh->add_option("field", input, "Field text file")->required();
  mesh->add_option("-o,--output", output, "Output STL")->required();
  mesh->add_option("--smooth", smooth_iters, "Laplacian smoothing iterations");
  mesh->add_option("--lambda", lambda, "Smoothing factor in [0, 1]");

  // audit
  std::string format = "csv";
  auto* audit = app.add_subcommand("audit", "Genus histogram of every STL in a directory");
  audit->add_option("dir", input, "Directory")->required();
  audit->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));

  // sample
  std::size_t sample_size = 3000;
  double keep_prob = 0.5;
  auto* samp = app.add_subcommand("sample", "Graph sampling of a mesh");
  samp->add_option("mesh", input, "Input STL")->required();
  samp->add_option("-n", sample_size, "Sample size");
  samp->add_option("--seed", seed, "Sampling seed");
  samp->add_option("--keep", keep_prob, "Neighbour keep probability");
  samp->add_option("-o,--output", output, "Output sample file")->required();

  // layers
  std::string layer = "gs-attention";
  int nodes = 8;
  std::uint64_t layer_seed = 1;
  auto* layers = app.add_subcommand("layers", "GS layer checks");
  layers->require_subcommand(1);
  auto* lcheck = layers->add_subcommand("check", "Property and gradient suites");
  lcheck->add_option("--layer", layer, "gs-attention or gs-pointnet")
      ->check(CLI::IsMember({"gs-attention", "gs-pointnet"}));
  lcheck->add_option("--n", nodes, "Node count");
  lcheck->add_option("--seed", layer_seed, "Seed");

  // build
  std::string plan;
  std::string timestamp;
  bool full = false;
  std::uint64_t build_seed = 42;
  auto* build = app.add_subcommand("build", "Generate a dataset from a plan");
  build->add_option("--plan", plan, "Plan JSON")->required();
  auto* vox_opt = build->add_option("--voxels", voxels, "Grid resolution per axis (default 64, 100 with --full)");
  build->add_option("--seed", build_seed, "Seed");
  build->add_option("-o,--output", output, "Output directory")->required();
  build->add_flag("--full", full, "Full resolution (100 voxels per axis)");
  build->add_option("--timestamp", timestamp, "Manifest timestamp (default: SOURCE_DATE_EPOCH or now)");

  // report
  auto* report = app.add_subcommand("report", "Genus histogram CSV of a manifest");
  report->add_option("manifest", input, "manifest.json")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (kvalidate->parsed()) {
      auto k = load_knot(knot_path);
      const json r = json::parse(take_string([&](char** o) { return forge_knot_validate(k.get(), o); }));
      std::cout << "valid " << r["family"].get<std::string>() << (r["closed"].get<bool>() ? " closed" : " open") << "\n";
      if (r.contains("coprime")) {
        std::cout << "pairwise coprime: " << (r["coprime"].get<bool>() ? "yes" : "no") << "\n";
        if (!r["forbidden_phase_m"].is_null())
          std::cout << "warning: phases hit a singular configuration (m = " << r["forbidden_phase_m"] << ")\n";
      }
    } else if (kinter->parsed()) {
      auto k = load_knot(knot_path);
      const json r = json::parse(take_string([&](char** o) { return forge_knot_intersections(k.get(), seed, o); }));
      std::cout << "count," << r["count"] << "\n";
      std::cout << "genus," << r["genus"] << "\n";
      std::cout << "x,y,z,t1,t2\n";
      for (std::size_t i = 0; i < r["points"].size(); ++i) {
        const auto& p = r["points"][i];
        const auto& t = r["params"][i];
        std::cout << fmt(p[0]) << "," << fmt(p[1]) << "," << fmt(p[2]) << "," << fmt(t[0]) << "," << fmt(t[1]) << "\n";
      }
    } else if (reach->parsed()) {
      auto k = load_knot(knot_path);
      const json r =
          json::parse(take_string([&](char** o) { return forge_knot_reach(k.get(), voxels, radius, seed, o); }));
      std::cout << "crossings " << r["crossings"] << "\n";
      std::cout << "reach " << fmt(r["reach"]) << " (" << r["limited_by"].get<std::string>() << ", exclusion "
                << fmt(r["exclusion_radius"]) << ")\n";
      std::cout << "voxel " << fmt(r["voxel"]) << "\n";
      if (r["feasible"].get<bool>()) {
        std::cout << "radius interval [" << fmt(r["radius_min"]) << ", " << fmt(r["radius_max"]) << "]\n";
      } else {
        std::cout << "infeasible: " << r["reason"].get<std::string>() << "\n";
        return 3;
      }
    } else if (field->parsed()) {
      auto k = load_knot(knot_path);
      forge_profile_request req{radius, a_frac, frequency};
      forge_field* raw = nullptr;
      check(forge_field_from_knot(k.get(), voxels, mode.c_str(), &req, seed, &raw));
      std::unique_ptr<forge_field, FieldDeleter> f(raw);
      check(forge_field_write(f.get(), output.c_str()));
      const json info = json::parse(take_string([&](char** o) { return forge_field_info(f.get(), o); }));
      std::cout << "wrote " << output << " dims " << info["dims"].dump() << " spacing " << fmt(info["spacing"][0])
                << " inside " << info["inside_nodes"] << "\n";
    } else if (mesh->parsed()) {
      forge_field* fraw = nullptr;
      check(forge_field_read(input.c_str(), &fraw));
      std::unique_ptr<forge_field, FieldDeleter> f(fraw);
      forge_mesh* mraw = nullptr;
      check(forge_mesh_from_field(f.get(), 0.0, &mraw));
      std::unique_ptr<forge_mesh, MeshDeleter> m(mraw);
      if (smooth_iters > 0) check(forge_mesh_smooth(m.get(), smooth_iters, lambda));
      check(forge_mesh_write_stl(m.get(), output.c_str()));
      print_topology(take_string([&](char** o) { return forge_mesh_topology(m.get(), o); }));
    } else if (audit->parsed()) {
      std::cout << take_string([&](char** o) { return forge_audit_dir(input.c_str(), format.c_str(), o); });
    } else if (samp->parsed()) {
      auto m = load_mesh(input);
      forge_sample* sraw = nullptr;
      check(forge_sample_create(m.get(), sample_size, seed, keep_prob, &sraw));
      std::unique_ptr<forge_sample, SampleDeleter> s(sraw);
      check(forge_sample_write(s.get(), output.c_str()));
      const json st = json::parse(take_string([&](char** o) { return forge_sample_stats(s.get(), o); }));
      std::cout << "points " << st["points"] << "  edges " << st["edges"] << "  connected "
                << st["connected"] << "  mean degree " << fmt(st["mean_degree"]) << "\n";
    } else if (lcheck->parsed()) {
      int passed = 0;
      std::cout << take_string(
          [&](char** o) { return forge_layers_check(layer.c_str(), nodes, layer_seed, &passed, o); });
      return passed ? 0 : 1;
    } else if (build->parsed()) {
      if (full && vox_opt->count() == 0) voxels = 100;
      int failed = 0;
      int uniform = 0;
      const std::string created = build_timestamp(timestamp);
      check(forge_build(plan.c_str(), voxels, build_seed, output.c_str(), created.c_str(), &failed, &uniform));
      const std::string manifest = output + "/manifest.json";
      std::cout << take_string([&](char** o) { return forge_report(manifest.c_str(), o); });
      std::cout << "failed " << failed << "  uniform " << (uniform ? "yes" : "no") << "\n";
      return failed == 0 && uniform ? 0 : 2;
    } else if (report->parsed()) {
      std::cout << take_string([&](char** o) { return forge_report(input.c_str(), o); });
    }
  } catch (const Failure& f) {
    std::cerr << "forge: " << forge_status_name(f.status) << " error: " << forge_last_error() << "\n";
    return 1;
  }
  return 0;
}
