#include "forge/forge.h"

#include "forge/graph_sampling.hpp"
#include "forge/layer_checks.hpp"
#include "forge/marching_cubes.hpp"
#include "forge/pipeline.hpp"
#include "forge/smoothing.hpp"
#include "forge/stl.hpp"
#include "forge/topology.hpp"

#include <algorithm>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <new>
#include <string>

struct forge_knot {
  forge::KnotSpec spec;
};
struct forge_field {
  forge::ScalarField field;
};
struct forge_mesh {
  forge::TriMesh mesh;
};
struct forge_sample {
  forge::SampleGraph graph;
};

namespace {

using nlohmann::json;

thread_local std::string last_error;

forge_status status_for(forge::ErrorKind kind) {
  switch (kind) {
    case forge::ErrorKind::Validation: return FORGE_E_VALIDATION;
    case forge::ErrorKind::Precondition: return FORGE_E_PRECONDITION;
    case forge::ErrorKind::Discretization: return FORGE_E_DISCRETIZATION;
    case forge::ErrorKind::Infeasible: return FORGE_E_INFEASIBLE;
    case forge::ErrorKind::Geometry: return FORGE_E_GEOMETRY;
    case forge::ErrorKind::EmptyMesh: return FORGE_E_EMPTY_MESH;
    case forge::ErrorKind::Topology: return FORGE_E_TOPOLOGY;
    case forge::ErrorKind::Parse: return FORGE_E_PARSE;
    case forge::ErrorKind::Io: return FORGE_E_IO;
    case forge::ErrorKind::Numeric: return FORGE_E_NUMERIC;
    case forge::ErrorKind::Domain: return FORGE_E_DOMAIN;
  }
  return FORGE_E_INTERNAL;
}

struct ArgumentError {
  std::string message;
};

// Runs body, translating exceptions into status codes and the thread-local message.
template <typename Body>
forge_status guarded(Body&& body) {
  try {
    body();
    last_error.clear();
    return FORGE_OK;
  } catch (const ArgumentError& e) {
    last_error = e.message;
    return FORGE_E_ARGUMENT;
  } catch (const forge::Error& e) {
    last_error = e.what();
    return status_for(e.kind());
  } catch (const json::exception& e) {
    last_error = e.what();
    return FORGE_E_PARSE;
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
    return FORGE_E_INTERNAL;
  } catch (const std::exception& e) {
    last_error = e.what();
    return FORGE_E_INTERNAL;
  } catch (...) {
    last_error = "unknown error";
    return FORGE_E_INTERNAL;
  }
}

template <typename T>
void require(const T* p, const char* name) {
  if (!p) throw ArgumentError{std::string(name) + " must not be null"};
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

json vec_json(const forge::Vec3& v) { return json::array({v[0], v[1], v[2]}); }

forge::ProfileRequest to_request(const forge_profile_request* r) {
  forge::ProfileRequest req;
  if (r) {
    if (r->radius > 0) req.radius = r->radius;
    req.a_frac = r->a_frac;
    req.frequency = r->frequency;
  }
  return req;
}

json topology_json(const forge::TriMesh& mesh) {
  const auto report = forge::validate_mesh(mesh);
  json j{{"vertices", mesh.vertex_count()},
         {"edges", forge::mesh_edges(mesh).size()},
         {"faces", mesh.face_count()},
         {"watertight", report.watertight},
         {"manifold", report.manifold},
         {"orientable", report.orientable},
         {"components", report.components},
         {"boundary_edges", report.boundary_edges},
         {"nonmanifold_edges", report.nonmanifold_edges},
         {"nonmanifold_vertices", report.nonmanifold_vertices},
         {"consistently_wound", report.consistently_wound},
         {"euler", forge::euler_characteristic(mesh)}};
  try {
    j["genus"] = forge::genus(mesh);
  } catch (const forge::Error& e) {
    j["genus"] = nullptr;
    j["problem"] = e.what();
  }
  return j;
}

}  // namespace

extern "C" {

const char* forge_version(void) { return FORGE_VERSION_STRING; }

const char* forge_status_name(forge_status status) {
  switch (status) {
    case FORGE_OK: return "ok";
    case FORGE_E_VALIDATION: return "validation";
    case FORGE_E_PRECONDITION: return "precondition";
    case FORGE_E_DISCRETIZATION: return "discretization";
    case FORGE_E_INFEASIBLE: return "infeasible";
    case FORGE_E_GEOMETRY: return "geometry";
    case FORGE_E_EMPTY_MESH: return "empty-mesh";
    case FORGE_E_TOPOLOGY: return "topology";
    case FORGE_E_PARSE: return "parse";
    case FORGE_E_IO: return "io";
    case FORGE_E_NUMERIC: return "numeric";
    case FORGE_E_DOMAIN: return "domain";
    case FORGE_E_ARGUMENT: return "argument";
    case FORGE_E_INTERNAL: return "internal";
  }
  return "unknown";
}

const char* forge_last_error(void) { return last_error.c_str(); }

void forge_string_free(char* s) { std::free(s); }

// ---- knots

forge_status forge_knot_from_json(const char* text, forge_knot** out) {
  return guarded([&] {
    require(text, "json");
    require(out, "out");
    *out = nullptr;
    json j;
    try {
      j = json::parse(text);
    } catch (const json::exception& e) {
      forge::fail(forge::ErrorKind::Parse, std::string("malformed knot spec: ") + e.what());
    }
    auto spec = j.get<forge::KnotSpec>();
    forge::validate(spec);
    *out = new forge_knot{std::move(spec)};
  });
}

forge_status forge_knot_load(const char* path, forge_knot** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    *out = nullptr;
    auto spec = forge::load_knot(path);
    forge::validate(spec);
    *out = new forge_knot{std::move(spec)};
  });
}

void forge_knot_free(forge_knot* knot) { delete knot; }

forge_status forge_knot_to_json(const forge_knot* knot, char** out) {
  return guarded([&] {
    require(knot, "knot");
    require(out, "out");
    *out = dup_string(json(knot->spec).dump());
  });
}

forge_status forge_knot_evaluate(const forge_knot* knot, double t, double xyz[3]) {
  return guarded([&] {
    require(knot, "knot");
    require(xyz, "xyz");
    const auto p = forge::evaluate(knot->spec, t);
    for (int k = 0; k < 3; ++k) xyz[k] = p[k];
  });
}

forge_status forge_knot_validate(const forge_knot* knot, char** report_json) {
  return guarded([&] {
    require(knot, "knot");
    require(report_json, "report_json");
    const auto& spec = knot->spec;
    forge::validate(spec);
    json j{{"valid", true}, {"family", forge::to_string(spec.family)}, {"closed", spec.closed()}};
    if (spec.family == forge::KnotFamily::Lissajous) {
      const auto r = forge::validate_lissajous(spec);
      j["coprime"] = r.coprime_ok;
      j["forbidden_phase_m"] = r.forbidden_phase_hit ? json(*r.forbidden_phase_hit) : json(nullptr);
    }
    *report_json = dup_string(j.dump());
  });
}

forge_status forge_knot_intersections(const forge_knot* knot, uint64_t seed, char** out_json) {
  return guarded([&] {
    require(knot, "knot");
    require(out_json, "out_json");
    forge::DEConfig cfg;
    cfg.rng_seed = seed;
    const auto set = forge::count_self_intersections(knot->spec, cfg);
    json points = json::array();
    json params = json::array();
    for (std::size_t i = 0; i < set.count(); ++i) {
      points.push_back(vec_json(set.points[i]));
      params.push_back(json::array({set.parameter_pairs[i].first, set.parameter_pairs[i].second}));
    }
    json j{{"count", set.count()},
           {"segments", set.segments},
           {"genus", forge::genus_from_intersections(static_cast<int>(set.count()), knot->spec.closed())},
           {"points", points},
           {"params", params}};
    *out_json = dup_string(j.dump());
  });
}

forge_status forge_knot_reach(const forge_knot* knot, int voxels, double radius, uint64_t seed, char** out_json) {
  return guarded([&] {
    require(knot, "knot");
    require(out_json, "out_json");
    if (voxels < 6) throw ArgumentError{"voxels must be at least 6"};
    const auto analysis = forge::analyze_curve(knot->spec, seed, forge::SurfaceOptions{}.fine_points);
    forge::ProfileRequest req;
    if (radius > 0) req.radius = radius;
    req.a_frac = 0.0;
    json j{{"crossings", analysis.intersections.count()}, {"target_genus", analysis.target_genus}};
    try {
      const auto th = forge::plan_thickening(analysis, req, voxels);
      const double voxel = th.grid.spacing[0];
      j["feasible"] = true;
      j["reach"] = th.reach.reach;
      j["limited_by"] = th.reach.capped ? "cap" : th.reach.curvature_limited ? "curvature" : "segment pair";
      j["exclusion_radius"] = 3.0 * th.profile.max_radius();
      j["voxel"] = voxel;
      j["radius_min"] = forge::kMinRadiusVoxels * voxel;
      j["radius_max"] = th.profile.max_radius();
    } catch (const forge::Error& e) {
      if (e.kind() != forge::ErrorKind::Infeasible) throw;
      const double voxel = forge::grid_spacing_for(analysis.fine, radius > 0 ? radius : 0.0, {voxels, voxels, voxels});
      const double probe = radius > 0 ? radius : forge::kMinRadiusVoxels * voxel;
      const auto reach = forge::estimate_reach(analysis.fine, analysis.intersections.points, 3.0 * probe);
      j["feasible"] = false;
      j["reach"] = reach.reach;
      j["limited_by"] = reach.capped ? "cap" : reach.curvature_limited ? "curvature" : "segment pair";
      j["exclusion_radius"] = 3.0 * probe;
      j["voxel"] = voxel;
      j["reason"] = e.what();
    }
    *out_json = dup_string(j.dump());
  });
}

// ---- fields

forge_status forge_field_from_knot(const forge_knot* knot, int voxels, const char* mode,
                                   const forge_profile_request* request, uint64_t seed, forge_field** out) {
  return guarded([&] {
    require(knot, "knot");
    require(out, "out");
    *out = nullptr;
    const auto field_mode = forge::parse_field_mode(mode ? mode : "sign");
    const auto analysis = forge::analyze_curve(knot->spec, seed, forge::SurfaceOptions{}.fine_points);
    const auto th = forge::plan_thickening(analysis, to_request(request), voxels);
    *out = new forge_field{forge::rasterize(analysis.fine, th.profile, th.grid, field_mode)};
  });
}

forge_status forge_field_read(const char* path, forge_field** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    *out = nullptr;
    *out = new forge_field{forge::read_field(path)};
  });
}

forge_status forge_field_write(const forge_field* field, const char* path) {
  return guarded([&] {
    require(field, "field");
    require(path, "path");
    forge::write_file_atomic(path, forge::field_to_text(field->field));
  });
}

forge_status forge_field_info(const forge_field* field, char** out_json) {
  return guarded([&] {
    require(field, "field");
    require(out_json, "out_json");
    const auto& f = field->field;
    std::size_t inside = 0;
    for (std::size_t i = 0; i < f.values.size(); ++i) inside += f.inside(i) ? 1 : 0;
    json j{{"dims", f.grid.dims},
           {"origin", vec_json(f.grid.origin)},
           {"spacing", vec_json(f.grid.spacing)},
           {"mode", forge::to_string(f.mode)},
           {"inside_nodes", inside}};
    *out_json = dup_string(j.dump());
  });
}

void forge_field_free(forge_field* field) { delete field; }

// ---- meshes

forge_status forge_mesh_from_field(const forge_field* field, double isovalue, forge_mesh** out) {
  return guarded([&] {
    require(field, "field");
    require(out, "out");
    *out = nullptr;
    *out = new forge_mesh{forge::marching_cubes(field->field, isovalue)};
  });
}

forge_status forge_mesh_read_stl(const char* path, forge_mesh** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    *out = nullptr;
    *out = new forge_mesh{forge::read_stl(path)};
  });
}

forge_status forge_mesh_write_stl(const forge_mesh* mesh, const char* path) {
  return guarded([&] {
    require(mesh, "mesh");
    require(path, "path");
    const auto bytes = forge::encode_stl(mesh->mesh);
    forge::write_file_atomic(path, std::string(bytes.begin(), bytes.end()));
  });
}

forge_status forge_mesh_smooth(forge_mesh* mesh, int iterations, double lambda) {
  return guarded([&] {
    require(mesh, "mesh");
    mesh->mesh = forge::smooth(mesh->mesh, iterations, lambda);
  });
}

forge_status forge_mesh_counts(const forge_mesh* mesh, size_t* vertices, size_t* edges, size_t* faces) {
  return guarded([&] {
    require(mesh, "mesh");
    if (vertices) *vertices = mesh->mesh.vertex_count();
    if (edges) *edges = forge::mesh_edges(mesh->mesh).size();
    if (faces) *faces = mesh->mesh.face_count();
  });
}

forge_status forge_mesh_topology(const forge_mesh* mesh, char** out_json) {
  return guarded([&] {
    require(mesh, "mesh");
    require(out_json, "out_json");
    *out_json = dup_string(topology_json(mesh->mesh).dump());
  });
}

void forge_mesh_free(forge_mesh* mesh) { delete mesh; }

forge_status forge_audit_dir(const char* dir, const char* format, char** out) {
  return guarded([&] {
    require(dir, "dir");
    require(out, "out");
    const std::string fmt = format ? format : "csv";
    if (fmt != "csv" && fmt != "json") throw ArgumentError{"format must be csv or json"};
    namespace fs = std::filesystem;
    std::error_code ec;
    if (!fs::is_directory(dir, ec)) forge::fail(forge::ErrorKind::Io, std::string("not a directory: ") + dir);
    std::vector<std::string> paths;
    for (const auto& entry : fs::recursive_directory_iterator(dir))
      if (entry.is_regular_file() && entry.path().extension() == ".stl") paths.push_back(entry.path().string());
    std::sort(paths.begin(), paths.end());
    const auto report = forge::audit_dataset(paths);
    *out = dup_string(fmt == "csv" ? forge::audit_to_csv(report) : forge::audit_to_json(report));
  });
}

// ---- sampling

forge_status forge_sample_create(const forge_mesh* mesh, size_t size, uint64_t seed, double keep_prob,
                                 forge_sample** out) {
  return guarded([&] {
    require(mesh, "mesh");
    require(out, "out");
    *out = nullptr;
    forge::SampleOptions opts;
    opts.sample_size = size;
    opts.seed = seed;
    opts.keep_prob = keep_prob;
    *out = new forge_sample{forge::sample(mesh->mesh, opts)};
  });
}

forge_status forge_sample_write(const forge_sample* sample, const char* path) {
  return guarded([&] {
    require(sample, "sample");
    require(path, "path");
    forge::write_file_atomic(path, forge::sample_to_text(sample->graph));
  });
}

forge_status forge_sample_stats(const forge_sample* sample, char** out_json) {
  return guarded([&] {
    require(sample, "sample");
    require(out_json, "out_json");
    const auto& g = sample->graph;
    const auto stats = forge::degree_stats(g);
    json j{{"points", g.size()},
           {"edges", g.edges.size()},
           {"connected", forge::is_connected(g.size(), g.edges)},
           {"mean_degree", stats.mean},
           {"min_degree", stats.min},
           {"max_degree", stats.max}};
    *out_json = dup_string(j.dump());
  });
}

void forge_sample_free(forge_sample* sample) { delete sample; }

// ---- layers

forge_status forge_layers_check(const char* layer, int n, uint64_t seed, int* passed, char** report) {
  return guarded([&] {
    require(layer, "layer");
    forge::gs::LayerCheckOptions opts;
    opts.layer = forge::gs::parse_layer(layer);
    opts.n = n;
    opts.seed = seed;
    const auto r = forge::gs::run_layer_checks(opts);
    if (passed) *passed = r.passed() ? 1 : 0;
    if (report) *report = dup_string(forge::gs::report_to_text(r));
  });
}

// ---- pipeline

forge_status forge_build(const char* plan_path, int voxels, uint64_t seed, const char* out_dir, const char* created,
                         int* failed, int* uniform) {
  return guarded([&] {
    require(plan_path, "plan_path");
    require(out_dir, "out_dir");
    if (voxels < 6) throw ArgumentError{"voxels must be at least 6"};
    forge::BuildOptions opts;
    opts.surface.voxels = voxels;
    opts.seed = seed;
    opts.created = created ? created : "";
    const auto manifest = forge::build_dataset(forge::load_plan(plan_path), opts, out_dir);
    if (failed) *failed = static_cast<int>(manifest.failed_count());
    if (uniform) *uniform = manifest.audit_uniform ? 1 : 0;
  });
}

forge_status forge_report(const char* manifest_path, char** csv) {
  return guarded([&] {
    require(manifest_path, "manifest_path");
    require(csv, "csv");
    *csv = dup_string(forge::manifest_report_csv(forge::read_manifest(manifest_path)));
  });
}

}  // extern "C"
