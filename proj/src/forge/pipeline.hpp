#pragma once

#include "forge/knot.hpp"
#include "forge/scalar_field.hpp"
#include "forge/self_intersect.hpp"
#include "forge/thickening.hpp"
#include "forge/topology.hpp"

#include <json.hpp>

#include <array>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

namespace forge {

// How the tube radius is chosen. Without `radius` the largest radius that
// stays clear of the reach and of voxel-scale merging is used.
struct ProfileRequest {
  std::optional<double> radius;  // upper bound on c + a
  double a_frac = 0.5;
  int frequency = 1;
  double phase = 0.0;

  bool operator==(const ProfileRequest&) const = default;
};

struct SurfaceOptions {
  int voxels = 64;
  FieldMode mode = FieldMode::Sign;
  int smooth_iterations = 10;
  double smooth_factor = 0.5;
  std::size_t fine_points = 2048;  // polygon used for reach and rasterization
};

// Per-curve work shared by every entry built on the same knot.
struct CurveAnalysis {
  KnotSpec knot;
  IntersectionSet intersections;
  PolyCurve fine;
  int target_genus = 0;
};

struct ManifestEntry {
  KnotSpec knot;
  int group = 0;  // entries with the same group share an isotopy type
  int frequency = 1;
  int intersections = 0;
  int target_genus = 0;
  RadiusProfile profile;
  double reach = 0.0;
  std::array<int, 3> voxels{64, 64, 64};
  FieldMode mode = FieldMode::Sign;
  std::string mesh_file;
  std::string field_file;
  std::string smooth_file;
  std::optional<long> euler;
  std::optional<int> measured_genus;
  TopologyReport validity;
  std::uint64_t seed = 0;
  bool ok = false;
  std::string failed_stage;
  std::string reason;

  bool operator==(const ManifestEntry&) const;
};

struct DatasetManifest {
  std::vector<ManifestEntry> entries;
  std::string tool_version;
  std::string created;
  int voxels = 64;
  std::uint64_t seed = 0;
  std::map<int, int> audit_histogram;
  bool audit_uniform = true;
  int audit_invalid = 0;

  std::size_t failed_count() const;
  bool operator==(const DatasetManifest&) const;
};

void to_json(nlohmann::json& j, const ManifestEntry& e);
void from_json(const nlohmann::json& j, ManifestEntry& e);
void to_json(nlohmann::json& j, const DatasetManifest& m);
void from_json(const nlohmann::json& j, DatasetManifest& m);

std::string manifest_to_text(const DatasetManifest& m);
DatasetManifest manifest_from_text(const std::string& text);
DatasetManifest read_manifest(const std::string& path);

// Caches CurveAnalysis per (knot, seed, fine_points); safe to share between threads.
class AnalysisCache {
 public:
  std::shared_ptr<const CurveAnalysis> get(const KnotSpec& knot, std::uint64_t seed, std::size_t fine_points);
  std::size_t size() const;

 private:
  mutable std::mutex mutex_;
  std::map<std::string, std::shared_ptr<const CurveAnalysis>> entries_;
};

CurveAnalysis analyze_curve(const KnotSpec& knot, std::uint64_t seed, std::size_t fine_points);

struct Thickening {
  ReachEstimate reach;
  RadiusProfile profile;
  GridSpec grid;
};

// Chooses reach, profile and grid together; the grid spacing depends on the
// radius and the admissible radius on the spacing. Throws Error(Infeasible).
Thickening plan_thickening(const CurveAnalysis& analysis, const ProfileRequest& request, int voxels);

// Runs every stage for one surface and writes its three files into out_dir.
// Stage failures are reported in the entry, never thrown; no files are left
// behind for a failed entry.
ManifestEntry generate_surface(const KnotSpec& knot, const ProfileRequest& request, const SurfaceOptions& options,
                               std::uint64_t seed, const std::string& out_dir, AnalysisCache* cache = nullptr,
                               const std::string& stem_override = {});

// File stem, e.g. g7_liss_3-4-7_p0-0-pi2_f2_c0.1000_a0.0200_r0.0800-0.1200_v100.
std::string name_files(const ManifestEntry& entry);
std::string phase_token(double phase);

struct PlanItem {
  KnotSpec knot;
  std::vector<int> frequencies;
  std::optional<int> genus;  // declared target; checked against the intersection count
  std::optional<double> radius;
  double a_frac = 0.5;
};

struct DatasetPlan {
  std::vector<PlanItem> items;
};

DatasetPlan plan_from_json(const nlohmann::json& j);
DatasetPlan load_plan(const std::string& path);

struct BuildOptions {
  SurfaceOptions surface;
  std::uint64_t seed = 42;
  std::string created;  // manifest timestamp, supplied by the caller
};

// Generates every (item, frequency) entry, writes manifest.json and audits the
// meshes. Unequal per-genus entry counts raise Error(Precondition) before any
// mesh is generated.
DatasetManifest build_dataset(const DatasetPlan& plan, const BuildOptions& options, const std::string& out_dir);

// "genus,count,failed" rows over the targeted genera.
std::string manifest_report_csv(const DatasetManifest& m);

// Writes bytes to path via a temporary file and rename.
void write_file_atomic(const std::string& path, const std::string& bytes);

}  // namespace forge
