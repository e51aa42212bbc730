#ifndef FORGE_FORGE_H
#define FORGE_FORGE_H

#include <stddef.h>
#include <stdint.h>

#if defined(FORGE_BUILDING_LIBRARY)
#define FORGE_API __attribute__((visibility("default")))
#else
#define FORGE_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum forge_status {
  FORGE_OK = 0,
  FORGE_E_VALIDATION = 1,
  FORGE_E_PRECONDITION = 2,
  FORGE_E_DISCRETIZATION = 3,
  FORGE_E_INFEASIBLE = 4,
  FORGE_E_GEOMETRY = 5,
  FORGE_E_EMPTY_MESH = 6,
  FORGE_E_TOPOLOGY = 7,
  FORGE_E_PARSE = 8,
  FORGE_E_IO = 9,
  FORGE_E_NUMERIC = 10,
  FORGE_E_DOMAIN = 11,
  FORGE_E_ARGUMENT = 12, /* null pointer or malformed argument */
  FORGE_E_INTERNAL = 13
} forge_status;

typedef struct forge_knot forge_knot;
typedef struct forge_field forge_field;
typedef struct forge_mesh forge_mesh;
typedef struct forge_sample forge_sample;

FORGE_API const char* forge_version(void);
FORGE_API const char* forge_status_name(forge_status status);

/* Message of the last failed call on this thread; empty after success. */
FORGE_API const char* forge_last_error(void);

/* Releases strings returned through char** out-parameters. */
FORGE_API void forge_string_free(char* s);

/* ---- knots ---- */

FORGE_API forge_status forge_knot_from_json(const char* json, forge_knot** out);
FORGE_API forge_status forge_knot_load(const char* path, forge_knot** out);
FORGE_API void forge_knot_free(forge_knot* knot);
FORGE_API forge_status forge_knot_to_json(const forge_knot* knot, char** out);
FORGE_API forge_status forge_knot_evaluate(const forge_knot* knot, double t, double xyz[3]);

/* Validates the spec; writes a JSON report (family, closed, and for Lissajous
   the coprimality and forbidden-phase findings). */
FORGE_API forge_status forge_knot_validate(const forge_knot* knot, char** report_json);

/* JSON: {"count", "segments", "genus", "points": [[x,y,z]...], "params": [[t,s]...]}. */
FORGE_API forge_status forge_knot_intersections(const forge_knot* knot, uint64_t seed, char** out_json);

/* Reach and the admissible radius interval at the given cubic resolution.
   radius <= 0 selects the automatic radius. */
FORGE_API forge_status forge_knot_reach(const forge_knot* knot, int voxels, double radius, uint64_t seed,
                                        char** out_json);

/* ---- scalar fields ---- */

typedef struct forge_profile_request {
  double radius;   /* <= 0: automatic */
  double a_frac;   /* amplitude fraction in [0, 1) */
  int frequency;   /* 1..20 */
} forge_profile_request;

/* mode: "sign" or "distance". request may be NULL for the defaults. */
FORGE_API forge_status forge_field_from_knot(const forge_knot* knot, int voxels, const char* mode,
                                             const forge_profile_request* request, uint64_t seed, forge_field** out);
FORGE_API forge_status forge_field_read(const char* path, forge_field** out);
FORGE_API forge_status forge_field_write(const forge_field* field, const char* path);
/* JSON: {"dims", "origin", "spacing", "mode", "inside_nodes"}. */
FORGE_API forge_status forge_field_info(const forge_field* field, char** out_json);
FORGE_API void forge_field_free(forge_field* field);

/* ---- meshes ---- */

FORGE_API forge_status forge_mesh_from_field(const forge_field* field, double isovalue, forge_mesh** out);
FORGE_API forge_status forge_mesh_read_stl(const char* path, forge_mesh** out);
FORGE_API forge_status forge_mesh_write_stl(const forge_mesh* mesh, const char* path);
FORGE_API forge_status forge_mesh_smooth(forge_mesh* mesh, int iterations, double lambda);
FORGE_API forge_status forge_mesh_counts(const forge_mesh* mesh, size_t* vertices, size_t* edges, size_t* faces);
/* JSON validity report with "euler" and "genus" (null when the mesh is not a
   single closed orientable manifold, with "problem" naming the violation). */
FORGE_API forge_status forge_mesh_topology(const forge_mesh* mesh, char** out_json);
FORGE_API void forge_mesh_free(forge_mesh* mesh);

/* Audits every .stl below dir (sorted by path). format: "csv" or "json". */
FORGE_API forge_status forge_audit_dir(const char* dir, const char* format, char** out);

/* ---- graph sampling ---- */

FORGE_API forge_status forge_sample_create(const forge_mesh* mesh, size_t size, uint64_t seed, double keep_prob,
                                           forge_sample** out);
FORGE_API forge_status forge_sample_write(const forge_sample* sample, const char* path);
/* JSON: {"points", "edges", "connected", "mean_degree", "min_degree", "max_degree"}. */
FORGE_API forge_status forge_sample_stats(const forge_sample* sample, char** out_json);
FORGE_API void forge_sample_free(forge_sample* sample);

/* ---- GS layers ---- */

/* layer: "gs-attention" or "gs-pointnet". *passed is set to 1 when every
   property holds. The report is human-readable text. */
FORGE_API forge_status forge_layers_check(const char* layer, int n, uint64_t seed, int* passed, char** report);

/* ---- dataset pipeline ---- */

/* Builds the plan into out_dir and writes manifest.json there. created is the
   manifest timestamp. *failed receives the number of failed entries and
   *uniform whether the audit found a uniform, fully valid dataset. */
FORGE_API forge_status forge_build(const char* plan_path, int voxels, uint64_t seed, const char* out_dir,
                                   const char* created, int* failed, int* uniform);
/* Genus histogram CSV of a manifest. */
FORGE_API forge_status forge_report(const char* manifest_path, char** csv);

#ifdef __cplusplus
}
#endif

#endif
