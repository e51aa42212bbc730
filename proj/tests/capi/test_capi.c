#include <forge/forge.h>

#include <errno.h>
#include <stdio.h>
#include <stdlib.h>
#include <string.h>
#include <sys/stat.h>

static int failures = 0;

#define EXPECT(cond)                                                   \
  do {                                                                 \
    if (!(cond)) {                                                     \
      fprintf(stderr, "%s:%d: expected %s\n", __FILE__, __LINE__, #cond); \
      ++failures;                                                      \
    }                                                                  \
  } while (0)

#define EXPECT_STATUS(call, want)                                                            \
  do {                                                                                       \
    forge_status got_ = (call);                                                              \
    if (got_ != (want)) {                                                                    \
      fprintf(stderr, "%s:%d: %s returned %s (%s), expected %s\n", __FILE__, __LINE__, #call, \
              forge_status_name(got_), forge_last_error(), forge_status_name(want));         \
      ++failures;                                                                            \
    }                                                                                        \
  } while (0)

static const char* circle_json =
    "{\"family\": \"FourierGeneral\", \"terms\": [{\"axis\": \"x\", \"n\": 1},"
    " {\"axis\": \"y\", \"n\": 1, \"phi\": \"-pi/2\"}]}";

static void join(char* out, size_t cap, const char* dir, const char* name) {
  const int n = snprintf(out, cap, "%s/%s", dir, name);
  if (n < 0 || (size_t)n >= cap) {
    fprintf(stderr, "path too long: %s/%s\n", dir, name);
    exit(2);
  }
}

static int write_text(const char* path, const char* text) {
  FILE* f = fopen(path, "w");
  if (!f) return 0;
  fputs(text, f);
  fclose(f);
  return 1;
}

static void test_basics(void) {
  EXPECT(strlen(forge_version()) > 0);
  EXPECT(strcmp(forge_status_name(FORGE_OK), "ok") == 0);
  EXPECT(strcmp(forge_status_name(FORGE_E_EMPTY_MESH), "empty-mesh") == 0);
  EXPECT(strcmp(forge_status_name(FORGE_E_ARGUMENT), "argument") == 0);
  forge_knot_free(NULL);
  forge_field_free(NULL);
  forge_mesh_free(NULL);
  forge_sample_free(NULL);
  forge_string_free(NULL);
}

static void test_knots(void) {
  forge_knot* knot = NULL;
  EXPECT_STATUS(forge_knot_from_json("{not json", &knot), FORGE_E_PARSE);
  EXPECT(knot == NULL);
  EXPECT(strlen(forge_last_error()) > 0);
  EXPECT_STATUS(forge_knot_from_json(NULL, &knot), FORGE_E_ARGUMENT);
  EXPECT_STATUS(forge_knot_from_json("{\"family\": \"Lissajous\", \"n\": [2, 4, 3], \"phi\": [0, 0, 0]}", &knot),
                FORGE_E_VALIDATION);

  EXPECT_STATUS(forge_knot_from_json(circle_json, &knot), FORGE_OK);
  EXPECT(strlen(forge_last_error()) == 0);
  double p[3];
  EXPECT_STATUS(forge_knot_evaluate(knot, 0.0, p), FORGE_OK);
  EXPECT(p[0] > 0.999999 && p[0] < 1.000001);
  char* s = NULL;
  EXPECT_STATUS(forge_knot_to_json(knot, &s), FORGE_OK);
  EXPECT(s && strstr(s, "\"family\":\"fourier\""));
  forge_string_free(s);
  EXPECT_STATUS(forge_knot_validate(knot, &s), FORGE_OK);
  EXPECT(s && strstr(s, "\"closed\":true"));
  forge_string_free(s);
  EXPECT_STATUS(forge_knot_intersections(knot, 1, &s), FORGE_OK);
  EXPECT(s && strstr(s, "\"count\":0") && strstr(s, "\"genus\":1"));
  forge_string_free(s);
  EXPECT_STATUS(forge_knot_reach(knot, 64, 0.0, 1, &s), FORGE_OK);
  EXPECT(s && strstr(s, "\"feasible\":true") && strstr(s, "\"limited_by\":\"curvature\""));
  forge_string_free(s);
  EXPECT_STATUS(forge_knot_reach(knot, 64, 1.5, 1, &s), FORGE_OK);
  EXPECT(s && strstr(s, "\"feasible\":false"));
  forge_string_free(s);
  EXPECT_STATUS(forge_knot_reach(knot, 2, 0.0, 1, &s), FORGE_E_ARGUMENT);
  forge_knot_free(knot);

  forge_knot* fib = NULL;
  EXPECT_STATUS(forge_knot_from_json("{\"family\": \"Fibonacci\", \"n\": [2, 3, 5], \"phi\": [0, \"pi/2\", 0]}", &fib),
                FORGE_OK);
  EXPECT_STATUS(forge_knot_intersections(fib, 7, &s), FORGE_OK);
  EXPECT(s && strstr(s, "\"count\":6") && strstr(s, "\"genus\":7"));
  forge_string_free(s);
  forge_knot_free(fib);
}

static void test_surface(const char* work) {
  char path[1024];
  forge_knot* knot = NULL;
  EXPECT_STATUS(forge_knot_from_json(circle_json, &knot), FORGE_OK);
  forge_profile_request req = {0.2, 0.0, 1};
  forge_field* field = NULL;
  EXPECT_STATUS(forge_field_from_knot(knot, 32, "wavy", &req, 1, &field), FORGE_E_VALIDATION);
  EXPECT_STATUS(forge_field_from_knot(knot, 32, "sign", &req, 1, &field), FORGE_OK);
  char* s = NULL;
  EXPECT_STATUS(forge_field_info(field, &s), FORGE_OK);
  EXPECT(s && strstr(s, "\"dims\":[32,32,32]") && strstr(s, "\"mode\":\"sign\""));
  forge_string_free(s);

  join(path, sizeof path, work, "circle_field.txt");
  EXPECT_STATUS(forge_field_write(field, path), FORGE_OK);
  forge_field* back = NULL;
  EXPECT_STATUS(forge_field_read(path, &back), FORGE_OK);
  EXPECT_STATUS(forge_field_read("/nonexistent/field.txt", &back), FORGE_E_IO);

  forge_mesh* mesh = NULL;
  EXPECT_STATUS(forge_mesh_from_field(field, 0.0, &mesh), FORGE_OK);
  size_t v = 0, e = 0, f = 0;
  EXPECT_STATUS(forge_mesh_counts(mesh, &v, &e, &f), FORGE_OK);
  EXPECT(v > 0 && (long)v - (long)e + (long)f == 0);
  EXPECT_STATUS(forge_mesh_topology(mesh, &s), FORGE_OK);
  EXPECT(s && strstr(s, "\"genus\":1") && strstr(s, "\"euler\":0"));
  forge_string_free(s);
  EXPECT_STATUS(forge_mesh_smooth(mesh, 5, 0.5), FORGE_OK);
  EXPECT_STATUS(forge_mesh_smooth(mesh, 5, 2.0), FORGE_E_PRECONDITION);
  size_t v2 = 0, e2 = 0, f2 = 0;
  EXPECT_STATUS(forge_mesh_counts(mesh, &v2, &e2, &f2), FORGE_OK);
  EXPECT(v2 == v && e2 == e && f2 == f);

  char stl_dir[1024];
  join(stl_dir, sizeof stl_dir, work, "stl");
  mkdir(stl_dir, 0755);
  join(path, sizeof path, stl_dir, "circle.stl");
  EXPECT_STATUS(forge_mesh_write_stl(mesh, path), FORGE_OK);
  forge_mesh* read = NULL;
  EXPECT_STATUS(forge_mesh_read_stl(path, &read), FORGE_OK);
  EXPECT_STATUS(forge_mesh_counts(read, &v2, NULL, &f2), FORGE_OK);
  EXPECT(v2 == v && f2 == f);

  EXPECT_STATUS(forge_audit_dir(stl_dir, "csv", &s), FORGE_OK);
  EXPECT(s && strstr(s, "genus,count\n1,1\n"));
  forge_string_free(s);
  EXPECT_STATUS(forge_audit_dir(stl_dir, "json", &s), FORGE_OK);
  EXPECT(s && strstr(s, "\"uniform\": true"));
  forge_string_free(s);
  EXPECT_STATUS(forge_audit_dir(stl_dir, "xml", &s), FORGE_E_ARGUMENT);
  EXPECT_STATUS(forge_audit_dir("/nonexistent", "csv", &s), FORGE_E_IO);

  forge_sample* sample = NULL;
  EXPECT_STATUS(forge_sample_create(mesh, v + 1, 3, 0.5, &sample), FORGE_E_PRECONDITION);
  EXPECT(sample == NULL);
  EXPECT_STATUS(forge_sample_create(mesh, 100, 3, 0.5, &sample), FORGE_OK);
  EXPECT_STATUS(forge_sample_stats(sample, &s), FORGE_OK);
  EXPECT(s && strstr(s, "\"points\":100") && strstr(s, "\"connected\":true"));
  forge_string_free(s);
  join(path, sizeof path, work, "sample.txt");
  EXPECT_STATUS(forge_sample_write(sample, path), FORGE_OK);

  forge_sample_free(sample);
  forge_mesh_free(read);
  forge_mesh_free(mesh);
  forge_field_free(back);
  forge_field_free(field);
  forge_knot_free(knot);
}

static void test_layers(void) {
  int passed = 0;
  char* report = NULL;
  EXPECT_STATUS(forge_layers_check("gs-attention", 6, 2, &passed, &report), FORGE_OK);
  EXPECT(passed == 1);
  EXPECT(report && strstr(report, "PASS"));
  forge_string_free(report);
  EXPECT_STATUS(forge_layers_check("gs-pointnet", 6, 2, &passed, NULL), FORGE_OK);
  EXPECT(passed == 1);
  EXPECT_STATUS(forge_layers_check("gs-conv", 6, 2, &passed, NULL), FORGE_E_VALIDATION);
}

static void test_build(const char* work) {
  char plan[1024], out[1024], manifest[1024];
  join(plan, sizeof plan, work, "plan.json");
  join(out, sizeof out, work, "dataset");
  join(manifest, sizeof manifest, out, "manifest.json");
  EXPECT(write_text(plan,
                    "{\"items\": [\n"
                    " {\"genus\": 0, \"frequencies\": [1], \"knot\": {\"family\": \"OpenArc\", \"n\": [1, 2, 3],"
                    " \"phi\": [0, 0, 0]}},\n"
                    " {\"genus\": 1, \"frequencies\": [1], \"radius\": 0.2, \"knot\": {\"family\": \"FourierGeneral\","
                    " \"terms\": [{\"axis\": \"x\", \"n\": 1}, {\"axis\": \"y\", \"n\": 1, \"phi\": \"-pi/2\"}]}}]}\n"));
  int failed = -1, uniform = -1;
  EXPECT_STATUS(forge_build(plan, 40, 3, out, "2000-01-01T00:00:00Z", &failed, &uniform), FORGE_OK);
  EXPECT(failed == 0);
  EXPECT(uniform == 1);
  char* csv = NULL;
  EXPECT_STATUS(forge_report(manifest, &csv), FORGE_OK);
  EXPECT(csv && strcmp(csv, "genus,count,failed\n0,1,0\n1,1,0\n") == 0);
  forge_string_free(csv);
  EXPECT_STATUS(forge_report("/nonexistent/manifest.json", &csv), FORGE_E_IO);
  EXPECT_STATUS(forge_build("/nonexistent/plan.json", 40, 3, out, "", &failed, &uniform), FORGE_E_IO);
}

int main(int argc, char** argv) {
  const char* work = argc > 1 ? argv[1] : "capi_work";
  if (mkdir(work, 0755) != 0 && errno != EEXIST) {
    fprintf(stderr, "cannot create %s\n", work);
    return 2;
  }
  test_basics();
  test_knots();
  test_surface(work);
  test_layers();
  test_build(work);
  if (failures) {
    fprintf(stderr, "%d C API check(s) failed\n", failures);
    return 1;
  }
  printf("C API checks passed\n");
  return 0;
}
