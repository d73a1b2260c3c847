#ifndef KOCH_BILLIARDS_H
#define KOCH_BILLIARDS_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/*
 Result codes. Domain, verification and resource failures share their
 values with the command-line exit codes.
 */
typedef enum KbStatus {
  KB_STATUS_OK = 0,
  KB_STATUS_IO = 1,
  KB_STATUS_DOMAIN = 2,
  KB_STATUS_VERIFICATION = 3,
  KB_STATUS_RESOURCE = 4,
  KB_STATUS_NULL_POINTER = 5,
  KB_STATUS_INVALID_UTF8 = 6,
  KB_STATUS_PANIC = 7,
} KbStatus;

/*
 Kind of a traced orbit.
 */
typedef enum KbOrbitKind {
  KB_ORBIT_KIND_PERIODIC = 0,
  KB_ORBIT_KIND_SINGULAR = 1,
  KB_ORBIT_KIND_TRUNCATED = 2,
  KB_ORBIT_KIND_DENSE_BY_DIRECTION = 3,
} KbOrbitKind;

/*
 Opaque orbit handle.
 */
typedef struct KbOrbit KbOrbit;

/*
 Opaque prefractal handle.
 */
typedef struct KbPrefractal KbPrefractal;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Message of the last failed call on this thread, or null. Owned by the
 library; valid until the next failing call on the same thread.
 */
const char *kb_last_error(void);

/*
 Releases a string returned by this library. Null is ignored.

 # Safety
 `s` must come from this library and not have been freed.
 */
void kb_string_free(char *s);

/*
 Builds `KS_level`. Levels above the default cap fail with `Resource`.

 # Safety
 `out` must be a valid pointer to writable storage.
 */
enum KbStatus kb_prefractal_new(uint32_t level, struct KbPrefractal **out);

/*
 # Safety
 `p` must come from [`kb_prefractal_new`] and not have been freed.
 */
void kb_prefractal_free(struct KbPrefractal *p);

/*
 Number of vertices (equal to the number of sides), or 0 for null.

 # Safety
 `p` must be null or a live handle.
 */
size_t kb_prefractal_num_vertices(const struct KbPrefractal *p);

/*
 Cartesian coordinates of vertex `i` (0-based).

 # Safety
 `p` must be a live handle; `x` and `y` must be writable.
 */
enum KbStatus kb_prefractal_vertex(const struct KbPrefractal *p, size_t i, double *x, double *y);

/*
 Exact vertex list as JSON. Release with [`kb_string_free`].

 # Safety
 `p` must be a live handle; `out` must be writable.
 */
enum KbStatus kb_prefractal_to_json(const struct KbPrefractal *p, char **out);

/*
 Traces the orbit from `t_num/t_den` on side `side` (1-based) in lattice
 direction `(dir_a, dir_b)`.

 # Safety
 `p` must be a live handle; `out` must be writable.
 */
enum KbStatus kb_orbit_run(const struct KbPrefractal *p,
                           size_t side,
                           int64_t t_num,
                           int64_t t_den,
                           int64_t dir_a,
                           int64_t dir_b,
                           size_t max_steps,
                           struct KbOrbit **out);

/*
 # Safety
 `o` must come from [`kb_orbit_run`] and not have been freed.
 */
void kb_orbit_free(struct KbOrbit *o);

/*
 # Safety
 `o` must be a live handle; `out` must be writable.
 */
enum KbStatus kb_orbit_kind(const struct KbOrbit *o, enum KbOrbitKind *out);

/*
 Period of a periodic orbit, 0 otherwise or for null.

 # Safety
 `o` must be null or a live handle.
 */
size_t kb_orbit_period(const struct KbOrbit *o);

/*
 Number of forward basepoints, 0 for null.

 # Safety
 `o` must be null or a live handle.
 */
size_t kb_orbit_len(const struct KbOrbit *o);

/*
 Hybrid verdict of a closed orbit.

 # Safety
 `o` must be a live handle; `out` must be writable.
 */
enum KbStatus kb_orbit_is_hybrid(const struct KbOrbit *o, bool *out);

/*
 Orbit report as JSON. Release with [`kb_string_free`].

 # Safety
 `o` must be a live handle; `out` must be writable.
 */
enum KbStatus kb_orbit_to_json(const struct KbOrbit *o, char **out);

/*
 Ternary type of a fraction in `[0, 1]` given as text, e.g. `"7/12"`,
 rendered like `[lr,c]`. Release with [`kb_string_free`].

 # Safety
 `t` must be a nul-terminated string; `out` must be writable.
 */
enum KbStatus kb_classify(const char *t, char **out);

/*
 Genus and Euler characteristic of the surface glued from six copies of
 `KS_level`.

 # Safety
 `genus` and `chi` must be writable.
 */
enum KbStatus kb_surface_genus(uint32_t level, int64_t *genus, int64_t *chi);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* KOCH_BILLIARDS_H */
