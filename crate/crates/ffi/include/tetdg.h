#ifndef TETDG_H
#define TETDG_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result codes.
 */
typedef enum TetdgStatus {
  TETDG_STATUS_OK = 0,
  TETDG_STATUS_NULL_POINTER = 1,
  TETDG_STATUS_INVALID_ARGUMENT = 2,
  TETDG_STATUS_CONFIG = 3,
  TETDG_STATUS_PARSE = 4,
  TETDG_STATUS_FORMAT = 5,
  TETDG_STATUS_IO = 6,
  TETDG_STATUS_MESH = 7,
  TETDG_STATUS_NUMERICAL = 8,
  TETDG_STATUS_BUFFER_TOO_SMALL = 9,
  TETDG_STATUS_PANIC = 10,
} TetdgStatus;

/**
 * Parsed case configuration with paths resolved.
 */
typedef struct TetdgCase TetdgCase;

/**
 * Unstructured tetrahedral mesh.
 */
typedef struct TetdgMesh TetdgMesh;

/**
 * Result of a steady solve.
 */
typedef struct TetdgSolution TetdgSolution;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *tetdg_version(void);

/**
 * Message of the last failing call on this thread, or NULL. The pointer
 * stays valid until the next failing call on the same thread.
 */
const char *tetdg_last_error(void);

/**
 * Node counts of the degree-`p` reference element: collocation nodes,
 * cubature nodes, and quadrature nodes per face.
 *
 * # Safety
 * The output pointers must be valid for writes.
 */
enum TetdgStatus tetdg_reference_counts(uint32_t p, size_t *n_p, size_t *n_cub, size_t *n_face);

/**
 * Read a Gmsh 2.2 ASCII mesh.
 *
 * # Safety
 * `path` must be a NUL-terminated string; `out` must be valid for writes.
 */
enum TetdgStatus tetdg_mesh_read(const char *path, struct TetdgMesh **out);

/**
 * Kuhn-split unit cube with `n` cells per edge.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum TetdgStatus tetdg_mesh_box(uint32_t n, struct TetdgMesh **out);

/**
 * Cubed-sphere shell between `r_inner` and `r_outer`; `half != 0` keeps
 * `z >= 0` with a symmetry plane.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum TetdgStatus tetdg_mesh_sphere(uint32_t n,
                                   uint32_t layers,
                                   double r_inner,
                                   double r_outer,
                                   int32_t half,
                                   struct TetdgMesh **out);

/**
 * Number of tetrahedra, 0 for a null handle.
 *
 * # Safety
 * `mesh` must be null or a live handle.
 */
size_t tetdg_mesh_element_count(const struct TetdgMesh *mesh);

/**
 * Sum of the element volumes, NaN for a null handle.
 *
 * # Safety
 * `mesh` must be null or a live handle.
 */
double tetdg_mesh_volume(const struct TetdgMesh *mesh);

/**
 * # Safety
 * `mesh` must be null or a handle not freed before.
 */
void tetdg_mesh_free(struct TetdgMesh *mesh);

/**
 * Load a JSON case file; relative paths resolve against its directory.
 *
 * # Safety
 * `path` must be a NUL-terminated string; `out` must be valid for writes.
 */
enum TetdgStatus tetdg_case_load(const char *path, struct TetdgCase **out);

/**
 * # Safety
 * `case` must be null or a handle not freed before.
 */
void tetdg_case_free(struct TetdgCase *case_);

/**
 * Curve the case mesh and write the sidecar named in the case outputs.
 * `min_jacobian` (nullable) receives the smallest curved-element Jacobian.
 *
 * # Safety
 * `case` must be a live handle; `min_jacobian` null or valid for writes.
 */
enum TetdgStatus tetdg_curve(const struct TetdgCase *case_, double *min_jacobian);

/**
 * Run the steady solve of a case, writing its state and log files.
 *
 * # Safety
 * `case` must be a live handle; `out` must be valid for writes.
 */
enum TetdgStatus tetdg_solve(const struct TetdgCase *case_, struct TetdgSolution **out);

/**
 * Final polynomial degree, 0 for a null handle.
 *
 * # Safety
 * `sol` must be null or a live handle.
 */
uint32_t tetdg_solution_degree(const struct TetdgSolution *sol);

/**
 * Last residual of the final level, NaN for a null handle.
 *
 * # Safety
 * `sol` must be null or a live handle.
 */
double tetdg_solution_residual(const struct TetdgSolution *sol);

/**
 * 1 if the final level reached its tolerance, 0 otherwise.
 *
 * # Safety
 * `sol` must be null or a live handle.
 */
int32_t tetdg_solution_converged(const struct TetdgSolution *sol);

/**
 * Copy the nodal state, element-major then field-major
 * (`elements * 5 * N_p` doubles). With `buf` null, only `len_out`
 * receives the required length.
 *
 * # Safety
 * `sol` must be a live handle, `buf` null or valid for `len` writes,
 * `len_out` valid for writes.
 */
enum TetdgStatus tetdg_solution_state(const struct TetdgSolution *sol,
                                      double *buf,
                                      size_t len,
                                      size_t *len_out);

/**
 * # Safety
 * `sol` must be null or a handle not freed before.
 */
void tetdg_solution_free(struct TetdgSolution *sol);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* TETDG_H */
