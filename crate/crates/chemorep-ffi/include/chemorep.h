#ifndef CHEMOREP_H
#define CHEMOREP_H

/* Generated by cbindgen from chemorep-ffi; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Status codes returned by every fallible call.
typedef enum ChemorepStatus {
  CHEMOREP_OK = 0,
  CHEMOREP_NULL_ARGUMENT = 1,
  CHEMOREP_INVALID_ARGUMENT = 2,
  CHEMOREP_SOLVER_FAILURE = 3,
  CHEMOREP_IO_ERROR = 4,
  CHEMOREP_PANIC = 5,
} ChemorepStatus;

// Builder for a simulation; not thread-shareable.
typedef struct ChemorepConfig ChemorepConfig;

// A live simulation: spaces, operators and the current state.
typedef struct ChemorepSim ChemorepSim;

// Per-step diagnostics mirrored across the ABI.
typedef struct ChemorepStepInfo {
  uint64_t step;
  double time;
  // E(u, sigma) = 1/2 ||u||^2 + 1/4 ||sigma||^2.
  double energy;
  // Residual of the discrete energy law (zero for homogeneous runs up
  // to solver tolerance).
  double energy_law_residual;
  // Total mass of u.
  double mass;
  // Residual of the v balance identity.
  double v_mass_balance_residual;
  uint32_t nonlinear_iterations;
} ChemorepStepInfo;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Most recent error message on this thread; the pointer stays valid until
// the next failing call on the same thread. Never null.
const char *chemorep_last_error_message(void);

// Creates a config with the reference defaults (m = 40, k = 1e-5,
// T = 1e-3, Newton, tol = 1e-6, manufactured forcing on).
struct ChemorepConfig *chemorep_config_new(void);

// Frees a config; null is ignored.
//
// # Safety
// `config` must come from [`chemorep_config_new`] and not be used again.
void chemorep_config_free(struct ChemorepConfig *config);

// Sets the mesh subdivisions of the unit square (m >= 1).
//
// # Safety
// `config` must be a live pointer from [`chemorep_config_new`].
enum ChemorepStatus chemorep_config_set_mesh(struct ChemorepConfig *config, uint32_t m);

// Sets the time step and final time; T/k must be a positive integer.
//
// # Safety
// `config` must be a live pointer from [`chemorep_config_new`].
enum ChemorepStatus chemorep_config_set_time(struct ChemorepConfig *config,
                                             double k,
                                             double t_final);

// Selects the nonlinear method: "picard" or "newton".
//
// # Safety
// `config` must be live; `method` must be a NUL-terminated string.
enum ChemorepStatus chemorep_config_set_method(struct ChemorepConfig *config, const char *method);

// Sets the nonlinear stopping tolerance.
//
// # Safety
// `config` must be a live pointer from [`chemorep_config_new`].
enum ChemorepStatus chemorep_config_set_tolerance(struct ChemorepConfig *config, double tol);

// Sets the relative residual of the linear solves.
//
// # Safety
// `config` must be a live pointer from [`chemorep_config_new`].
enum ChemorepStatus chemorep_config_set_linear_tolerance(struct ChemorepConfig *config,
                                                         double linear_tol);

// Enables (nonzero) or disables (zero) the manufactured-solution forcing
// terms. Disabled means the homogeneous, energy-decreasing model.
//
// # Safety
// `config` must be a live pointer from [`chemorep_config_new`].
enum ChemorepStatus chemorep_config_set_manufactured_forcing(struct ChemorepConfig *config,
                                                             int32_t enabled);

// Builds a simulation from a config: P1/P1/P2 spaces on the uniform
// unit-square mesh, initial data projected from the reference fields.
// Returns null on failure (see [`chemorep_last_error_message`]).
//
// # Safety
// `config` must be a live pointer from [`chemorep_config_new`].
struct ChemorepSim *chemorep_sim_new(const struct ChemorepConfig *config);

// Frees a simulation; null is ignored.
//
// # Safety
// `sim` must come from [`chemorep_sim_new`] and not be used again.
void chemorep_sim_free(struct ChemorepSim *sim);

// Advances one backward-Euler step; fills `info` when non-null.
//
// # Safety
// `sim` must be live; `info` must be null or valid for writing.
enum ChemorepStatus chemorep_sim_advance(struct ChemorepSim *sim, struct ChemorepStepInfo *info);

// Advances `n_steps` steps.
//
// # Safety
// `sim` must be a live pointer from [`chemorep_sim_new`].
enum ChemorepStatus chemorep_sim_run(struct ChemorepSim *sim, uint64_t n_steps);

// Step index of the current state (0 before the first advance).
//
// # Safety
// `sim` must be a live pointer or null (returns 0).
uint64_t chemorep_sim_step_count(const struct ChemorepSim *sim);

// Simulation time of the current state.
//
// # Safety
// `sim` must be a live pointer or null (returns 0).
double chemorep_sim_time(const struct ChemorepSim *sim);

// Diagnostics of the most recent step.
//
// # Safety
// `sim` must be live; `info` valid for writing.
enum ChemorepStatus chemorep_sim_last_step_info(const struct ChemorepSim *sim,
                                                struct ChemorepStepInfo *info);

// L2 and H1 errors of a field ("u", "sigma" or "v") against the
// manufactured solution at the current time. Only meaningful when the
// manufactured forcing is enabled.
//
// # Safety
// `sim` must be live; `field` NUL-terminated; the out pointers null or
// valid for writing.
enum ChemorepStatus chemorep_sim_error_norms(const struct ChemorepSim *sim,
                                             const char *field,
                                             double *l2_out,
                                             double *h1_out);

// Writes the current state as legacy ASCII VTK.
//
// # Safety
// `sim` must be live; `path` NUL-terminated.
enum ChemorepStatus chemorep_sim_write_vtk(const struct ChemorepSim *sim, const char *path);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* CHEMOREP_H */
