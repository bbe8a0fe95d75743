#ifndef STEKLOV_H
#define STEKLOV_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Sine modes on the lateral faces.
#define STEKLOV_FAMILY_DIRICHLET 0

// Cosine modes on the lateral faces.
#define STEKLOV_FAMILY_NEUMANN 1

typedef enum SteklovStatus {
  STEKLOV_STATUS_OK = 0,
  STEKLOV_STATUS_DOMAIN = 1,
  STEKLOV_STATUS_UNSUPPORTED = 2,
  STEKLOV_STATUS_CONFIG = 3,
  STEKLOV_STATUS_CONSISTENCY = 4,
  STEKLOV_STATUS_NUMERICAL = 5,
  STEKLOV_STATUS_SIGN_CONTRACT = 6,
  STEKLOV_STATUS_DISCRETIZATION = 7,
  STEKLOV_STATUS_DEGENERATE_MODE = 8,
  STEKLOV_STATUS_NULL_POINTER = 9,
  STEKLOV_STATUS_BUFFER_TOO_SMALL = 10,
  STEKLOV_STATUS_PANIC = 11,
} SteklovStatus;

// Opaque rectangular cylinder.
typedef struct SteklovBox SteklovBox;

// Opaque finite-difference spectrum.
typedef struct SteklovSpectrum2D SteklovSpectrum2D;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failed call on this thread; empty if none. The pointer
// stays valid until the next failing call on the same thread.
const char *steklov_last_error_message(void);

// Library version as a static NUL-terminated string.
const char *steklov_version(void);

// `t(s)` for `s > 0`.
//
// # Safety
// `result` must be valid for writes.
enum SteklovStatus steklov_t_profile(double s, double *result);

// `t'(s)` for `s >= 1`.
//
// # Safety
// `result` must be valid for writes.
enum SteklovStatus steklov_t_profile_derivative(double s, double *result);

// Inverse of `t` on `s >= 1`, for `t >= t(1)`.
//
// # Safety
// `result` must be valid for writes.
enum SteklovStatus steklov_h_inverse(double t, double *result);

// Volume of the unit ball in dimension `m >= 1`.
//
// # Safety
// `result` must be valid for writes.
enum SteklovStatus steklov_unit_ball_volume(uint32_t m, double *result);

// Lattice points `m` of the family with `sum (m_i/l_i)^2 <= radius^2`.
//
// # Safety
// `sides` must point to `n_sides` readable doubles; `result` must be valid
// for writes.
enum SteklovStatus steklov_count_lattice(const double *sides,
                                         size_t n_sides,
                                         double radius,
                                         uint32_t family_code,
                                         uint64_t *result);

// `1 / (1 + lambda)`.
//
// # Safety
// `result` must be valid for writes.
enum SteklovStatus steklov_mu_from_lambda(double lambda, double *result);

// `mu* / (1 + mu*)`.
//
// # Safety
// `result` must be valid for writes.
enum SteklovStatus steklov_mu_from_mu_star(double mu_star, double *result);

// Weyl prediction of the counting function in dimension `n`.
//
// # Safety
// `result` must be valid for writes.
enum SteklovStatus steklov_predict_count(uint32_t n,
                                         double rho_integral,
                                         double tau,
                                         double *result);

// Creates a box with base sides `sides[0..n_sides]`.
//
// # Safety
// `sides` must point to `n_sides` readable doubles; `handle` must be valid
// for writes. The handle must be released with [`steklov_box_free`].
enum SteklovStatus steklov_box_new(const double *sides,
                                   size_t n_sides,
                                   double height,
                                   double rho,
                                   struct SteklovBox **handle);

// Releases a box. Null is ignored.
//
// # Safety
// `handle` must come from [`steklov_box_new`] and not have been freed.
void steklov_box_free(struct SteklovBox *handle);

// Ambient dimension of the box.
//
// # Safety
// `handle` must be a live box; `result` must be valid for writes.
enum SteklovStatus steklov_box_dim(const struct SteklovBox *handle, size_t *result);

// The `k` smallest eigenvalues of a family, ascending, into
// `values[0..k]`.
//
// # Safety
// `handle` must be a live box; `values` must point to `capacity` writable
// doubles.
enum SteklovStatus steklov_box_eigenvalues(const struct SteklovBox *handle,
                                           uint32_t family_code,
                                           size_t k,
                                           double *values,
                                           size_t capacity);

// Number of eigenvalues `<= tau` of a family.
//
// # Safety
// `handle` must be a live box; `result` must be valid for writes.
enum SteklovStatus steklov_box_count(const struct SteklovBox *handle,
                                     uint32_t family_code,
                                     double tau,
                                     uint64_t *result);

// Solves the 2-D problem on `[0, a] x [0, b]` with `nx x ny` cells.
// `faces` is a list such as `bottom=steklov:1,top=hardnu`; unlisted faces
// are `softfree`.
//
// # Safety
// `faces` must be a NUL-terminated string; `handle` must be valid for
// writes. The handle must be released with [`steklov_spectrum2d_free`].
enum SteklovStatus steklov_solve2d(double a,
                                   double b,
                                   size_t nx,
                                   size_t ny,
                                   const char *faces,
                                   size_t k,
                                   struct SteklovSpectrum2D **handle);

// Releases a spectrum. Null is ignored.
//
// # Safety
// `handle` must come from [`steklov_solve2d`] and not have been freed.
void steklov_spectrum2d_free(struct SteklovSpectrum2D *handle);

// Number of eigenvalues held.
//
// # Safety
// `handle` must be live; `result` must be valid for writes.
enum SteklovStatus steklov_spectrum2d_len(const struct SteklovSpectrum2D *handle, size_t *result);

// Copies the eigenvalues (ascending).
//
// # Safety
// `handle` must be live; `values` must point to `capacity` writable doubles.
enum SteklovStatus steklov_spectrum2d_eigenvalues(const struct SteklovSpectrum2D *handle,
                                                  double *values,
                                                  size_t capacity);

// Copies the relative Rayleigh-quotient residuals.
//
// # Safety
// `handle` must be live; `values` must point to `capacity` writable doubles.
enum SteklovStatus steklov_spectrum2d_rayleigh_residuals(const struct SteklovSpectrum2D *handle,
                                                         double *values,
                                                         size_t capacity);

// Relative asymmetry of the boundary operator before symmetrization.
//
// # Safety
// `handle` must be live; `result` must be valid for writes.
enum SteklovStatus steklov_spectrum2d_asymmetry(const struct SteklovSpectrum2D *handle,
                                                double *result);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* STEKLOV_H */
