#ifndef TINJ_H
#define TINJ_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

#define TINJ_VARIANT_UNROTATED 0

#define TINJ_VARIANT_ROTATED 1

typedef enum TinjStatus {
  TINJ_STATUS_OK = 0,
  TINJ_STATUS_NULL_POINTER = 1,
  TINJ_STATUS_INVALID_ARGUMENT = 2,
  TINJ_STATUS_TOO_LARGE = 3,
  // The trajectory cannot occur, or its logical state vanishes.
  TINJ_STATUS_IMPOSSIBLE = 4,
  TINJ_STATUS_FAILURE = 5,
  TINJ_STATUS_PANIC = 6,
} TinjStatus;

// Opaque logical state form heralded by one trajectory.
typedef struct TinjForm TinjForm;

// Opaque code layout.
typedef struct TinjLayout TinjLayout;

// Parameters of a noisy injection experiment.
typedef struct TinjSimConfig {
  uint32_t distance;
  double theta;
  double phi;
  double p1;
  double p2;
  double p_meas;
  // Noisy sweeps; 0 means the distance.
  uint32_t rounds;
  uint64_t shots;
  uint64_t seed;
} TinjSimConfig;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failed call on this thread, or null. Valid until the
// next call into this library on the same thread.
const char *tinj_last_error(void);

// # Safety
// `s` must be null or a string returned by this library and not yet freed.
void tinj_string_free(char *s);

// Builds a layout; `variant` is one of the `TINJ_VARIANT_*` constants.
//
// # Safety
// `out` must be a valid pointer.
enum TinjStatus tinj_layout_new(uint32_t distance, int32_t variant, struct TinjLayout **out);

// # Safety
// `json` must be a NUL-terminated string and `out` a valid pointer.
enum TinjStatus tinj_layout_from_json(const char *json, struct TinjLayout **out);

// # Safety
// `layout` must be null or a handle from this library that is not yet freed.
void tinj_layout_free(struct TinjLayout *layout);

// Number of data qubits and of X and Z stabilisers.
//
// # Safety
// `layout` must be a live handle; the out-pointers must be valid.
enum TinjStatus tinj_layout_counts(const struct TinjLayout *layout,
                                   size_t *n_data,
                                   size_t *n_x,
                                   size_t *n_z);

// # Safety
// `layout` must be a live handle and `out` a valid pointer.
enum TinjStatus tinj_layout_to_json(const struct TinjLayout *layout, char **out);

// Derives the logical state form for a trajectory such as `"x=00 z=01"`.
//
// # Safety
// `layout` must be a live handle, `trajectory` a NUL-terminated string and
// `out` a valid pointer.
enum TinjStatus tinj_derive(const struct TinjLayout *layout,
                            const char *trajectory,
                            struct TinjForm **out);

// # Safety
// `form` must be null or a handle from this library that is not yet freed.
void tinj_form_free(struct TinjForm *form);

// Number of coefficients in each amplitude polynomial (data qubits plus one).
//
// # Safety
// `form` must be a live handle and `len` a valid pointer.
enum TinjStatus tinj_form_num_coefficients(const struct TinjForm *form, size_t *len);

// Copies the integer coefficients of alpha_L and beta_L; entry `j`
// multiplies `cos(theta/2)^(N-j) (e^{i phi} sin(theta/2))^j`.
//
// # Safety
// `form` must be a live handle; `alpha` and `beta` must each hold `len`
// elements, where `len` equals [`tinj_form_num_coefficients`].
enum TinjStatus tinj_form_coefficients(const struct TinjForm *form,
                                       int64_t *alpha,
                                       int64_t *beta,
                                       size_t len);

// Logical Bloch angles at the physical rotation `(theta, phi)`.
//
// # Safety
// `form` must be a live handle; the out-pointers must be valid.
enum TinjStatus tinj_form_bloch(const struct TinjForm *form,
                                double theta,
                                double phi,
                                double *theta_l,
                                double *phi_l);

// Probability of the form's trajectory at the physical rotation.
//
// # Safety
// `form` must be a live handle and `probability` a valid pointer.
enum TinjStatus tinj_form_probability(const struct TinjForm *form,
                                      double theta,
                                      double phi,
                                      double *probability);

// # Safety
// `form` must be a live handle and `out` a valid pointer.
enum TinjStatus tinj_form_to_json(const struct TinjForm *form, char **out);

// Runs a noisy injection experiment on the rotated code and returns its
// aggregate result as JSON.
//
// # Safety
// `config` and `out` must be valid pointers.
enum TinjStatus tinj_simulate_json(const struct TinjSimConfig *config, char **out);

// Builds a whitelist from the training result and applies it to the
// evaluation result (the training result itself when `eval_json` is null).
// Returns the table and the filtered aggregate as JSON.
//
// # Safety
// `train_json` must be a NUL-terminated string, `eval_json` null or one,
// and `out` a valid pointer.
enum TinjStatus tinj_postselect_json(const char *train_json,
                                     const char *eval_json,
                                     double budget,
                                     char **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* TINJ_H */
