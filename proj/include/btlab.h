/* Copyright 2026 The btlab Authors
 * SPDX-License-Identifier: Apache-2.0 */

/* C interface to the btlab library. All functions return a status code;
 * on failure btl_last_error() describes the problem for the calling thread.
 * Strings returned through char** are owned by the caller and released
 * with btl_string_free. */

#ifndef BTLAB_H_
#define BTLAB_H_

#include <stddef.h>

#if defined(_WIN32)
#define BTL_API __declspec(dllexport)
#else
#define BTL_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum btl_status {
  BTL_OK = 0,
  BTL_INVALID_ARGUMENT = 1,
  BTL_DOMAIN = 2,
  BTL_EVALUATION = 3,
  BTL_NUMERICAL = 4,
  BTL_SHIFT_REJECTED = 5,
  BTL_TRUNCATION = 6,
  BTL_CONFIG = 7,
  BTL_STATISTICS = 8,
  BTL_RELIABILITY = 9,
  BTL_IO = 10,
  BTL_INTERNAL = 11
} btl_status;

typedef struct btl_space btl_space;
typedef struct btl_toeplitz btl_toeplitz;

typedef struct btl_run_options {
  const char* output_dir; /* NULL or "" keeps the config value */
  int has_seed;
  unsigned long long seed;
  unsigned workers; /* 0 = hardware concurrency */
} btl_run_options;

BTL_API const char* btl_status_string(btl_status status);
BTL_API const char* btl_last_error(void);
BTL_API const char* btl_version(void);
BTL_API void btl_string_free(char* s);

/* Truncated holomorphic space for a preset id ("fock", "bg", "cp1:k"). */
BTL_API btl_status btl_space_create(const char* preset, int truncation, btl_space** out);
BTL_API void btl_space_destroy(btl_space* space);
BTL_API btl_status btl_space_dimension(const btl_space* space, size_t* out);
/* Orthonormal basis as JSON (degrees, Gram matrix, Cholesky factor). */
BTL_API btl_status btl_space_basis_json(const btl_space* space, char** out);

BTL_API btl_status btl_toeplitz_create(const btl_space* space, const char* symbol, btl_toeplitz** out);
BTL_API void btl_toeplitz_destroy(btl_toeplitz* op);
/* Ascending eigenvalues; values must hold btl_space_dimension entries. */
BTL_API btl_status btl_toeplitz_spectrum(const btl_toeplitz* op, double* values);
/* Coefficient vectors in the orthonormal basis, interleaved re/im, length 2 * dimension. */
BTL_API btl_status btl_toeplitz_resolvent(const btl_toeplitz* op, double c_re, double c_im, const double* psi,
                                          double* out);
BTL_API btl_status btl_toeplitz_semigroup(const btl_toeplitz* op, double t, const double* psi, double* out);

/* Runs a JSON experiment config; report receives the JSON report, passed 0 or 1. */
BTL_API btl_status btl_run_experiment(const char* config_json, const btl_run_options* options, char** report,
                                      int* passed);
BTL_API btl_status btl_list_presets(char** out);
BTL_API btl_status btl_config_schema(char** out);

#ifdef __cplusplus
}
#endif

#endif /* BTLAB_H_ */
