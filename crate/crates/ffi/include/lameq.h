#ifndef LAMEQ_H
#define LAMEQ_H

/* Generated with cbindgen:0.29.4 */

/* This file is generated by cbindgen from the lameq-ffi crate; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Success; for `lameq_eq` the terms are equivalent, for verification the
// certificate is valid.
#define LAMEQ_STATUS_OK 0

// Negative result: terms not equivalent, or a derivation failed to check.
#define LAMEQ_STATUS_NEGATIVE 1

// Unparseable or ill-typed input.
#define LAMEQ_STATUS_BAD_INPUT 2

// The step budget ran out during normalization.
#define LAMEQ_STATUS_FUEL 3

// An internal invariant failed.
#define LAMEQ_STATUS_INTERNAL 4

// An equality certificate together with its statement.
typedef struct LameqCert LameqCert;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Decides equivalence of `left` and `right` at `ty` in `ctx` (all in
// concrete syntax). On equivalence writes the certificate JSON to
// `cert_out` (when non-NULL) and returns `LAMEQ_STATUS_OK`; otherwise
// returns a status code and writes a diagnostic to `err_out`.
//
// # Safety
// `ctx`, `left`, `right`, and `ty` must be valid NUL-terminated strings.
// `cert_out` and `err_out` may be NULL; when non-NULL they must point to
// writable `char*` slots.
int32_t lameq_eq(const char *ctx,
                 const char *left,
                 const char *right,
                 const char *ty,
                 uint64_t fuel,
                 char **cert_out,
                 char **err_out);

// Verifies a certificate passed as JSON text.
//
// # Safety
// `cert_json` must be a valid NUL-terminated string; `err_out` may be NULL.
int32_t lameq_verify(const char *cert_json, char **err_out);

// Translates a declarative derivation (JSON text) into an algorithmic
// certificate, writing the certificate JSON to `cert_out`.
//
// # Safety
// `decl_json` must be a valid NUL-terminated string; `cert_out` and
// `err_out` may be NULL.
int32_t lameq_translate(const char *decl_json, char **cert_out, char **err_out);

// Reduces `term` to weak head normal form; writes a JSON object with the
// printed normal form and the step trace to `result_out`.
//
// # Safety
// `ctx` and `term` must be valid NUL-terminated strings; `result_out` and
// `err_out` may be NULL.
int32_t lameq_whnf(const char *ctx,
                   const char *term,
                   uint64_t fuel,
                   char **result_out,
                   char **err_out);

// Parses a certificate into an opaque handle for repeated use.
//
// # Safety
// `cert_json` must be a valid NUL-terminated string; `out` must point to a
// writable handle slot; `err_out` may be NULL.
int32_t lameq_cert_parse(const char *cert_json, struct LameqCert **out, char **err_out);

// Verifies a parsed certificate handle.
//
// # Safety
// `cert` must be a handle from `lameq_cert_parse` that has not been freed.
int32_t lameq_cert_verify(const struct LameqCert *cert);

// Re-serializes a certificate handle to canonical JSON.
//
// # Safety
// `cert` must be a live handle from `lameq_cert_parse`; `out` must point to
// a writable `char*` slot.
int32_t lameq_cert_to_json(const struct LameqCert *cert, char **out);

// Releases a certificate handle.
//
// # Safety
// `cert` must be NULL or a handle from `lameq_cert_parse` not yet freed.
void lameq_cert_free(struct LameqCert *cert);

// Releases a string returned by this library.
//
// # Safety
// `s` must be NULL or a string returned through one of this library's
// out-pointers, not yet freed.
void lameq_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* LAMEQ_H */
