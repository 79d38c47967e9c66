#ifndef IBPKIT_H
#define IBPKIT_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum IbpStatus {
  IBP_STATUS_OK = 0,
  IBP_STATUS_CHECK_FAILED = 1,
  IBP_STATUS_INPUT_ERROR = 2,
  IBP_STATUS_NULL_POINTER = 3,
  IBP_STATUS_INVALID_UTF8 = 4,
  IBP_STATUS_PANIC = 5,
} IbpStatus;

/**
 * A parsed algebra. Create with [`ibp_algebra_from_json`], release with
 * [`ibp_algebra_free`].
 */
typedef struct IbpAlgebra IbpAlgebra;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Parses an algebra document.
 *
 * # Safety
 * `json` must be a NUL-terminated string and `out` a writable pointer.
 */
enum IbpStatus ibp_algebra_from_json(const char *json, struct IbpAlgebra **out);

/**
 * # Safety
 * `handle` must come from [`ibp_algebra_from_json`] and not be used afterwards.
 */
void ibp_algebra_free(struct IbpAlgebra *handle);

/**
 * Number of direct factors of the algebra.
 *
 * # Safety
 * `handle` must be a live handle and `out` a writable pointer.
 */
enum IbpStatus ibp_algebra_factor_count(const struct IbpAlgebra *handle, size_t *out);

/**
 * Runs the MTL validator, or the IBP0 validator when `ibp0` is nonzero, and
 * writes the report as JSON. Returns `CheckFailed` when a check fails.
 *
 * # Safety
 * `handle` must be a live handle and `report` a writable pointer.
 */
enum IbpStatus ibp_algebra_validate(const struct IbpAlgebra *handle,
                                    uint32_t window_bound,
                                    int32_t ibp0,
                                    char **report);

/**
 * Splits a hyperstate on the algebra and writes the recovered measure and
 * radical state as a hyperstate document.
 *
 * # Safety
 * `handle` must be a live handle, `state_json` a NUL-terminated string and
 * `out` a writable pointer.
 */
enum IbpStatus ibp_hyperstate_split(const struct IbpAlgebra *handle,
                                    const char *state_json,
                                    uint32_t window_bound,
                                    char **out);

/**
 * Runs the command line in-process with `argc` arguments (excluding the
 * program name). Writes the printed report and the process exit status.
 *
 * # Safety
 * `argv` must point to `argc` NUL-terminated strings; `out` and
 * `exit_status` must be writable.
 */
enum IbpStatus ibp_run(const char *const *argv, size_t argc, char **out, int32_t *exit_status);

/**
 * # Safety
 * `s` must be a string returned by this library, not yet freed.
 */
void ibp_string_free(char *s);

/**
 * Message of the last failure on this thread, or null. The pointer stays
 * valid until the next failing call on the same thread.
 */
const char *ibp_last_error(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* IBPKIT_H */
