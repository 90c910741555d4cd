#ifndef GENCLASS_H
#define GENCLASS_H

/* Generated by cbindgen; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

#define GC_BASIS_STANDARD 0

#define GC_BASIS_ETAMIXED 1

#define GC_ALGO_LLL 0

#define GC_ALGO_TREE 1

#define GC_ALGO_BOTH 2

#define GC_VIA_HILBERT 0

#define GC_VIA_X0PLUS119 1

/*
 Opaque generalized class function.
 */
typedef struct GcClassFunction GcClassFunction;

typedef int32_t GcStatus;

#define GC_OK 0

#define GC_ERR_NULL 1

#define GC_ERR_PRECONDITION 2

#define GC_ERR_PRECISION 3

#define GC_ERR_PARSE 4

#define GC_ERR_DEGENERATE 5

#define GC_ERR_INTERNAL 6

#define GC_ERR_PANIC 7

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Message of the last failed call on this thread, or NULL. Owned by the library;
 valid until the next call on the same thread.
 */
const char *gc_last_error_message(void);

/*
 Compute the class function of `d`. `agree_out` (may be NULL) receives 1/0 for
 `GC_ALGO_BOTH` and -1 otherwise.

 # Safety
 `out` must be a valid pointer; `agree_out` must be NULL or valid.
 */
GcStatus gc_genclass_compute(int64_t d,
                             int32_t basis,
                             int32_t algo,
                             struct GcClassFunction **out,
                             int32_t *agree_out);

/*
 Serialize in the monomial-per-line text format. Free the result with [`gc_string_free`].

 # Safety
 `f` must come from [`gc_genclass_compute`]; `out` must be valid.
 */
GcStatus gc_class_function_to_string(const struct GcClassFunction *f, char **out);

/*
 Conventional notation, e.g. `y + 1`. Free the result with [`gc_string_free`].

 # Safety
 As for [`gc_class_function_to_string`].
 */
GcStatus gc_class_function_pretty(const struct GcClassFunction *f, char **out);

/*
 Pole order at the point at infinity, or -1 for NULL.

 # Safety
 `f` must be NULL or come from [`gc_genclass_compute`].
 */
int64_t gc_class_function_pole_order(const struct GcClassFunction *f);

/*
 # Safety
 `f` must be NULL or come from [`gc_genclass_compute`], and not be freed twice.
 */
void gc_class_function_free(struct GcClassFunction *f);

/*
 # Safety
 `s` must be NULL or a string returned by this library, and not be freed twice.
 */
void gc_string_free(char *s);

/*
 `H_D` as text (`<coeff> <deg> 0` per line). Free the result with [`gc_string_free`].

 # Safety
 `out` must be valid.
 */
GcStatus gc_hilbert(int64_t d, char **out);

/*
 Density of discriminants with a Fricke-compatible N-system, as `num/den`.

 # Safety
 `num` and `den` must be valid.
 */
GcStatus gc_density(uint64_t n, bool fundamental, uint64_t *num, uint64_t *den);

/*
 Reduction factor of `X0(N)` (or `X0+(N)` if `plus`), as `num/den`.

 # Safety
 `num` and `den` must be valid.
 */
GcStatus gc_rfactor(uint64_t n, bool plus, uint64_t *num, uint64_t *den);

/*
 Curve over `F_q` with `q + 1 - t` points as JSON `{q, a1..a6, count}`.
 Free the result with [`gc_string_free`].

 # Safety
 `out` must be valid.
 */
GcStatus gc_cm(int64_t t, uint64_t q, int32_t via, uint64_t seed, char **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* GENCLASS_H */
