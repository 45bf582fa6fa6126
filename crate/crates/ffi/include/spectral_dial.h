#ifndef SPECTRAL_DIAL_H
#define SPECTRAL_DIAL_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes; the numeric values match the command-line exit codes where
 * both exist.
 */
typedef enum {
  SDIAL_STATUS_OK = 0,
  SDIAL_STATUS_INTERNAL = 1,
  SDIAL_STATUS_INVALID_INPUT = 2,
  SDIAL_STATUS_SINGULAR = 3,
  SDIAL_STATUS_NON_CONVERGENCE = 5,
  SDIAL_STATUS_NULL_POINTER = 7,
  SDIAL_STATUS_PANIC = 8,
} SdialStatus;

/**
 * Polynomial Hamiltonian `Σ a_j ĥ^j` with exact rational coefficients.
 */
typedef struct SdialPolynomial SdialPolynomial;

/**
 * Outcome of a grid verification run.
 */
typedef struct SdialReport SdialReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or null. Owned by the
 * library; valid until the next call on the same thread.
 */
const char *sdial_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *sdial_version(void);

/**
 * Releases a string returned by this library. Null is ignored.
 *
 * # Safety
 * `s` must come from this library and not have been freed already.
 */
void sdial_string_free(char *s);

/**
 * Parses `"a1,a2,..."` or `"j:a_j,..."` (fractions or decimals).
 *
 * # Safety
 * `text` must be a NUL-terminated string; `out` must be writable.
 */
SdialStatus sdial_polynomial_parse(const char *text, SdialPolynomial **out);

/**
 * Builds a polynomial from `len` terms `numerators[i]/denominators[i] · ĥ^powers[i]`.
 * Powers must be strictly increasing and at least 1.
 *
 * # Safety
 * The three arrays must hold `len` elements; `out` must be writable.
 */
SdialStatus sdial_polynomial_from_terms(const uint32_t *powers,
                                        const int64_t *numerators,
                                        const int64_t *denominators,
                                        size_t len,
                                        SdialPolynomial **out);

/**
 * Dials target energies. `energies` holds `len` exact values as strings;
 * `levels` holds their level indices, or is null for levels `0..len`.
 * Non-contiguous levels drop the highest powers.
 *
 * # Safety
 * Arrays must hold `len` elements; `out` must be writable.
 */
SdialStatus sdial_dial(const uint32_t *levels,
                       const char *const *energies,
                       size_t len,
                       SdialPolynomial **out);

/**
 * As [`sdial_dial`] with an explicit list of dropped powers.
 *
 * # Safety
 * Arrays must hold `len` and `drop_len` elements; `out` must be writable.
 */
SdialStatus sdial_dial_partial(const uint32_t *levels,
                               const char *const *energies,
                               size_t len,
                               const uint32_t *drop_powers,
                               size_t drop_len,
                               SdialPolynomial **out);

/**
 * # Safety
 * `p` must come from this library and not have been freed already.
 */
void sdial_polynomial_free(SdialPolynomial *p);

/**
 * Number of stored (nonzero) terms.
 *
 * # Safety
 * `p` must be a live handle; `out` must be writable.
 */
SdialStatus sdial_polynomial_term_count(const SdialPolynomial *p, size_t *out);

/**
 * Term `index`: its power and its coefficient as an exact string (`"-13/2"`).
 *
 * # Safety
 * `p` must be a live handle; out-pointers must be writable.
 */
SdialStatus sdial_polynomial_term(const SdialPolynomial *p,
                                  size_t index,
                                  uint32_t *power,
                                  char **coefficient);

/**
 * Exact `E_n = P(n + 1/2)` as a string, and its nearest double.
 * Either out-pointer may be null.
 *
 * # Safety
 * `p` must be a live handle.
 */
SdialStatus sdial_energy(const SdialPolynomial *p, uint32_t level, char **exact, double *decimal);

/**
 * Levels `0..count` sorted by energy (ties by index), written to `out[0..count]`.
 * Returns the number of adjacent ordering violations in `violations` if non-null.
 *
 * # Safety
 * `p` must be a live handle; `out` must hold `count` elements.
 */
SdialStatus sdial_ascending_permutation(const SdialPolynomial *p,
                                        size_t count,
                                        uint32_t *out,
                                        size_t *violations);

/**
 * Classical cross-section `H(x, 0) = P(x²/2)`.
 *
 * # Safety
 * `p` must be a live handle; `out` must be writable.
 */
SdialStatus sdial_cross_section(const SdialPolynomial *p, double x, double *out);

/**
 * Normalized oscillator eigenfunction `φ_n(x)`.
 *
 * # Safety
 * `out` must be writable.
 */
SdialStatus sdial_eigenfunction(uint32_t n, double x, double *out);

/**
 * Exact determinant of the `size × size` energy matrix as a string.
 *
 * # Safety
 * `out` must be writable.
 */
SdialStatus sdial_determinant(uint32_t size, char **out);

/**
 * Diagonalizes `P(ĥ_grid)` on `points` grid points over `[-half_width, half_width]`
 * and compares the lowest `levels` eigenpairs with the exact spectrum.
 * `stencil_order` is 2 or 4. A failed comparison is not an error: query
 * [`sdial_report_passed`].
 *
 * # Safety
 * `p` must be a live handle; `out` must be writable.
 */
SdialStatus sdial_verify(const SdialPolynomial *p,
                         double half_width,
                         size_t points,
                         uint32_t stencil_order,
                         size_t levels,
                         SdialReport **out);

/**
 * # Safety
 * `r` must come from this library and not have been freed already.
 */
void sdial_report_free(SdialReport *r);

/**
 * # Safety
 * `r` must be a live handle; `out` must be writable.
 */
SdialStatus sdial_report_passed(const SdialReport *r, bool *out);

/**
 * Number of compared levels.
 *
 * # Safety
 * `r` must be a live handle; `out` must be writable.
 */
SdialStatus sdial_report_level_count(const SdialReport *r, size_t *out);

/**
 * The `rank`-th lowest grid eigenpair: its energy, node count and the
 * exact level it was matched to. Any out-pointer may be null.
 *
 * # Safety
 * `r` must be a live handle.
 */
SdialStatus sdial_report_level(const SdialReport *r,
                               size_t rank,
                               double *grid_energy,
                               size_t *node_count,
                               uint32_t *matched_level);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SPECTRAL_DIAL_H */
