#ifndef FTPG_H
#define FTPG_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result of every fallible call.
 */
typedef enum FtpgStatus {
  FTPG_STATUS_OK = 0,
  FTPG_STATUS_NULL_POINTER = 1,
  FTPG_STATUS_INVALID_ARGUMENT = 2,
  FTPG_STATUS_NOT_ADMISSIBLE = 3,
  FTPG_STATUS_NOT_AMPLE = 4,
  FTPG_STATUS_INVALID_PARTIAL = 5,
  FTPG_STATUS_EXTENSION_FAILED = 6,
  FTPG_STATUS_DECODE_FAILED = 7,
  FTPG_STATUS_BUDGET = 8,
  FTPG_STATUS_PRIME_SET = 9,
  FTPG_STATUS_PANIC = 10,
} FtpgStatus;

/**
 * A completed extension: the full collineation and its decoded map.
 */
typedef struct FtpgExtension FtpgExtension;

/**
 * GF(p^n).
 */
typedef struct FtpgField FtpgField;

/**
 * A collineation known only on a subset and the lines meeting it.
 */
typedef struct FtpgPartial FtpgPartial;

/**
 * A semilinear isomorphism between two projective spaces.
 */
typedef struct FtpgSemilinear FtpgSemilinear;

/**
 * The projective space of a vector space over a field.
 */
typedef struct FtpgSpace FtpgSpace;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or null. Valid until the
 * next failing call on the same thread; do not free.
 */
const char *ftpg_last_error(void);

/**
 * Releases a string returned by this library.
 *
 * # Safety
 * `s` must be null or a string returned by this library, freed once.
 */
void ftpg_string_free(char *s);

/**
 * Library version as a static string; do not free.
 */
const char *ftpg_version(void);

/**
 * Creates GF(p^n) with the least monic irreducible modulus.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum FtpgStatus ftpg_field_new(uint32_t p, uint32_t n, struct FtpgField **out);

/**
 * Number of elements, or 0 for a null handle.
 *
 * # Safety
 * `f` must be null or a live field handle.
 */
uint32_t ftpg_field_order(const struct FtpgField *f);

/**
 * # Safety
 * `f` must be null or a field handle, freed once.
 */
void ftpg_field_free(struct FtpgField *f);

/**
 * Creates P(F^dim).
 *
 * # Safety
 * `field` must be a live field handle and `out` a valid pointer.
 */
enum FtpgStatus ftpg_space_new(const struct FtpgField *field, size_t dim, struct FtpgSpace **out);

/**
 * # Safety
 * `s` must be null or a live space handle.
 */
size_t ftpg_space_point_count(const struct FtpgSpace *s);

/**
 * # Safety
 * `s` must be null or a live space handle.
 */
size_t ftpg_space_line_count(const struct FtpgSpace *s);

/**
 * # Safety
 * `s` must be null or a space handle, freed once.
 */
void ftpg_space_free(struct FtpgSpace *s);

/**
 * A random semilinear automorphism of `space`. A negative `frob_exp`
 * picks the Frobenius twist at random.
 *
 * # Safety
 * `space` must be a live space handle and `out` a valid pointer.
 */
enum FtpgStatus ftpg_semilinear_random(const struct FtpgSpace *space,
                                       uint64_t seed,
                                       int32_t frob_exp,
                                       struct FtpgSemilinear **out);

/**
 * `x -> M · frob^e(x)` with `M` given row-major as `dim * dim` encoded
 * field elements.
 *
 * # Safety
 * `space` must be a live space handle, `entries` must point to `len`
 * values and `out` must be a valid pointer.
 */
enum FtpgStatus ftpg_semilinear_new(const struct FtpgSpace *space,
                                    uint32_t frob_exp,
                                    const uint32_t *entries,
                                    size_t len,
                                    struct FtpgSemilinear **out);

/**
 * # Safety
 * `l` must be null or a live semilinear handle.
 */
uint32_t ftpg_semilinear_frob_exp(const struct FtpgSemilinear *l);

/**
 * Writes the point image of `p` under the induced collineation.
 *
 * # Safety
 * `l` must be a live semilinear handle and `out` a valid pointer.
 */
enum FtpgStatus ftpg_semilinear_point_image(const struct FtpgSemilinear *l,
                                            uint32_t p,
                                            uint32_t *out);

/**
 * Sets `*equal` and, when equal, `*scalar` to the `a` with `b = a(a·−)`.
 *
 * # Safety
 * `a`, `b` must be live semilinear handles; `equal`, `scalar` valid pointers.
 */
enum FtpgStatus ftpg_semilinear_equal_up_to_scalar(const struct FtpgSemilinear *a,
                                                   const struct FtpgSemilinear *b,
                                                   bool *equal,
                                                   uint32_t *scalar);

/**
 * # Safety
 * `l` must be null or a semilinear handle, freed once.
 */
void ftpg_semilinear_free(struct FtpgSemilinear *l);

/**
 * Decodes a collineation given by its point map `sigma[0..len]`.
 *
 * # Safety
 * `space` must be a live space handle, `sigma` must point to `len` values
 * and `out` must be a valid pointer.
 */
enum FtpgStatus ftpg_decode(const struct FtpgSpace *space,
                            const uint32_t *sigma,
                            size_t len,
                            struct FtpgSemilinear **out);

/**
 * Restricts `lambda` to the points `points[0..len]` and the lines meeting
 * them.
 *
 * # Safety
 * `lambda` must be a live handle, `points` must point to `len` values and
 * `out` must be a valid pointer.
 */
enum FtpgStatus ftpg_partial_restrict(const struct FtpgSemilinear *lambda,
                                      const uint32_t *points,
                                      size_t len,
                                      struct FtpgPartial **out);

/**
 * # Safety
 * `p` must be null or a partial handle, freed once.
 */
void ftpg_partial_free(struct FtpgPartial *p);

/**
 * Extends `partial` to a full collineation, using `size_at_most(t)` on both
 * sides as the family of small subsets.
 *
 * # Safety
 * `partial` must be a live handle and `out` a valid pointer.
 */
enum FtpgStatus ftpg_extend(const struct FtpgPartial *partial,
                            size_t t,
                            struct FtpgExtension **out);

/**
 * # Safety
 * `ext` must be a live extension handle and `out` a valid pointer.
 */
enum FtpgStatus ftpg_extension_point_image(const struct FtpgExtension *ext,
                                           uint32_t p,
                                           uint32_t *out);

/**
 * A new handle holding the decoded semilinear map.
 *
 * # Safety
 * `ext` must be a live extension handle and `out` a valid pointer.
 */
enum FtpgStatus ftpg_extension_decoded(const struct FtpgExtension *ext,
                                       struct FtpgSemilinear **out);

/**
 * # Safety
 * `e` must be null or an extension handle, freed once.
 */
void ftpg_extension_free(struct FtpgExtension *e);

/**
 * Number of collineations agreeing with `partial`, by exhaustive search.
 *
 * # Safety
 * `partial` must be a live handle and `out` a valid pointer.
 */
enum FtpgStatus ftpg_brute_force_count(const struct FtpgPartial *partial, uint64_t *out);

/**
 * Picks the least prime `r` for genus `g`, characteristic `p` and density
 * target `eps_num / eps_den`, and certifies it up to `cert_bound`.
 *
 * # Safety
 * `r` and `certified` must be valid pointers.
 */
enum FtpgStatus ftpg_prime_set_construct(uint32_t g,
                                         uint64_t p,
                                         uint64_t eps_num,
                                         uint64_t eps_den,
                                         uint64_t cert_bound,
                                         uint64_t *r,
                                         bool *certified);

/**
 * Fraction of primes up to `bound` in the order-defined set for `(r, g, p)`,
 * as `num / den` in lowest terms.
 *
 * # Safety
 * `num` and `den` must be valid pointers.
 */
enum FtpgStatus ftpg_prime_set_density(uint64_t r,
                                       uint32_t g,
                                       uint64_t p,
                                       uint64_t bound,
                                       uint64_t *num,
                                       uint64_t *den);

/**
 * `|GL_n(F_l)|` in decimal. Release with [`ftpg_string_free`].
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum FtpgStatus ftpg_gl_order(uint32_t n, uint64_t l, char **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* FTPG_H */
