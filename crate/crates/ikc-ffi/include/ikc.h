#ifndef IKC_H
#define IKC_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Reduction relation selector.
 */
typedef enum IkcRelation {
  IKC_RELATION_BETA = 0,
  IKC_RELATION_ETA = 1,
  IKC_RELATION_BETA_ETA = 2,
  IKC_RELATION_HEAD = 3,
} IkcRelation;

/**
 * Result codes. Zero is success.
 */
typedef enum IkcStatus {
  IKC_STATUS_OK = 0,
  /**
   * The question was answered in the negative, e.g. a refuted typing.
   */
  IKC_STATUS_NO = 1,
  /**
   * Fuel ran out before an answer was reached.
   */
  IKC_STATUS_UNKNOWN = 2,
  IKC_STATUS_NULL_ARGUMENT = 3,
  IKC_STATUS_INVALID_UTF8 = 4,
  IKC_STATUS_SYNTAX_ERROR = 10,
  IKC_STATUS_DEGREE_ERROR = 11,
  IKC_STATUS_JOINABILITY_ERROR = 12,
  IKC_STATUS_SHAPE_ERROR = 13,
  IKC_STATUS_DOMAIN_ERROR = 14,
  IKC_STATUS_RULE_ERROR = 15,
  IKC_STATUS_SHAPE_REFUTATION = 16,
  IKC_STATUS_PRECONDITION_ERROR = 17,
  IKC_STATUS_NOT_A_REDUCT = 18,
  IKC_STATUS_NOT_AN_EXPANSION = 19,
  IKC_STATUS_TYPE_MISMATCH = 20,
  IKC_STATUS_PANIC = 99,
} IkcStatus;

/**
 * A derivation tree, not necessarily valid.
 */
typedef struct IkcDerivation IkcDerivation;

/**
 * A well-formed term.
 */
typedef struct IkcTerm IkcTerm;

/**
 * A canonical type.
 */
typedef struct IkcType IkcType;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failing call on this thread. Valid until the next
 * failing call on the same thread; never null.
 */
const char *ikc_last_error_message(void);

/**
 * Releases a string returned by this library. Null is ignored.
 *
 * # Safety
 * `s` must come from this library and not have been freed.
 */
void ikc_string_free(char *s);

/**
 * Parses a term from its s-expression form.
 *
 * # Safety
 * `src` must be a NUL-terminated string; `out` must be writable.
 */
enum IkcStatus ikc_term_parse(const char *src, struct IkcTerm **out);

/**
 * # Safety
 * `t` must be null or a live handle from this library.
 */
void ikc_term_free(struct IkcTerm *t);

/**
 * Prints a term; release the result with `ikc_string_free`. Null on a null handle.
 *
 * # Safety
 * `t` must be null or a live handle.
 */
char *ikc_term_to_string(const struct IkcTerm *t);

/**
 * Degree of a term, printed as an index such as `[1 0]`.
 *
 * # Safety
 * `t` must be null or a live handle.
 */
char *ikc_term_degree(const struct IkcTerm *t);

/**
 * Normalizes by the leftmost-outermost strategy. Returns `Unknown` when
 * `fuel` steps do not reach a normal form; `out` then holds the last term.
 *
 * # Safety
 * `t` must be a live handle; `out` must be writable.
 */
enum IkcStatus ikc_term_normalize(const struct IkcTerm *t,
                                  enum IkcRelation rel,
                                  size_t fuel,
                                  struct IkcTerm **out);

/**
 * Parses a type and brings it to canonical form.
 *
 * # Safety
 * `src` must be a NUL-terminated string; `out` must be writable.
 */
enum IkcStatus ikc_type_parse(const char *src, struct IkcType **out);

/**
 * # Safety
 * `u` must be null or a live handle from this library.
 */
void ikc_type_free(struct IkcType *u);

/**
 * # Safety
 * `u` must be null or a live handle.
 */
char *ikc_type_to_string(const struct IkcType *u);

/**
 * `Ok` when `u` is a subtype of `v`, `No` otherwise.
 *
 * # Safety
 * Both handles must be live.
 */
enum IkcStatus ikc_subtype(const struct IkcType *u, const struct IkcType *v);

/**
 * Parses a derivation tree without checking it.
 *
 * # Safety
 * `src` must be a NUL-terminated string; `out` must be writable.
 */
enum IkcStatus ikc_derivation_parse(const char *src, struct IkcDerivation **out);

/**
 * # Safety
 * `d` must be null or a live handle from this library.
 */
void ikc_derivation_free(struct IkcDerivation *d);

/**
 * # Safety
 * `d` must be null or a live handle.
 */
char *ikc_derivation_to_string(const struct IkcDerivation *d);

/**
 * Checks every rule of a derivation. On success, if `judgment` is not null
 * it receives the printed conclusion, to be released with `ikc_string_free`.
 *
 * # Safety
 * `d` must be a live handle; `judgment` must be null or writable.
 */
enum IkcStatus ikc_derivation_check(const struct IkcDerivation *d, char **judgment);

/**
 * Searches for a derivation of `env |- t : u` within `fuel`. `env` may be
 * null for the empty environment. Returns `Ok` with the derivation in `out`,
 * `No` when the judgment is refuted, or `Unknown` when fuel runs out.
 *
 * # Safety
 * Handles must be live; `env` must be null or NUL-terminated; `out` must be writable.
 */
enum IkcStatus ikc_typecheck(const struct IkcTerm *t,
                             const char *env,
                             const struct IkcType *u,
                             size_t fuel,
                             struct IkcDerivation **out);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* IKC_H */
