#ifndef IWAHORI_H
#define IWAHORI_H

/* Generated from the Rust sources by cbindgen; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Outcome of the most recent fallible call on this thread.
 */
typedef enum IwStatus {
  /**
   * No failure recorded.
   */
  IW_STATUS_OK = 0,
  /**
   * A required pointer argument was null.
   */
  IW_STATUS_NULL_ARGUMENT = 1,
  /**
   * Input failed to parse or validate.
   */
  IW_STATUS_INVALID_INPUT = 2,
  /**
   * An enumeration outgrew its element cap.
   */
  IW_STATUS_CAP_EXCEEDED = 3,
  /**
   * The requested parabolic subgroup is infinite.
   */
  IW_STATUS_INFINITE_SUBGROUP = 4,
} IwStatus;

/**
 * An element of an IwGroup. Elements remember which group made them;
 * using one with a different group fails cleanly.
 */
typedef struct IwElement IwElement;

/**
 * An extended affine Weyl group with a fixed lattice datum.
 */
typedef struct IwGroup IwGroup;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Status of the most recent failed call on this thread, `IW_STATUS_OK`
 * if nothing has failed yet.
 */
enum IwStatus iw_last_error_status(void);

/**
 * Message of the most recent failed call on this thread. The pointer
 * stays valid until the next failure on the same thread; do not free it.
 */
const char *iw_last_error_message(void);

/**
 * Frees a string returned by one of the `*_json` functions. Null is
 * ignored.
 *
 * # Safety
 * `s` must have been returned by this library and not freed before.
 */
void iw_string_free(char *s);

/**
 * Builds the group for a Cartan type ("A2", "g2", ...) and a lattice
 * preset ("coroot" or "coweight"; null means coroot). Returns null on
 * invalid input.
 *
 * # Safety
 * `cartan_type` (and `lattice`, when non-null) must point to
 * NUL-terminated strings.
 */
struct IwGroup *iw_group_new(const char *cartan_type, const char *lattice);

/**
 * Builds a group from the same JSON document the command line accepts,
 * e.g. {"cartan_type": "A1", "lattice": {"basis": [[1]], "torsion": [2]}}.
 *
 * # Safety
 * `json` must point to a NUL-terminated string.
 */
struct IwGroup *iw_group_from_json(const char *json);

/**
 * Frees a group. Elements made from it stay valid for `iw_element_free`
 * but must not be used with other groups. Null is ignored.
 *
 * # Safety
 * `group` must have come from a group constructor and not be freed twice.
 */
void iw_group_free(struct IwGroup *group);

/**
 * Rank of the underlying finite root system, 0 on a null group.
 *
 * # Safety
 * `group` must be null or a live group pointer.
 */
uint32_t iw_group_rank(const struct IwGroup *group);

/**
 * Invariants of the group as a JSON object (type, Weyl group order,
 * component group order, invariant factors, torsion orders). Free with
 * `iw_string_free`.
 *
 * # Safety
 * `group` must be null or a live group pointer.
 */
char *iw_group_info_json(const struct IwGroup *group);

/**
 * The identity element.
 *
 * # Safety
 * `group` must be null or a live group pointer.
 */
struct IwElement *iw_element_identity(const struct IwGroup *group);

/**
 * Parses the element syntax used by the command line, e.g.
 * "t=1,0 w=1,2 tor=0"; any part may be omitted.
 *
 * # Safety
 * `group` and `spec` must be valid for the call.
 */
struct IwElement *iw_element_parse(const struct IwGroup *group, const char *spec);

/**
 * The affine simple reflection `s_index`, 0 being the affine node.
 *
 * # Safety
 * `group` must be null or a live group pointer.
 */
struct IwElement *iw_element_simple(const struct IwGroup *group, uint32_t index);

/**
 * The translation by a lattice vector given in lattice coordinates.
 * `coords` must hold `len` entries and `len` must equal the rank.
 *
 * # Safety
 * `coords` must point to `len` readable values (null only when `len` is 0).
 */
struct IwElement *iw_element_translation(const struct IwGroup *group,
                                         const int64_t *coords,
                                         size_t len);

/**
 * The product `a * b`.
 *
 * # Safety
 * All pointers must be null or live pointers from this library.
 */
struct IwElement *iw_element_mul(const struct IwGroup *group,
                                 const struct IwElement *a,
                                 const struct IwElement *b);

/**
 * The inverse of `x`.
 *
 * # Safety
 * All pointers must be null or live pointers from this library.
 */
struct IwElement *iw_element_inverse(const struct IwGroup *group, const struct IwElement *x);

/**
 * 1 if the elements are equal, 0 if not, -1 on a null argument.
 *
 * # Safety
 * All pointers must be null or live pointers from this library.
 */
int32_t iw_element_eq(const struct IwElement *a, const struct IwElement *b);

/**
 * The word length of `x`, -1 on error.
 *
 * # Safety
 * All pointers must be null or live pointers from this library.
 */
int64_t iw_element_length(const struct IwGroup *group, const struct IwElement *x);

/**
 * Canonical reduced word of `x` as a JSON object
 * {"word": [...], "omega": k, "length": n}. Free with `iw_string_free`.
 *
 * # Safety
 * All pointers must be null or live pointers from this library.
 */
char *iw_element_reduced_word_json(const struct IwGroup *group, const struct IwElement *x);

/**
 * Component class of `x` as a JSON object {"free": [...], "torsion": [...]}.
 * Free with `iw_string_free`.
 *
 * # Safety
 * All pointers must be null or live pointers from this library.
 */
char *iw_element_kottwitz_json(const struct IwGroup *group, const struct IwElement *x);

/**
 * Frees an element. Null is ignored.
 *
 * # Safety
 * `x` must have come from this library and not be freed twice.
 */
void iw_element_free(struct IwElement *x);

/**
 * 1 if `x <= y` in Bruhat order, 0 if not, -1 on error.
 *
 * # Safety
 * All pointers must be null or live pointers from this library.
 */
int32_t iw_bruhat_leq(const struct IwGroup *group,
                      const struct IwElement *x,
                      const struct IwElement *y);

/**
 * All elements with length at most `max_len`, as a JSON array with the
 * same per-element fields as the command line. A `cap` of 0 uses the
 * default element cap. Free with `iw_string_free`.
 *
 * # Safety
 * `group` must be null or a live group pointer.
 */
char *iw_enumerate_json(const struct IwGroup *group, uint64_t max_len, size_t cap);

/**
 * Double cosets for the parabolic pair given by affine node indices, as
 * a JSON array with the same fields as the command line. Null generator
 * pointers are allowed only with length 0 and mean the empty set. A
 * `cap` of 0 uses the default element cap. Free with `iw_string_free`.
 *
 * # Safety
 * `left`/`right` must point to `left_len`/`right_len` readable values.
 */
char *iw_dcosets_json(const struct IwGroup *group,
                      const uint32_t *left,
                      size_t left_len,
                      const uint32_t *right,
                      size_t right_len,
                      uint64_t max_len,
                      size_t cap);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* IWAHORI_H */
