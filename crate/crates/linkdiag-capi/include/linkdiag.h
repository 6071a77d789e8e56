/* C interface to the linkdiag link-diagram toolkit. */

#ifndef LINKDIAG_H
#define LINKDIAG_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Outcome of a call. Zero is success; everything else leaves a message in
 * `linkdiag_last_error_message`.
 */
typedef enum linkdiag_status {
  LINKDIAG_OK = 0,
  /**
   * Input text failed to parse or validate as a diagram.
   */
  LINKDIAG_PARSE_ERROR = 1,
  /**
   * Structurally valid input that the operation rejects.
   */
  LINKDIAG_DOMAIN_ERROR = 2,
  /**
   * A crossing or state-sum budget was exceeded.
   */
  LINKDIAG_BUDGET_ERROR = 3,
  /**
   * A required pointer argument was null.
   */
  LINKDIAG_NULL_ARGUMENT = 4,
  /**
   * A text argument was not valid UTF-8.
   */
  LINKDIAG_INVALID_UTF8 = 5,
  /**
   * The library panicked; state is unchanged but the call did nothing.
   */
  LINKDIAG_INTERNAL_PANIC = 6,
} linkdiag_status;

/**
 * A link diagram. Opaque.
 */
typedef struct linkdiag_diagram linkdiag_diagram;

/**
 * Crossing accounting from a satellite construction.
 */
typedef struct linkdiag_satellite_counts {
  uint64_t raw_crossings;
  uint64_t reduced_crossings;
  uint64_t pattern_crossings;
  uint64_t companion_crossings;
  /**
   * Crossings of the writhe-normalized companion that was doubled.
   */
  uint64_t doubled_crossings;
  /**
   * Linking number between the two parallel companion copies.
   */
  int64_t double_linking;
  uint64_t wrapping;
  uint64_t components;
  /**
   * True when the two copies bound an untwisted band (linking zero).
   */
  bool framing;
  /**
   * True when the pattern wraps at least twice.
   */
  bool reliable;
} linkdiag_satellite_counts;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static string; never freed by the caller.
 */
const char *linkdiag_version(void);

/**
 * Diagnostic for the most recent failed call on this thread, or null when
 * that call succeeded. Valid until the next linkdiag call on the thread.
 */
const char *linkdiag_last_error_message(void);

/**
 * Releases a string returned by this library. Null is ignored.
 *
 * # Safety
 * `s` must have come from a linkdiag out parameter and not been freed.
 */
void linkdiag_string_free(char *s);

/**
 * Releases a diagram handle. Null is ignored.
 *
 * # Safety
 * `d` must have come from a linkdiag out parameter and not been freed.
 */
void linkdiag_diagram_free(struct linkdiag_diagram *d);

/**
 * Parses planar diagram text like "X(1,4,2,5) X(3,6,4,1) X(5,2,6,3)".
 *
 * # Safety
 * `text` is a readable nul-terminated string; `out` is writable.
 */
enum linkdiag_status linkdiag_diagram_parse_pd(const char *text, struct linkdiag_diagram **out);

/**
 * Parses the JSON diagram form (crossing tuples plus optional checks).
 *
 * # Safety
 * `text` is a readable nul-terminated string; `out` is writable.
 */
enum linkdiag_status linkdiag_diagram_parse_json(const char *text, struct linkdiag_diagram **out);

/**
 * Number of crossings, or 0 for a null handle.
 *
 * # Safety
 * `d` is a live handle or null.
 */
uint64_t linkdiag_diagram_crossings(const struct linkdiag_diagram *d);

/**
 * Number of link components including free loops, or 0 for null.
 *
 * # Safety
 * `d` is a live handle or null.
 */
uint64_t linkdiag_diagram_components(const struct linkdiag_diagram *d);

/**
 * Number of crossing-free loop components, or 0 for null.
 *
 * # Safety
 * `d` is a live handle or null.
 */
uint64_t linkdiag_diagram_free_loops(const struct linkdiag_diagram *d);

/**
 * Sum of crossing signs, or 0 for null.
 *
 * # Safety
 * `d` is a live handle or null.
 */
int64_t linkdiag_diagram_writhe(const struct linkdiag_diagram *d);

/**
 * True when the underlying 4-valent graph is connected. Null is false.
 *
 * # Safety
 * `d` is a live handle or null.
 */
bool linkdiag_diagram_is_connected(const struct linkdiag_diagram *d);

/**
 * Writes the diagram back out as planar diagram text.
 *
 * # Safety
 * `d` is a live handle; `out` is writable.
 */
enum linkdiag_status linkdiag_diagram_pd_text(const struct linkdiag_diagram *d, char **out);

/**
 * Writes the diagram as JSON with the derived checks filled in.
 *
 * # Safety
 * `d` is a live handle; `out` is writable.
 */
enum linkdiag_status linkdiag_diagram_json_text(const struct linkdiag_diagram *d, char **out);

/**
 * Mirror image: every crossing sign flipped.
 *
 * # Safety
 * `d` is a live handle; `out` is writable.
 */
enum linkdiag_status linkdiag_diagram_mirror(const struct linkdiag_diagram *d,
                                             struct linkdiag_diagram **out);

/**
 * True when no circle meeting the diagram in two points separates
 * crossings from crossings.
 *
 * # Safety
 * `d` is a live handle; `out` is writable.
 */
enum linkdiag_status linkdiag_diagram_is_prime(const struct linkdiag_diagram *d, bool *out);

/**
 * Kauffman bracket in the variable A, e.g. "-A^-4 - A^4".
 *
 * # Safety
 * `d` is a live handle; `out` is writable.
 */
enum linkdiag_status linkdiag_bracket_text(const struct linkdiag_diagram *d, char **out);

/**
 * Jones polynomial in t, half-integer exponents spelled as t^(k/2).
 *
 * # Safety
 * `d` is a live handle; `out` is writable.
 */
enum linkdiag_status linkdiag_jones_text(const struct linkdiag_diagram *d, char **out);

/**
 * Ties the companion knot into the pattern. The pattern diagram is placed
 * in the annulus automatically; it must wrap at least twice, so two-or-more
 * component patterns work while contained patterns are rejected. Either
 * out parameter may be null when only the other is wanted.
 *
 * # Safety
 * Handles are live; non-null out parameters are writable.
 */
enum linkdiag_status linkdiag_entangle(const struct linkdiag_diagram *pattern,
                                       const struct linkdiag_diagram *companion,
                                       bool reduce,
                                       struct linkdiag_diagram **out_diagram,
                                       struct linkdiag_satellite_counts *out_counts);

/**
 * The 2-cable with a clasp: doubles the companion as drawn and joins the
 * copies into one strand, 4*cr+1 crossings. Writhe is not normalized, so
 * the framing field reports whether the input happened to have writhe 0.
 *
 * # Safety
 * `companion` is a live handle; non-null out parameters are writable.
 */
enum linkdiag_status linkdiag_cable(const struct linkdiag_diagram *companion,
                                    struct linkdiag_diagram **out_diagram,
                                    struct linkdiag_satellite_counts *out_counts);

/**
 * Minimal intersections of the diagram with a spanning arc, after the
 * automatic annulus placement.
 *
 * # Safety
 * `d` is a live handle; `out` is writable.
 */
enum linkdiag_status linkdiag_wrapping_number(const struct linkdiag_diagram *d, uint64_t *out);

/**
 * Diagram census up to `max_n` crossings in the text table format.
 * `workers` 0 means one thread per available core; counts are identical
 * for every worker count. `mirror_identified` folds mirror images together.
 *
 * # Safety
 * `out` is writable.
 */
enum linkdiag_status linkdiag_census_csk(uint64_t max_n,
                                         uint64_t workers,
                                         bool mirror_identified,
                                         char **out);

/**
 * Evaluates every built-in growth-constant comparison in exact rational
 * arithmetic and returns the report as JSON.
 *
 * # Safety
 * `out` is writable.
 */
enum linkdiag_status linkdiag_bounds_json(char **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* LINKDIAG_H */
