#ifndef PERDYN_H
#define PERDYN_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/*
 Result codes.
 */
typedef enum PerdynStatus {
  PERDYN_STATUS_OK = 0,
  PERDYN_STATUS_NULL_POINTER = 1,
  PERDYN_STATUS_INVALID_UTF8 = 2,
  PERDYN_STATUS_PARSE = 3,
  PERDYN_STATUS_BUDGET_EXCEEDED = 4,
  PERDYN_STATUS_NOT_FOUND = 5,
  PERDYN_STATUS_DOMAIN = 6,
  PERDYN_STATUS_PANIC = 7,
} PerdynStatus;

/*
 A normalized automaton group.
 */
typedef struct PerdynAutomaton PerdynAutomaton;

/*
 A rational map reduced over a finite field.
 */
typedef struct PerdynMap PerdynMap;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Message of the last failed call on this thread, or NULL. Owned by the
 library and valid until the next call on this thread.
 */
const char *perdyn_last_error_message(void);

/*
 Releases a string returned by the library. NULL is ignored.

 # Safety
 `s` must come from this library and not have been freed.
 */
void perdyn_string_free(char *s);

/*
 Library version as a static string.
 */
const char *perdyn_version(void);

/*
 Parses `expr` and reduces it over the field `field` (`GF(p)` or `GF(p^n)`).

 # Safety
 String arguments must be NUL-terminated; `out` must be writable.
 */
enum PerdynStatus perdyn_map_new(const char *expr, const char *field, struct PerdynMap **out);

/*
 # Safety
 `map` must come from `perdyn_map_new` and not have been freed. NULL is ignored.
 */
void perdyn_map_free(struct PerdynMap *map);

/*
 Number of periodic points of the map on the projective line over its field.

 # Safety
 `map` must be a live handle; output pointers must be writable.
 */
enum PerdynStatus perdyn_map_periodic_count(const struct PerdynMap *map,
                                            uint64_t *out_periodic,
                                            uint64_t *out_total);

/*
 Full classification report as JSON. Free the result with `perdyn_string_free`.

 # Safety
 `map` must be a live handle; `out_json` must be writable.
 */
enum PerdynStatus perdyn_map_classify_json(const struct PerdynMap *map, char **out_json);

/*
 Loads a bundled catalog automaton by name, or an automaton or catalog JSON file.

 # Safety
 `source` must be NUL-terminated; `out` must be writable.
 */
enum PerdynStatus perdyn_automaton_load(const char *source, struct PerdynAutomaton **out);

/*
 Builds an automaton from its JSON description.

 # Safety
 `json` must be NUL-terminated; `out` must be writable.
 */
enum PerdynStatus perdyn_automaton_from_json(const char *json, struct PerdynAutomaton **out);

/*
 # Safety
 `aut` must come from this library and not have been freed. NULL is ignored.
 */
void perdyn_automaton_free(struct PerdynAutomaton *aut);

/*
 Order of the level-`level` quotient as a decimal string.

 # Safety
 `aut` must be a live handle; `out_order` must be writable.
 */
enum PerdynStatus perdyn_automaton_level_order(const struct PerdynAutomaton *aut,
                                               size_t level,
                                               char **out_order);

/*
 Exact fixed-point proportion `num/den` of the level-`level` quotient.

 # Safety
 `aut` must be a live handle; output pointers must be writable.
 */
enum PerdynStatus perdyn_automaton_fpp(const struct PerdynAutomaton *aut,
                                       size_t level,
                                       uint64_t *out_num,
                                       uint64_t *out_den);

/*
 Classification of the ends fixed by `state` as JSON.

 # Safety
 `aut` must be a live handle; `state` NUL-terminated; `out_json` writable.
 */
enum PerdynStatus perdyn_automaton_ends_json(const struct PerdynAutomaton *aut,
                                             const char *state,
                                             char **out_json);

/*
 Runs the command-line frontend on `argv` (without the program name).
 The streams are returned in `out_stdout` and `out_stderr` (free both),
 the process exit code in `out_code`. A nonzero exit code is not a call
 failure.

 # Safety
 `argv` must hold `argc` NUL-terminated strings; output pointers writable.
 */
enum PerdynStatus perdyn_cli_run(int argc,
                                 const char *const *argv,
                                 char **out_stdout,
                                 char **out_stderr,
                                 int *out_code);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* PERDYN_H */
