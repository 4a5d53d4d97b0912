#ifndef IGC_H
#define IGC_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result of a call.
 */
typedef enum IgcStatus {
  IGC_STATUS_OK = 0,
  IGC_STATUS_NULL_POINTER = 1,
  IGC_STATUS_INVALID_UTF8 = 2,
  IGC_STATUS_PARSE = 3,
  IGC_STATUS_VALIDATION = 4,
  IGC_STATUS_SCOPE = 5,
  IGC_STATUS_TRUNCATION = 6,
  IGC_STATUS_PARAMETER = 7,
  IGC_STATUS_NUMERIC = 8,
} IgcStatus;

/**
 * A validated automaton.
 */
typedef struct IgcAutomaton IgcAutomaton;

/**
 * An automaton compiled to a graphing.
 */
typedef struct IgcCompiled IgcCompiled;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread; owned by the library.
 */
const char *igc_last_error(void);

/**
 * Parses and validates the automaton text format.
 *
 * # Safety
 * `text_ptr` must be a NUL-terminated string and `out` valid for writing.
 */
enum IgcStatus igc_automaton_parse(const char *text_ptr, struct IgcAutomaton **out);

/**
 * Looks up a machine of the built-in corpus by name.
 *
 * # Safety
 * `name` must be a NUL-terminated string and `out` valid for writing.
 */
enum IgcStatus igc_automaton_from_corpus(const char *name, struct IgcAutomaton **out);

/**
 * # Safety
 * `a` must be null or a handle from this library, not yet freed.
 */
void igc_automaton_free(struct IgcAutomaton *a);

/**
 * Acceptance probability of `word` as an exact rational string `p/q`.
 * `exact` is set to false when the stack depth cut some runs.
 *
 * # Safety
 * Pointers must be valid; `a` must be a live handle.
 */
enum IgcStatus igc_accept_probability(const struct IgcAutomaton *a,
                                      const char *word,
                                      size_t stack_depth,
                                      char **out,
                                      bool *exact);

/**
 * Compiles an automaton.
 *
 * # Safety
 * `a` must be a live handle and `out` valid for writing.
 */
enum IgcStatus igc_compile(const struct IgcAutomaton *a, struct IgcCompiled **out);

/**
 * # Safety
 * `c` must be null or a handle from this library, not yet freed.
 */
void igc_compiled_free(struct IgcCompiled *c);

/**
 * Number of dialect states, or 0 for a null handle.
 *
 * # Safety
 * `c` must be null or a live handle.
 */
uint64_t igc_compiled_dialect_size(const struct IgcCompiled *c);

/**
 * Mass of the accepting cycles of the compiled machine against `word`.
 *
 * # Safety
 * Pointers must be valid; `c` must be a live handle.
 */
enum IgcStatus igc_path_sum(const struct IgcCompiled *c,
                            const char *word,
                            size_t stack_depth,
                            char **out,
                            bool *exact);

/**
 * Membership of `word` through orthogonality to `test` (`neg`, `pos`, `prob:<eps>`).
 *
 * # Safety
 * Pointers must be valid; `c` must be a live handle.
 */
enum IgcStatus igc_membership(const struct IgcCompiled *c,
                              const char *word,
                              const char *test,
                              bool *out);

/**
 * Releases a string returned by this library.
 *
 * # Safety
 * `s` must be null or a string from this library, not yet freed.
 */
void igc_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* IGC_H */
