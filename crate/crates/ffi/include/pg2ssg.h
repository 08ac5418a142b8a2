/* C interface to the pg2ssg game solvers and reductions. */

#ifndef PG2SSG_H
#define PG2SSG_H

/* Generated by cbindgen; edit src/lib.rs instead. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result of every fallible call.
 */
typedef enum Pg2SsgStatus {
  PG2_SSG_STATUS_OK = 0,
  PG2_SSG_STATUS_NULL_ARGUMENT = 1,
  PG2_SSG_STATUS_INVALID_UTF8 = 2,
  PG2_SSG_STATUS_PARSE_ERROR = 3,
  PG2_SSG_STATUS_INVALID_GAME = 4,
  PG2_SSG_STATUS_UNSUPPORTED = 5,
  PG2_SSG_STATUS_INTERNAL_ERROR = 6,
} Pg2SsgStatus;

/**
 * Opaque simple stochastic game handle.
 */
typedef struct Pg2SsgGameHandle Pg2SsgGameHandle;

/**
 * Opaque parity game handle.
 */
typedef struct Pg2SsgParityHandle Pg2SsgParityHandle;

/**
 * Opaque vector of exact per-vertex values.
 */
typedef struct Pg2SsgValuesHandle Pg2SsgValuesHandle;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message describing the most recent error on this thread, or NULL. The
 * pointer stays valid until the next failing call on the same thread.
 */
const char *pg2ssg_last_error_message(void);

/**
 * Releases a string returned by this library.
 *
 * # Safety
 * `s` must have been returned by a function of this library and not yet
 * freed; NULL is accepted and ignored.
 */
void pg2ssg_string_free(char *s);

/**
 * Parses a parity game document into a new handle.
 *
 * # Safety
 * `text` must be a NUL-terminated string and `out` a valid pointer.
 */
enum Pg2SsgStatus pg2ssg_parity_parse(const char *text, struct Pg2SsgParityHandle **out);

/**
 * # Safety
 * `handle` must come from `pg2ssg_parity_parse` and not be freed twice.
 */
void pg2ssg_parity_free(struct Pg2SsgParityHandle *handle);

/**
 * Number of vertices, or 0 for NULL.
 *
 * # Safety
 * `handle` must be a live parity handle or NULL.
 */
size_t pg2ssg_parity_vertex_count(const struct Pg2SsgParityHandle *handle);

/**
 * Solves the parity game; `winners` receives one byte per vertex, 0 where
 * Eve wins and 1 where Adam does.
 *
 * # Safety
 * `handle` must be live and `winners` must point at at least
 * `pg2ssg_parity_vertex_count(handle)` writable bytes.
 */
enum Pg2SsgStatus pg2ssg_parity_solve(const struct Pg2SsgParityHandle *handle, uint8_t *winners);

/**
 * Builds the direct gadget reduction of a parity game.
 *
 * # Safety
 * `handle` must be live and `out` a valid pointer.
 */
enum Pg2SsgStatus pg2ssg_reduce_direct(const struct Pg2SsgParityHandle *handle,
                                       struct Pg2SsgGameHandle **out);

/**
 * Builds the three-step reduction of a parity game.
 *
 * # Safety
 * `handle` must be live and `out` a valid pointer.
 */
enum Pg2SsgStatus pg2ssg_reduce_chain(const struct Pg2SsgParityHandle *handle,
                                      struct Pg2SsgGameHandle **out);

/**
 * Parses a simple stochastic game document.
 *
 * # Safety
 * `text` must be a NUL-terminated string and `out` a valid pointer.
 */
enum Pg2SsgStatus pg2ssg_game_parse(const char *text, struct Pg2SsgGameHandle **out);

/**
 * # Safety
 * `handle` must come from a reduce or parse call and not be freed twice.
 */
void pg2ssg_game_free(struct Pg2SsgGameHandle *handle);

/**
 * Number of vertices, or 0 for NULL.
 *
 * # Safety
 * `handle` must be a live game handle or NULL.
 */
size_t pg2ssg_game_vertex_count(const struct Pg2SsgGameHandle *handle);

/**
 * Copy of a source-game vertex inside a reduced game, or `SIZE_MAX` when
 * the game does not embed that vertex.
 *
 * # Safety
 * `handle` must be a live game handle or NULL.
 */
size_t pg2ssg_game_embedded(const struct Pg2SsgGameHandle *handle, size_t source_vertex);

/**
 * Renders the canonical document of a game into a new string.
 *
 * # Safety
 * `handle` must be live and `out` a valid pointer; release the string
 * with `pg2ssg_string_free`.
 */
enum Pg2SsgStatus pg2ssg_game_print(const struct Pg2SsgGameHandle *handle, char **out);

/**
 * Total stored size of the game in bits, or 0 on error.
 *
 * # Safety
 * `handle` must be a live game handle or NULL.
 */
uint64_t pg2ssg_game_size_bits(const struct Pg2SsgGameHandle *handle);

/**
 * Solves a stopping game exactly by strategy improvement.
 *
 * # Safety
 * `handle` must be live and `out` a valid pointer.
 */
enum Pg2SsgStatus pg2ssg_game_solve(const struct Pg2SsgGameHandle *handle,
                                    struct Pg2SsgValuesHandle **out);

/**
 * # Safety
 * `handle` must come from `pg2ssg_game_solve` and not be freed twice.
 */
void pg2ssg_values_free(struct Pg2SsgValuesHandle *handle);

/**
 * Number of values, or 0 for NULL.
 *
 * # Safety
 * `handle` must be a live values handle or NULL.
 */
size_t pg2ssg_values_len(const struct Pg2SsgValuesHandle *handle);

/**
 * The exact value of one vertex as a `num/den` string.
 *
 * # Safety
 * `handle` must be live and `out` a valid pointer; release the string
 * with `pg2ssg_string_free`.
 */
enum Pg2SsgStatus pg2ssg_values_get(const struct Pg2SsgValuesHandle *handle,
                                    size_t vertex,
                                    char **out);

/**
 * 1 if the value at `vertex` is at least one half, 0 if below, -1 on a
 * NULL handle or out-of-range vertex.
 *
 * # Safety
 * `handle` must be a live values handle or NULL.
 */
int32_t pg2ssg_values_at_least_half(const struct Pg2SsgValuesHandle *handle, size_t vertex);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* PG2SSG_H */
