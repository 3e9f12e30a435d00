/* C interface to the pirep library.
 *
 * Representations are opaque handles. Every call returns a status; on failure
 * pirep_last_error() describes the problem (per thread, valid until the next
 * call on that thread). Strings returned through char** are heap-allocated
 * JSON documents owned by the caller and released with pirep_string_free.
 */
#ifndef PIREP_H
#define PIREP_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define PIREP_API __declspec(dllexport)
#else
#define PIREP_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef struct pirep_rep pirep_rep;

/* One code per library error kind, plus argument and internal failures. */
typedef enum pirep_status {
    PIREP_OK = 0,
    PIREP_E_DIMENSION = 1,
    PIREP_E_DOMAIN = 2,
    PIREP_E_NUMERIC = 3,
    PIREP_E_INVALID_CORRESPONDENCE = 4,
    PIREP_E_INVALID_REPRESENTATION = 5,
    PIREP_E_INTERTWINER = 6,
    PIREP_E_COMPOSITION = 7,
    PIREP_E_PRECONDITION = 8,
    PIREP_E_RESOURCE = 9,
    PIREP_E_WINDOW = 10,
    PIREP_E_USAGE = 11,
    PIREP_E_PARSE = 12,
    PIREP_E_NULL_ARGUMENT = 13,
    PIREP_E_INTERNAL = 14
} pirep_status;

typedef struct pirep_options {
    double rank_rel;
    double eq_rel;
    double incl_abs;
    /* Largest formal dimension of E^{⊗m} ⊗ H before a resource error. */
    int64_t tensor_cap;
    /* Worker threads for verify; 0 uses every hardware thread. */
    int jobs;
} pirep_options;

/* Defaults: rank_rel 1e-10, eq_rel 1e-8, incl_abs 1e-8, tensor_cap 2^18, jobs 1. */
PIREP_API void pirep_options_init(pirep_options* options);

PIREP_API const char* pirep_version(void);
PIREP_API const char* pirep_status_string(pirep_status status);
PIREP_API const char* pirep_last_error(void);
PIREP_API void pirep_string_free(char* s);

/* Options may be NULL for the defaults. */
PIREP_API pirep_status pirep_rep_from_json(const char* json, const pirep_options* options, pirep_rep** out);
/* A named fixture (see `pirep fixture --help`), drawn from the given seed. */
PIREP_API pirep_status pirep_rep_fixture(const char* kind, int64_t dim, uint64_t seed, const pirep_options* options,
                                         pirep_rep** out);
PIREP_API void pirep_rep_free(pirep_rep* rep);
PIREP_API pirep_status pirep_rep_to_json(const pirep_rep* rep, char** out);
PIREP_API pirep_status pirep_rep_hilbert_dim(const pirep_rep* rep, int64_t* out);

/* Classification with all six partial-isometry residuals. */
PIREP_API pirep_status pirep_classify_json(const pirep_rep* rep, char** out);
/* Product of count >= 2 factors on a shared σ: per-stage classification, the
 * pseudoinverse chain and the two-factor reports for (stage count-1, last
 * factor); all_conditions adds the four chain conditions per stage. */
PIREP_API pirep_status pirep_product_json(const pirep_rep* const* reps, size_t count, int all_conditions, char** out);
/* Power report up to n_max plus regularity, regular-power and bi-regularity. */
PIREP_API pirep_status pirep_powers_json(const pirep_rep* rep, int n_max, char** out);
/* Root criterion and kernel remark for Ṽ_k. */
PIREP_API pirep_status pirep_root_json(const pirep_rep* rep, int k, char** out);
PIREP_API pirep_status pirep_wold_json(const pirep_rep* rep, char** out);
/* spec_json as written by the shift spec serializer: {"n", "M", "B", "weights"}. */
PIREP_API pirep_status pirep_shift_json(const char* spec_json, int power, int include_rep, const pirep_options* options,
                                        char** out);
/* Runs the named statement; *passed is 1 when the run succeeded (zero
 * violations, or at least one when falsifying). */
PIREP_API pirep_status pirep_verify_json(const char* theorem, uint64_t seed, int trials, int falsify,
                                         const pirep_options* options, char** out, int* passed);
/* Newline-separated "name<TAB>statement" lines. */
PIREP_API pirep_status pirep_theorems(char** out);

#ifdef __cplusplus
}
#endif

#endif
