#ifndef AITK_H
#define AITK_H

#include <stddef.h>
#include <stdint.h>

#if defined(AITK_BUILDING)
#define AITK_API __attribute__((visibility("default")))
#else
#define AITK_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum aitk_status {
    AITK_OK = 0,
    AITK_E_INVALID_ARGUMENT = 1,
    AITK_E_PARSE = 2,
    AITK_E_COMPOSITION = 3,
    AITK_E_IO = 4,
    AITK_E_NUMERIC = 5,
    AITK_E_NOT_CONVERGED = 6,
    AITK_E_CONFIG = 7,
    AITK_E_INTERNAL = 99
} aitk_status;

/* Message for the most recent failure on the calling thread. */
AITK_API const char* aitk_last_error(void);
AITK_API const char* aitk_version(void);

typedef struct aitk_expr aitk_expr;
typedef struct aitk_model aitk_model;
typedef struct aitk_strings aitk_strings;
typedef struct aitk_report aitk_report;

/* String lists */
AITK_API size_t aitk_strings_size(const aitk_strings* list);
AITK_API const char* aitk_strings_at(const aitk_strings* list, size_t index);
AITK_API void aitk_strings_free(aitk_strings* list);

/* Reports: ordered key/value pairs plus named text documents (CSV etc.). */
AITK_API size_t aitk_report_size(const aitk_report* report);
AITK_API const char* aitk_report_key(const aitk_report* report, size_t index);
AITK_API const char* aitk_report_value(const aitk_report* report, size_t index);
/* NULL when the key is absent. */
AITK_API const char* aitk_report_get(const aitk_report* report, const char* key);
AITK_API size_t aitk_report_doc_count(const aitk_report* report);
AITK_API const char* aitk_report_doc_name(const aitk_report* report, size_t index);
AITK_API const char* aitk_report_doc_text(const aitk_report* report, size_t index);
AITK_API void aitk_report_free(aitk_report* report);

/* Topology expressions */
AITK_API aitk_status aitk_expr_parse(const char* text, aitk_expr** out);
AITK_API void aitk_expr_free(aitk_expr* expr);
/* Canonical text; snprintf-style: writes at most `capacity` bytes including
 * the terminator and stores the full length in *needed when non-NULL. */
AITK_API aitk_status aitk_expr_render(const aitk_expr* expr, char* buffer, size_t capacity, size_t* needed);
AITK_API aitk_status aitk_expr_depth(const aitk_expr* expr, int* out);
AITK_API aitk_status aitk_expr_rank(const aitk_expr* expr, const aitk_model* model, unsigned* out);
AITK_API aitk_status aitk_expr_multiply(const aitk_expr* left, const aitk_expr* right, aitk_expr** out);
AITK_API aitk_status aitk_expr_is_prime(const aitk_expr* expr, int* out);
AITK_API aitk_status aitk_expr_factor(const aitk_expr* expr, aitk_strings** out);

/* Cost models */
AITK_API aitk_status aitk_model_shipped(aitk_model** out);
AITK_API aitk_status aitk_model_load(const char* path, aitk_model** out);
AITK_API aitk_status aitk_model_parse(const char* text, aitk_model** out);
AITK_API aitk_status aitk_model_render(const aitk_model* model, aitk_strings** out);
AITK_API void aitk_model_free(aitk_model* model);

/* Enumeration. A NULL model means the shipped one. */
AITK_API aitk_status aitk_partitions(unsigned n, aitk_strings** out);
/* `partition` NULL means {depth + 1}; multi-part partitions yield groves
 * rendered with " | " between parts. */
AITK_API aitk_status aitk_enumerate(int depth, const char* partition, const aitk_model* model, aitk_strings** out);
AITK_API aitk_status aitk_count_by_rank(unsigned rank, const aitk_model* model, size_t* out);
AITK_API aitk_status aitk_total_multiplicity(int depth, const aitk_model* model, size_t* out);
/* Compares against the reference table file; the report's "acceptable" key
 * says whether the diff is empty or confined to the model's exceptions. */
AITK_API aitk_status aitk_verify_table(int table, const char* path, const aitk_model* model, int apply_exceptions,
                                       aitk_report** out);
AITK_API aitk_status aitk_situations(unsigned order, aitk_strings** out);

/* Config-driven runs. `config_text` is flat "key = value" text. When a
 * solver fails to converge the status is AITK_E_NOT_CONVERGED and *out still
 * holds a report with the best point and its residual. */
AITK_API aitk_status aitk_run_info(const char* config_text, aitk_report** out);
AITK_API aitk_status aitk_run_critical(const char* config_text, uint64_t seed, aitk_report** out);
AITK_API aitk_status aitk_run_geodesic(const char* config_text, aitk_report** out);
/* rounds < 0 keeps the configured value; family NULL keeps the configured one. */
AITK_API aitk_status aitk_simulate(const char* config_text, uint64_t seed, long long rounds, const char* family,
                                   aitk_report** out);
AITK_API aitk_status aitk_optimize(const char* config_text, uint64_t seed, const char* family, aitk_report** out);

#ifdef __cplusplus
}
#endif

#endif
