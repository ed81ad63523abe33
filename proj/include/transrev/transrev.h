/* C interface to the transport reversal library. All handles are opaque;
 * every function returning tr_status leaves a message for tr_last_error()
 * on failure. Strings returned through char** must be released with
 * tr_string_free(). */
#ifndef TRANSREV_H
#define TRANSREV_H

#include <stddef.h>

#if defined(_WIN32)
#define TR_API __declspec(dllexport)
#else
#define TR_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum tr_status {
    TR_OK = 0,
    TR_ERR_INVALID_ARGUMENT = 1,
    TR_ERR_DIMENSION = 2,
    TR_ERR_NUMERICAL = 3,
    TR_ERR_CONSTANT_VECTOR = 4,
    TR_ERR_CFL = 5,
    TR_ERR_IO = 6,
    TR_ERR_UNKNOWN = 99
} tr_status;

typedef struct tr_experiment tr_experiment;
typedef struct tr_snapshot_set tr_snapshot_set;
typedef struct tr_snapshots tr_snapshots;
typedef struct tr_model tr_model;
typedef struct tr_table tr_table;

/* Thread-local message of the last failing call on this thread. */
TR_API const char* tr_last_error(void);
TR_API const char* tr_status_name(tr_status status);
TR_API void tr_string_free(char* s);

TR_API size_t tr_preset_count(void);
TR_API const char* tr_preset_name(size_t index);

/* Experiments */
TR_API tr_status tr_experiment_create(const char* preset, tr_experiment** out);
TR_API tr_status tr_experiment_from_json(const char* json_text, tr_experiment** out);
TR_API tr_status tr_experiment_set(tr_experiment* exp, const char* assignment);
TR_API tr_status tr_experiment_to_json(const tr_experiment* exp, char** out_json);
TR_API tr_status tr_experiment_output_dir(const tr_experiment* exp, char** out_dir);
TR_API void tr_experiment_destroy(tr_experiment* exp);

/* Generation */
TR_API tr_status tr_generate(const tr_experiment* exp, tr_snapshot_set** out);
TR_API size_t tr_snapshot_set_count(const tr_snapshot_set* set);
TR_API const char* tr_snapshot_set_name(const tr_snapshot_set* set, size_t index);
TR_API tr_status tr_snapshot_set_get(const tr_snapshot_set* set, size_t index, tr_snapshots** out);
TR_API void tr_snapshot_set_destroy(tr_snapshot_set* set);

/* Snapshot matrices; data is column-major (one snapshot per column). */
TR_API tr_status tr_snapshots_create(size_t n_cells, size_t n_snaps, const double* data, const double* times,
                                     tr_snapshots** out);
TR_API tr_status tr_snapshots_load(const char* path, tr_snapshots** out);
TR_API tr_status tr_snapshots_save(const tr_snapshots* s, const char* path);
TR_API tr_status tr_snapshots_dims(const tr_snapshots* s, size_t* n_cells, size_t* n_snaps);
TR_API tr_status tr_snapshots_copy_data(const tr_snapshots* s, double* out, size_t length);
TR_API tr_status tr_snapshots_copy_times(const tr_snapshots* s, double* out, size_t length);
TR_API void tr_snapshots_destroy(tr_snapshots* s);

/* Reversal models */
TR_API tr_status tr_reverse(const tr_experiment* exp, const tr_snapshots* s, tr_model** out);
TR_API tr_status tr_model_load(const char* path, tr_model** out);
TR_API tr_status tr_model_save(const tr_model* model, const char* path);
TR_API const char* tr_model_kind(const tr_model* model);
/* rank 0 keeps all modes of real and variable-speed models. */
TR_API tr_status tr_model_reconstruct(const tr_experiment* exp, const tr_model* model, size_t rank,
                                      tr_snapshots** out);
TR_API tr_status tr_model_residuals(const tr_model* model, tr_table** out);
TR_API tr_status tr_model_shifts(const tr_model* model, tr_table** out);
TR_API void tr_model_destroy(tr_model* model);

/* Analyses */
TR_API tr_status tr_compare(const tr_experiment* exp, const tr_snapshots* s, const tr_model* model,
                            tr_table** errors, tr_table** modes, size_t* rank);
TR_API tr_status tr_pod(const tr_experiment* exp, const tr_snapshots* s, tr_table** out, size_t* rank);
/* Plain truncated-SVD reconstruction at a fixed rank. */
TR_API tr_status tr_pod_reconstruct(const tr_experiment* exp, const tr_snapshots* s, size_t rank,
                                    tr_snapshots** out);
TR_API tr_status tr_sharpen(const tr_snapshots* s, const tr_model* model, tr_snapshots** sharpened,
                            tr_table** errors);

/* Tables */
TR_API size_t tr_table_rows(const tr_table* t);
TR_API size_t tr_table_cols(const tr_table* t);
TR_API const char* tr_table_column_name(const tr_table* t, size_t col);
TR_API tr_status tr_table_value(const tr_table* t, size_t row, size_t col, double* out);
TR_API tr_status tr_table_save_csv(const tr_table* t, const char* path);
TR_API void tr_table_destroy(tr_table* t);

#ifdef __cplusplus
}
#endif

#endif
