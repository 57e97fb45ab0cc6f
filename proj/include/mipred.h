/* mipred — learned reduction heuristics for mixed-integer programs.
 *
 * C interface to the pipeline: generate and label instance datasets, tune and
 * train the classifiers, evaluate them, and solve instances through the
 * prediction-reduced model. Every fallible call returns MIPRED_OK or an error
 * code; the message for the calling thread's most recent failure is available
 * via mipred_last_error().
 */
#ifndef MIPRED_H
#define MIPRED_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

#ifndef MIPRED_API
#define MIPRED_API __attribute__((visibility("default")))
#endif

/* Error codes. */
enum {
    MIPRED_OK = 0,
    MIPRED_ERR_INVALID_ARGUMENT = 1, /* bad handle, key, value, or buffer */
    MIPRED_ERR_RUNTIME = 2           /* I/O, parse, solver, or training failure */
};

/* Library version, e.g. "0.1.0". Static storage; do not free. */
MIPRED_API const char* mipred_version(void);

/* Message of the calling thread's most recent failure ("" when none).
 * Valid until the thread's next mipred call; do not free. */
MIPRED_API const char* mipred_last_error(void);

/* Run configuration: a flat set of dotted keys (paths.*, gen.*, split.*,
 * train.*, tune.*, solver.*, solve.*, evaluate.*, seed, threads) with
 * documented defaults. Values are passed and returned as text. */
typedef struct mipred_config mipred_config;

/* Creates a configuration with default values. */
MIPRED_API int mipred_config_create(mipred_config** out);

/* Loads `key = value` lines ('#' starts a comment). Unknown keys fail. */
MIPRED_API int mipred_config_load(const char* path, mipred_config** out);

MIPRED_API int mipred_config_set(mipred_config* config, const char* key, const char* value);

/* Copies the value into `buffer` (NUL-terminated). Fails when the buffer is
 * too small; `buffer_size` counts the terminator. */
MIPRED_API int mipred_config_get(const mipred_config* config, const char* key, char* buffer,
                                 size_t buffer_size);

MIPRED_API int mipred_config_save(const mipred_config* config, const char* path);

MIPRED_API void mipred_config_free(mipred_config* config);

/* Commands. Each runs one batch stage to completion and writes its output
 * files to the configured paths. When `summary_out` is non-NULL it receives a
 * printable run summary to release with mipred_string_free(). All commands
 * are deterministic for a fixed configuration and seed.
 *
 *   gen_data  – generate, solve-label, split, and save the instance dataset
 *   tune      – Bayesian-optimization search over the hyperparameter box
 *   train     – train the classifier and save the model file
 *   evaluate  – metric report and confusion matrix on a dataset split
 *   solve     – predict-and-solve one demand file, or a directory of them
 */
MIPRED_API int mipred_run_gen_data(const mipred_config* config, char** summary_out);
MIPRED_API int mipred_run_tune(const mipred_config* config, char** summary_out);
MIPRED_API int mipred_run_train(const mipred_config* config, char** summary_out);
MIPRED_API int mipred_run_evaluate(const mipred_config* config, char** summary_out);
MIPRED_API int mipred_run_solve(const mipred_config* config, const char* instance_path,
                                char** summary_out);

/* Frees a string returned through a `summary_out` parameter. */
MIPRED_API void mipred_string_free(char* text);

#ifdef __cplusplus
}
#endif

#endif /* MIPRED_H */
