#ifndef MIDAS_MIDAS_H
#define MIDAS_MIDAS_H

/* C interface to the midas structural-monitoring library. All functions are
 * thread-compatible: handles must not be shared across threads without
 * external locking, and the error message is thread-local. */

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum midas_status {
  MIDAS_OK = 0,
  MIDAS_E_INVALID_ARGUMENT = 1,
  MIDAS_E_CONFIG = 2,
  MIDAS_E_IO = 3,
  MIDAS_E_INSUFFICIENT_DATA = 4,
  MIDAS_E_MISALIGNED_STREAMS = 5,
  MIDAS_E_DEGENERATE_THRESHOLDS = 6,
  MIDAS_E_NO_EVENTS = 7,
  MIDAS_E_FIT_DIVERGED = 8,
  MIDAS_E_ZERO_RESPONSE_SENSOR = 9,
  MIDAS_E_TRAINING_DIVERGED = 10,
  MIDAS_E_CORRUPT_MODEL = 11,
  MIDAS_E_INSUFFICIENT_REFERENCE = 12,
  MIDAS_E_CANNOT_BALANCE = 13,
  MIDAS_E_DEGENERATE_REFERENCE = 14,
  MIDAS_E_NO_SIGNAL = 15,
  MIDAS_E_INTERNAL = 16
} midas_status;

typedef struct midas_config midas_config; /* opaque run configuration */
typedef struct midas_model midas_model;   /* opaque trained model */

const char* midas_version(void);

/* Message from the calling thread's most recent failure; empty after
 * a success. The pointer stays valid until the thread's next call. */
const char* midas_last_error(void);

const char* midas_status_name(midas_status status);

/* Nonzero for bad-input failures (callers conventionally exit 1);
 * zero for runtime failures (exit 2) and for MIDAS_OK. */
int midas_status_is_validation_error(midas_status status);

/* Fresh configuration with built-in defaults. Never fails. */
midas_config* midas_config_create(void);

/* Parses an INI-style file; *out is set only on MIDAS_OK. */
midas_status midas_config_load(const char* path, midas_config** out);

/* Overrides one "section.key" entry, e.g. ("run.seed", "7"). */
midas_status midas_config_set(midas_config* cfg, const char* key, const char* value);

midas_status midas_config_validate(const midas_config* cfg);

void midas_config_free(midas_config* cfg);

/* Pipeline stages. Each validates the configuration, then reads and writes
 * the files named by its [paths] section. */
midas_status midas_run_simulate(const midas_config* cfg);
midas_status midas_run_compress(const midas_config* cfg);
midas_status midas_run_window(const midas_config* cfg);
midas_status midas_run_train(const midas_config* cfg);
midas_status midas_run_detect(const midas_config* cfg);
midas_status midas_run_localize(const midas_config* cfg);
midas_status midas_run_evaluate(const midas_config* cfg);
midas_status midas_run_pipeline(const midas_config* cfg);
midas_status midas_run_baseline_spirit(const midas_config* cfg);

/* Trained autoencoder models. */
midas_status midas_model_load(const char* path, midas_model** out);

void midas_model_free(midas_model* model);

/* Any output pointer may be NULL. channels is the width of one input row
 * (two per sensor); window_len the number of rows per window. */
midas_status midas_model_info(const midas_model* model, size_t* n_sensors,
                              size_t* channels, size_t* window_len, double* gamma);

/* Runs normalized rows through the network. input and output both hold
 * n_rows x channels doubles, row-major; in-place operation is allowed. */
midas_status midas_model_forward(const midas_model* model, const double* input,
                                 size_t n_rows, double* output);

#ifdef __cplusplus
}
#endif

#endif /* MIDAS_MIDAS_H */
