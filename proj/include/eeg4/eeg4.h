#ifndef EEG4_EEG4_H
#define EEG4_EEG4_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define EEG4_API __declspec(dllexport)
#else
#define EEG4_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Status codes double as process exit codes. */
typedef enum eeg4_status {
  EEG4_OK = 0,
  EEG4_USAGE = 2,    /* invalid configuration or arguments */
  EEG4_DATA = 3,     /* malformed input, exclusions, degenerate training data, I/O */
  EEG4_INTERNAL = 4, /* bugs, allocation failure */
} eeg4_status;

typedef enum eeg4_stage {
  EEG4_STAGE_SYNTH = 0,
  EEG4_STAGE_CLEAN = 1,
  EEG4_STAGE_CV = 2,
  EEG4_STAGE_BENCH = 3,
  EEG4_STAGE_REPORT = 4,
  EEG4_STAGE_RUN = 5,
} eeg4_stage;

typedef struct eeg4_config eeg4_config;
typedef struct eeg4_model eeg4_model;

typedef void (*eeg4_log_fn)(const char* line, void* user);

EEG4_API const char* eeg4_version(void);

/* Message of the last failed call on this thread ("" when none). */
EEG4_API const char* eeg4_last_error(void);

/* Releases strings returned by this library. */
EEG4_API void eeg4_free(char* text);

EEG4_API eeg4_config* eeg4_config_new(void);
EEG4_API void eeg4_config_free(eeg4_config* config);
/* Applies a TOML file; later calls override earlier ones key by key. */
EEG4_API eeg4_status eeg4_config_load(eeg4_config* config, const char* path);
/* "table.key" = TOML value text (bare words are strings), e.g. ("synth.subjects", "4"). */
EEG4_API eeg4_status eeg4_config_set(eeg4_config* config, const char* key, const char* value);
EEG4_API eeg4_status eeg4_config_add_input(eeg4_config* config, const char* path);
EEG4_API eeg4_status eeg4_config_set_out_dir(eeg4_config* config, const char* path);
EEG4_API eeg4_status eeg4_config_validate(const eeg4_config* config);
/* Resolved settings as JSON; free with eeg4_free. */
EEG4_API eeg4_status eeg4_config_to_json(const eeg4_config* config, char** json_out);
/* Accepted keys as "key\thelp\n" lines; free with eeg4_free. */
EEG4_API char* eeg4_config_keys(void);

/* Runs a stage into the configured output directory. On failure after the directory was created,
   partial outputs remain next to a FAILED file. */
EEG4_API eeg4_status eeg4_run_stage(const eeg4_config* config, eeg4_stage stage, eeg4_log_fn log, void* user);

/* Parses one input file with the config's format settings. Writes a JSON summary to *json_out and,
   when canonical_out is non-null, the session in canonical CSV form. */
EEG4_API eeg4_status eeg4_parse_file(const eeg4_config* config, const char* path, const char* canonical_out,
                                     char** json_out);

/* Row-major rows x 20 features (electrode-major, bands delta..gamma); labels are task indices 0..4. */
EEG4_API eeg4_status eeg4_model_fit(const eeg4_config* config, const char* algorithm, const double* features,
                                    size_t rows, size_t cols, const int32_t* labels, uint64_t seed,
                                    eeg4_model** model_out);
EEG4_API eeg4_status eeg4_model_predict(const eeg4_model* model, const double* features, size_t rows, size_t cols,
                                        int32_t* labels_out);
EEG4_API eeg4_status eeg4_model_to_json(const eeg4_model* model, char** json_out);
EEG4_API void eeg4_model_free(eeg4_model* model);

#ifdef __cplusplus
}
#endif

#endif
