#ifndef NEURODETECT_H
#define NEURODETECT_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(__GNUC__)
#define ND_API __attribute__((visibility("default")))
#else
#define ND_API
#endif

typedef enum nd_status {
    ND_OK = 0,
    ND_ERR_INVALID_ARGUMENT = 1,
    ND_ERR_DIMENSION = 2,
    ND_ERR_QUANTIZATION_OVERFLOW = 3,
    ND_ERR_IO = 4,
    ND_ERR_PARSE = 5,
    ND_ERR_CORRUPT = 6,
    ND_ERR_CONFIG = 7,
    ND_ERR_NUMERIC = 8,
    ND_ERR_PLACEMENT = 9,
    ND_ERR_UNSUPPORTED = 10,
    ND_ERR_INTERNAL = 11
} nd_status;

/* Message for the most recent failure on the calling thread ("" if none). */
ND_API const char* nd_last_error(void);
ND_API const char* nd_status_name(nd_status status);
ND_API const char* nd_version(void);

/* ---- recordings ---- */

typedef struct nd_recording nd_recording;

/* Accepts the base path or the .hdr path. */
ND_API nd_status nd_recording_load(const char* path, nd_recording** out);
ND_API nd_status nd_recording_save(const nd_recording* rec, const char* base_path);
ND_API void nd_recording_free(nd_recording* rec);
ND_API size_t nd_recording_length(const nd_recording* rec);
ND_API double nd_recording_fs(const nd_recording* rec);
ND_API double nd_recording_full_scale(const nd_recording* rec);
/* Samples in microvolts; valid until the recording is freed. */
ND_API const float* nd_recording_samples(const nd_recording* rec);
ND_API size_t nd_recording_event_count(const nd_recording* rec);
ND_API nd_status nd_recording_event(const nd_recording* rec, size_t index, double* start_s, double* end_s);

/* ---- streaming classifiers ---- */

typedef struct nd_classifier nd_classifier;

typedef struct nd_output {
    double score;
    int label;
    double response;
} nd_output;

typedef struct nd_filter_params {
    double low_hz;
    double high_hz;
    double fs_hz;
    int order;
    int frac_bits;
    int decay_samples;
    double threshold; /* envelope threshold, full-scale units */
    int fixed_point;  /* nonzero: Q15 samples, Q2.13 coefficients */
} nd_filter_params;

/* 8-22 Hz, 256 Hz, order 4, 13 fractional bits, decay 32, threshold 0, fixed point. */
ND_API nd_filter_params nd_filter_defaults(void);
ND_API nd_status nd_classifier_create_filter(const nd_filter_params* params, nd_classifier** out);

/* consensus_rule: NULL for standalone, or "mean", "majority", "unanimity". */
ND_API nd_status nd_classifier_load_model(const char* model_path, const char* consensus_rule, double threshold,
                                          nd_classifier** out);

/* x is one sample in full-scale units ([-1, 1]). */
ND_API nd_status nd_classifier_step(nd_classifier* c, double x, nd_output* out);
ND_API nd_status nd_classifier_reset(nd_classifier* c);
ND_API const char* nd_classifier_name(const nd_classifier* c);
ND_API void nd_classifier_free(nd_classifier* c);

/* ---- experiments ---- */

typedef struct nd_experiment nd_experiment;

/* A built-in name ("demo", "full") or an INI config path. */
ND_API nd_status nd_experiment_load(const char* config, nd_experiment** out);
ND_API nd_status nd_experiment_set_seed(nd_experiment* e, uint64_t seed);
ND_API nd_status nd_experiment_set_output_dir(nd_experiment* e, const char* dir);
ND_API nd_status nd_experiment_set_classifier(nd_experiment* e, const char* name);
/* gen | train | eval | sweep | freqmap | resources | compare. */
ND_API nd_status nd_experiment_run(nd_experiment* e, const char* command);
/* Artifacts and warnings of the last successful run; strings live until the next run or free. */
ND_API size_t nd_experiment_artifact_count(const nd_experiment* e);
ND_API const char* nd_experiment_artifact(const nd_experiment* e, size_t index);
ND_API size_t nd_experiment_warning_count(const nd_experiment* e);
ND_API const char* nd_experiment_warning(const nd_experiment* e, size_t index);
/* Resolved configuration as INI text. */
ND_API const char* nd_experiment_config_text(nd_experiment* e);
ND_API void nd_experiment_free(nd_experiment* e);

#ifdef __cplusplus
}
#endif

#endif
