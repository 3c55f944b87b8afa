// Copyright 2026 The Upcall Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

/*
 * Upcall C API.
 *
 * Every function returns an upc_status. On failure a message describing the
 * last error on the calling thread is available from upc_last_error().
 * Objects are opaque and owned by the caller; release each with its
 * matching *_free function. Handles are immutable after creation and may be
 * shared between threads. Strings returned through char** are allocated by
 * the library and must be released with upc_string_free().
 */
#ifndef UPCALL_UPCALL_H_
#define UPCALL_UPCALL_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(UPCALL_BUILDING_LIBRARY)
#    define UPCALL_API __declspec(dllexport)
#  else
#    define UPCALL_API __declspec(dllimport)
#  endif
#else
#  define UPCALL_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum upc_status {
  UPC_OK = 0,
  UPC_ERR_INVALID_ARGUMENT = 1,
  UPC_ERR_IO = 2,
  UPC_ERR_NOT_WAV = 3,
  UPC_ERR_UNSUPPORTED_ENCODING = 4,
  UPC_ERR_TRUNCATED = 5,
  UPC_ERR_CLIP_TOO_SHORT = 6,
  UPC_ERR_BAND_OUT_OF_RANGE = 7,
  UPC_ERR_BAND_VIOLATION = 8,
  UPC_ERR_INSUFFICIENT_DATA = 9,
  UPC_ERR_EMPTY_TRAINING_SET = 10,
  UPC_ERR_MODEL_FORMAT = 11,
  UPC_ERR_INTERNAL = 12
} upc_status;

#define UPC_FEATURE_COUNT 11

typedef struct upc_clip upc_clip;
typedef struct upc_model upc_model;
typedef struct upc_decision upc_decision;
typedef struct upc_report upc_report;

UPCALL_API const char* upc_status_string(upc_status status);
UPCALL_API const char* upc_last_error(void);
UPCALL_API const char* upc_version(void);
UPCALL_API void upc_string_free(char* s);

/* Seed used for one clip, derived from a run seed and the clip's file name
 * (directories are ignored). */
UPCALL_API uint64_t upc_clip_seed(uint64_t run_seed, const char* path);

/* ---- audio clips ------------------------------------------------------ */

UPCALL_API upc_status upc_clip_read_wav(const char* path, upc_clip** out);
UPCALL_API upc_status upc_clip_from_samples(const double* samples, size_t count,
                                            int sample_rate_hz, upc_clip** out);
UPCALL_API upc_status upc_clip_write_wav(const upc_clip* clip, const char* path);
UPCALL_API size_t upc_clip_sample_count(const upc_clip* clip);
UPCALL_API int upc_clip_sample_rate(const upc_clip* clip);
UPCALL_API const double* upc_clip_samples(const upc_clip* clip);
UPCALL_API void upc_clip_free(upc_clip* clip);

/* ---- synthetic corpus ------------------------------------------------- */

typedef struct upc_corpus_options {
  size_t n_pos;
  size_t n_neg;
  uint64_t seed;
  double snr_min_db;
  double snr_max_db;
  int sample_rate_hz;
  double clip_len_s;
} upc_corpus_options;

UPCALL_API void upc_corpus_options_init(upc_corpus_options* options);

/* Writes WAVs and manifest.csv into out_dir; *rows receives the row count. */
UPCALL_API upc_status upc_make_corpus(const upc_corpus_options* options, const char* out_dir,
                                      size_t* rows);

/* ---- models ------------------------------------------------------------- */

typedef struct upc_train_options {
  uint64_t seed;
  size_t max_depth;
  size_t min_leaf;
  size_t n_particles;
  double alpha; /* beta = 1 - alpha */
  double discard_fraction;
  double min_path_duration_s;
} upc_train_options;

UPCALL_API void upc_train_options_init(upc_train_options* options);

/* Trains on the clips listed in a manifest CSV (paths relative to it). */
UPCALL_API upc_status upc_model_train(const char* manifest_path, const upc_train_options* options,
                                      upc_model** out, double* training_accuracy);
UPCALL_API upc_status upc_model_load(const char* path, upc_model** out);
UPCALL_API upc_status upc_model_save(const upc_model* model, const char* path);
UPCALL_API upc_status upc_model_to_json(const upc_model* model, char** out);
UPCALL_API uint64_t upc_model_seed(const upc_model* model);
UPCALL_API void upc_model_free(upc_model* model);

/* ---- detection ---------------------------------------------------------- */

typedef struct upc_candidate_info {
  int is_call;
  double confidence;
  double start_s;
  double end_s;
  double features[UPC_FEATURE_COUNT];
} upc_candidate_info;

UPCALL_API upc_status upc_detect(const upc_model* model, const upc_clip* clip, uint64_t seed,
                                 upc_decision** out);
UPCALL_API int upc_decision_is_call(const upc_decision* decision);
UPCALL_API double upc_decision_confidence(const upc_decision* decision);
UPCALL_API size_t upc_decision_candidate_count(const upc_decision* decision);
UPCALL_API upc_status upc_decision_candidate(const upc_decision* decision, size_t index,
                                             upc_candidate_info* out);
UPCALL_API void upc_decision_free(upc_decision* decision);

/* ---- evaluation --------------------------------------------------------- */

typedef struct upc_report_summary {
  size_t n_clips;
  double accuracy;
  size_t false_positives;
  size_t false_negatives;
  double fp_per_1000;
  double fn_per_1000;
} upc_report_summary;

UPCALL_API upc_status upc_evaluate(const upc_model* model, const char* manifest_path,
                                   uint64_t seed, upc_report** out);
UPCALL_API upc_status upc_report_from_counts(size_t n_clips, size_t false_positives,
                                             size_t false_negatives, upc_report** out);
UPCALL_API upc_status upc_report_summary_get(const upc_report* report, upc_report_summary* out);
UPCALL_API upc_status upc_report_text(const upc_report* report, char** out);
UPCALL_API upc_status upc_report_json(const upc_report* report, char** out);
UPCALL_API void upc_report_free(upc_report* report);

/* ---- stage inspection --------------------------------------------------- */

/* stage: "raw", "thresholded", "cleaned" or "traced".
 * format: "pgm" (ASCII P2, magnitudes scaled to 0-255, top row = highest
 * bin) or "csv" (rows = bins ascending, columns = frames). The traced stage
 * in csv form lists candidate points as frame,bin,magnitude,path_id.
 * model may be NULL, in which case default pipeline settings are used. */
UPCALL_API upc_status upc_inspect(const upc_clip* clip, const upc_model* model, const char* stage,
                                  const char* format, uint64_t seed, char** out);

#ifdef __cplusplus
}
#endif

#endif /* UPCALL_UPCALL_H_ */
