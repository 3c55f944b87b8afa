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

#include "upcall/upcall.h"

#include <cstdlib>
#include <cstring>
#include <exception>
#include <filesystem>
#include <new>
#include <string>

#include "upcall/audio_io.hpp"
#include "upcall/classifier.hpp"
#include "upcall/error.hpp"
#include "upcall/harness.hpp"
#include "upcall/inspect.hpp"
#include "upcall/pipeline.hpp"
#include "upcall/synth.hpp"

struct upc_clip {
  upcall::AudioClip clip;
};

struct upc_model {
  upcall::DetectorModel model;
};

struct upc_decision {
  upcall::ClipDecision decision;
  double time_res_s = 0.0;
};

struct upc_report {
  upcall::EvalReport report;
};

namespace {

thread_local std::string g_last_error;

upc_status to_status(upcall::ErrorCode code) {
  using upcall::ErrorCode;
  switch (code) {
    case ErrorCode::kInvalidArgument: return UPC_ERR_INVALID_ARGUMENT;
    case ErrorCode::kIoFailure: return UPC_ERR_IO;
    case ErrorCode::kNotWav: return UPC_ERR_NOT_WAV;
    case ErrorCode::kUnsupportedEncoding: return UPC_ERR_UNSUPPORTED_ENCODING;
    case ErrorCode::kTruncated: return UPC_ERR_TRUNCATED;
    case ErrorCode::kClipTooShort: return UPC_ERR_CLIP_TOO_SHORT;
    case ErrorCode::kEmptyCandidates: return UPC_ERR_INTERNAL;
    case ErrorCode::kBandOutOfRange: return UPC_ERR_BAND_OUT_OF_RANGE;
    case ErrorCode::kBandViolation: return UPC_ERR_BAND_VIOLATION;
    case ErrorCode::kInsufficientData: return UPC_ERR_INSUFFICIENT_DATA;
    case ErrorCode::kEmptyTrainingSet: return UPC_ERR_EMPTY_TRAINING_SET;
    case ErrorCode::kModelFormat: return UPC_ERR_MODEL_FORMAT;
  }
  return UPC_ERR_INTERNAL;
}

// Runs `body`, translating exceptions into status codes.
template <typename F>
upc_status guarded(F&& body) {
  try {
    g_last_error.clear();
    body();
    return UPC_OK;
  } catch (const upcall::Error& e) {
    g_last_error = e.what();
    return to_status(e.code());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return UPC_ERR_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return UPC_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown error";
    return UPC_ERR_INTERNAL;
  }
}

void require(bool ok, const char* what) {
  if (!ok) upcall::fail(upcall::ErrorCode::kInvalidArgument, what);
}

char* duplicate(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

upcall::PipelineConfig default_config() { return {}; }

}  // namespace

extern "C" {

const char* upc_status_string(upc_status status) {
  switch (status) {
    case UPC_OK: return "ok";
    case UPC_ERR_INVALID_ARGUMENT: return "invalid argument";
    case UPC_ERR_IO: return "i/o failure";
    case UPC_ERR_NOT_WAV: return "not a WAV file";
    case UPC_ERR_UNSUPPORTED_ENCODING: return "unsupported WAV encoding";
    case UPC_ERR_TRUNCATED: return "truncated WAV file";
    case UPC_ERR_CLIP_TOO_SHORT: return "clip too short";
    case UPC_ERR_BAND_OUT_OF_RANGE: return "spectrogram does not cover the call band";
    case UPC_ERR_BAND_VIOLATION: return "call parameters outside the allowed band";
    case UPC_ERR_INSUFFICIENT_DATA: return "insufficient training data";
    case UPC_ERR_EMPTY_TRAINING_SET: return "empty training set";
    case UPC_ERR_MODEL_FORMAT: return "invalid model";
    case UPC_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

const char* upc_last_error(void) { return g_last_error.c_str(); }

const char* upc_version(void) { return "0.1.0"; }

void upc_string_free(char* s) { std::free(s); }

uint64_t upc_clip_seed(uint64_t run_seed, const char* path) {
  return upcall::clip_seed(run_seed, path != nullptr ? path : "");
}

upc_status upc_clip_read_wav(const char* path, upc_clip** out) {
  return guarded([&] {
    require(path != nullptr && out != nullptr, "null argument");
    *out = new upc_clip{upcall::read_wav(path)};
  });
}

upc_status upc_clip_from_samples(const double* samples, size_t count, int sample_rate_hz,
                                 upc_clip** out) {
  return guarded([&] {
    require(out != nullptr && (samples != nullptr || count == 0), "null argument");
    upcall::AudioClip clip;
    clip.sample_rate_hz = sample_rate_hz;
    clip.samples.assign(samples, samples + count);
    upcall::validate(clip);
    *out = new upc_clip{std::move(clip)};
  });
}

upc_status upc_clip_write_wav(const upc_clip* clip, const char* path) {
  return guarded([&] {
    require(clip != nullptr && path != nullptr, "null argument");
    upcall::write_wav(clip->clip, path);
  });
}

size_t upc_clip_sample_count(const upc_clip* clip) {
  return clip != nullptr ? clip->clip.samples.size() : 0;
}

int upc_clip_sample_rate(const upc_clip* clip) {
  return clip != nullptr ? clip->clip.sample_rate_hz : 0;
}

const double* upc_clip_samples(const upc_clip* clip) {
  return clip != nullptr ? clip->clip.samples.data() : nullptr;
}

void upc_clip_free(upc_clip* clip) { delete clip; }

void upc_corpus_options_init(upc_corpus_options* options) {
  if (options == nullptr) return;
  const upcall::CorpusOptions d;
  *options = {d.n_pos, d.n_neg, d.seed, d.snr_min_db, d.snr_max_db, d.sample_rate_hz, d.clip_len_s};
}

upc_status upc_make_corpus(const upc_corpus_options* options, const char* out_dir, size_t* rows) {
  return guarded([&] {
    require(options != nullptr && out_dir != nullptr, "null argument");
    upcall::CorpusOptions o;
    o.n_pos = options->n_pos;
    o.n_neg = options->n_neg;
    o.seed = options->seed;
    o.snr_min_db = options->snr_min_db;
    o.snr_max_db = options->snr_max_db;
    o.sample_rate_hz = options->sample_rate_hz;
    o.clip_len_s = options->clip_len_s;
    const upcall::CorpusManifest m = upcall::make_corpus(o, out_dir);
    if (rows != nullptr) *rows = m.rows.size();
  });
}

void upc_train_options_init(upc_train_options* options) {
  if (options == nullptr) return;
  const upcall::PipelineConfig c = default_config();
  const upcall::TreeParams t;
  *options = {c.tracer.rng_seed, t.max_depth, t.min_leaf, c.tracer.n_particles, c.tracer.alpha,
              c.preprocess.discard_fraction, c.tracer.min_path_duration_s};
}

upc_status upc_model_train(const char* manifest_path, const upc_train_options* options,
                           upc_model** out, double* training_accuracy) {
  return guarded([&] {
    require(manifest_path != nullptr && options != nullptr && out != nullptr, "null argument");
    upcall::PipelineConfig config = default_config();
    config.tracer.rng_seed = options->seed;
    config.tracer.n_particles = options->n_particles;
    config.tracer.alpha = options->alpha;
    config.tracer.beta = 1.0 - options->alpha;
    config.tracer.min_path_duration_s = options->min_path_duration_s;
    config.preprocess.discard_fraction = options->discard_fraction;
    upcall::validate(config);
    const upcall::TreeParams tree{options->max_depth, options->min_leaf};

    const std::filesystem::path manifest(manifest_path);
    const upcall::CorpusManifest m = upcall::read_manifest(manifest);
    upcall::TrainingResult r =
        upcall::train_from_manifest(m, manifest.parent_path(), config, tree);
    if (training_accuracy != nullptr) *training_accuracy = r.training_accuracy;
    *out = new upc_model{std::move(r.model)};
  });
}

upc_status upc_model_load(const char* path, upc_model** out) {
  return guarded([&] {
    require(path != nullptr && out != nullptr, "null argument");
    *out = new upc_model{upcall::load_model(path)};
  });
}

upc_status upc_model_save(const upc_model* model, const char* path) {
  return guarded([&] {
    require(model != nullptr && path != nullptr, "null argument");
    upcall::save_model(model->model, path);
  });
}

upc_status upc_model_to_json(const upc_model* model, char** out) {
  return guarded([&] {
    require(model != nullptr && out != nullptr, "null argument");
    *out = duplicate(upcall::model_to_json(model->model));
  });
}

uint64_t upc_model_seed(const upc_model* model) {
  return model != nullptr ? model->model.config.tracer.rng_seed : 0;
}

void upc_model_free(upc_model* model) { delete model; }

upc_status upc_detect(const upc_model* model, const upc_clip* clip, uint64_t seed,
                      upc_decision** out) {
  return guarded([&] {
    require(model != nullptr && clip != nullptr && out != nullptr, "null argument");
    auto* d = new upc_decision{upcall::detect_clip(clip->clip, model->model, seed)};
    d->time_res_s = static_cast<double>(model->model.config.spectrogram.hop) /
                    clip->clip.sample_rate_hz;
    *out = d;
  });
}

int upc_decision_is_call(const upc_decision* decision) {
  return decision != nullptr && decision->decision.label == upcall::Decision::kCall;
}

double upc_decision_confidence(const upc_decision* decision) {
  return decision != nullptr ? decision->decision.confidence : 0.0;
}

size_t upc_decision_candidate_count(const upc_decision* decision) {
  return decision != nullptr ? decision->decision.candidates.size() : 0;
}

upc_status upc_decision_candidate(const upc_decision* decision, size_t index,
                                  upc_candidate_info* out) {
  return guarded([&] {
    require(decision != nullptr && out != nullptr, "null argument");
    require(index < decision->decision.candidates.size(), "candidate index out of range");
    const upcall::CandidateDecision& c = decision->decision.candidates[index];
    out->is_call = c.result.label == upcall::Decision::kCall;
    out->confidence = c.result.confidence;
    out->start_s = c.candidate.path.first_frame() * decision->time_res_s;
    out->end_s = c.candidate.path.last_frame() * decision->time_res_s;
    for (std::size_t k = 0; k < upcall::kFeatureCount; ++k) out->features[k] = c.features[k];
  });
}

void upc_decision_free(upc_decision* decision) { delete decision; }

upc_status upc_evaluate(const upc_model* model, const char* manifest_path, uint64_t seed,
                        upc_report** out) {
  return guarded([&] {
    require(model != nullptr && manifest_path != nullptr && out != nullptr, "null argument");
    const std::filesystem::path manifest(manifest_path);
    const upcall::CorpusManifest m = upcall::read_manifest(manifest);
    *out = new upc_report{upcall::evaluate(model->model, m, manifest.parent_path(), seed)};
  });
}

upc_status upc_report_from_counts(size_t n_clips, size_t false_positives, size_t false_negatives,
                                  upc_report** out) {
  return guarded([&] {
    require(out != nullptr, "null argument");
    *out = new upc_report{upcall::EvalReport::from_counts(n_clips, false_positives, false_negatives)};
  });
}

upc_status upc_report_summary_get(const upc_report* report, upc_report_summary* out) {
  return guarded([&] {
    require(report != nullptr && out != nullptr, "null argument");
    const upcall::EvalReport& r = report->report;
    *out = {r.n_clips, r.accuracy, r.false_positives, r.false_negatives, r.fp_per_1000,
            r.fn_per_1000};
  });
}

upc_status upc_report_text(const upc_report* report, char** out) {
  return guarded([&] {
    require(report != nullptr && out != nullptr, "null argument");
    *out = duplicate(report->report.to_text());
  });
}

upc_status upc_report_json(const upc_report* report, char** out) {
  return guarded([&] {
    require(report != nullptr && out != nullptr, "null argument");
    *out = duplicate(report->report.to_json());
  });
}

void upc_report_free(upc_report* report) { delete report; }

upc_status upc_inspect(const upc_clip* clip, const upc_model* model, const char* stage,
                       const char* format, uint64_t seed, char** out) {
  return guarded([&] {
    require(clip != nullptr && stage != nullptr && format != nullptr && out != nullptr,
            "null argument");
    const upcall::Stage s = upcall::parse_stage(stage);
    const upcall::DumpFormat f = upcall::parse_dump_format(format);
    const upcall::PipelineConfig config = model != nullptr ? model->model.config : default_config();
    const upcall::ClipAnalysis a = upcall::analyze_clip(clip->clip, config, seed);
    *out = duplicate(upcall::render_stage(a, s, f));
  });
}

}  // extern "C"
