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

#include "upcall/harness.hpp"

#include <cstdio>

#include <json.hpp>

#include "upcall/error.hpp"

namespace upcall {

EvalReport EvalReport::from_counts(std::size_t n_clips, std::size_t false_positives,
                                   std::size_t false_negatives) {
  if (n_clips == 0) fail(ErrorCode::kInvalidArgument, "report needs at least one clip");
  if (false_positives + false_negatives > n_clips) {
    fail(ErrorCode::kInvalidArgument, "more errors than clips");
  }
  EvalReport r;
  const auto n = static_cast<double>(n_clips);
  r.n_clips = n_clips;
  r.false_positives = false_positives;
  r.false_negatives = false_negatives;
  r.accuracy = static_cast<double>(n_clips - false_positives - false_negatives) / n;
  r.fp_per_1000 = static_cast<double>(false_positives) * 1000.0 / n;
  r.fn_per_1000 = static_cast<double>(false_negatives) * 1000.0 / n;
  return r;
}

EvalReport EvalReport::from_results(std::vector<ClipResult> rows) {
  std::size_t fp = 0;
  std::size_t fn = 0;
  for (const ClipResult& r : rows) {
    if (r.truth == Label::kUnknown) {
      fail(ErrorCode::kInvalidArgument, "clip " + r.filename + " has no label");
    }
    const bool called = r.predicted == Decision::kCall;
    if (called && r.truth == Label::kNegative) ++fp;
    if (!called && r.truth == Label::kPositive) ++fn;
  }
  EvalReport report = from_counts(rows.size(), fp, fn);
  report.rows = std::move(rows);
  return report;
}

std::string EvalReport::to_text() const {
  char buf[256];
  std::snprintf(buf, sizeof buf,
                "clips: %zu\naccuracy: %.4f\nfalse positives: %zu (%.1f per 1000)\n"
                "false negatives: %zu (%.1f per 1000)\n",
                n_clips, accuracy, false_positives, fp_per_1000, false_negatives, fn_per_1000);
  return buf;
}

std::string EvalReport::to_json() const {
  nlohmann::json j;
  j["n_clips"] = n_clips;
  j["accuracy"] = accuracy;
  j["false_positives"] = false_positives;
  j["false_negatives"] = false_negatives;
  j["fp_per_1000"] = fp_per_1000;
  j["fn_per_1000"] = fn_per_1000;
  nlohmann::json clips = nlohmann::json::array();
  for (const ClipResult& r : rows) {
    clips.push_back({{"filename", r.filename},
                     {"truth", to_string(r.truth)},
                     {"predicted", to_string(r.predicted)},
                     {"confidence", r.confidence}});
  }
  j["clips"] = std::move(clips);
  return j.dump(2) + "\n";
}

std::uint64_t clip_seed(std::uint64_t run_seed, const std::filesystem::path& file) {
  return derive_seed(run_seed, file.filename().string());
}

TrainingResult train_from_manifest(const CorpusManifest& manifest,
                                   const std::filesystem::path& base_dir,
                                   const PipelineConfig& config, const TreeParams& tree_params) {
  std::vector<AudioClip> clips;
  clips.reserve(manifest.rows.size());
  for (const ManifestRow& row : manifest.rows) {
    AudioClip clip = read_wav(base_dir / row.filename);
    clip.label = row.label;
    clips.push_back(std::move(clip));
  }
  std::vector<TrainingExample> examples;
  examples.reserve(clips.size());
  for (std::size_t i = 0; i < clips.size(); ++i) {
    examples.push_back({&clips[i], clip_seed(config.tracer.rng_seed, manifest.rows[i].filename)});
  }
  return train_model(examples, config, tree_params);
}

EvalReport evaluate(const DetectorModel& model, const CorpusManifest& manifest,
                    const std::filesystem::path& base_dir, std::uint64_t seed) {
  std::vector<ClipResult> rows;
  rows.reserve(manifest.rows.size());
  for (const ManifestRow& row : manifest.rows) {
    const AudioClip clip = read_wav(base_dir / row.filename);
    const ClipDecision d = detect_clip(clip, model, clip_seed(seed, row.filename));
    rows.push_back({row.filename, row.label, d.label, d.confidence});
  }
  return EvalReport::from_results(std::move(rows));
}

}  // namespace upcall
