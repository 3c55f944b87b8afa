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

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "upcall/classifier.hpp"
#include "upcall/pipeline.hpp"
#include "upcall/synth.hpp"

namespace upcall {

struct ClipResult {
  std::string filename;
  Label truth = Label::kUnknown;
  Decision predicted = Decision::kNoCall;
  double confidence = 0.0;
};

// Clip-level evaluation summary. accuracy = 1 - (FP + FN) / n_clips and the
// per-1000 figures are count * 1000 / n_clips.
struct EvalReport {
  std::size_t n_clips = 0;
  double accuracy = 0.0;
  std::size_t false_positives = 0;
  std::size_t false_negatives = 0;
  double fp_per_1000 = 0.0;
  double fn_per_1000 = 0.0;
  std::vector<ClipResult> rows;

  static EvalReport from_counts(std::size_t n_clips, std::size_t false_positives,
                                std::size_t false_negatives);
  static EvalReport from_results(std::vector<ClipResult> rows);

  std::string to_text() const;
  std::string to_json() const;
};

// The RNG seed used for one clip: derived from the run seed and the clip's
// file name so a clip traces identically wherever it appears.
std::uint64_t clip_seed(std::uint64_t run_seed, const std::filesystem::path& file);

// Paths in the manifest are relative to base_dir.
TrainingResult train_from_manifest(const CorpusManifest& manifest,
                                   const std::filesystem::path& base_dir,
                                   const PipelineConfig& config, const TreeParams& tree_params);

EvalReport evaluate(const DetectorModel& model, const CorpusManifest& manifest,
                    const std::filesystem::path& base_dir, std::uint64_t seed);

}  // namespace upcall
