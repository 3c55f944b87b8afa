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
#include <span>
#include <vector>

#include "upcall/audio_io.hpp"
#include "upcall/classifier.hpp"
#include "upcall/config.hpp"
#include "upcall/features.hpp"
#include "upcall/path_tracer.hpp"
#include "upcall/spectrogram.hpp"

namespace upcall {

// Every intermediate stage of the detector for one clip.
struct ClipAnalysis {
  Spectrogram raw;
  double seg_threshold = 0.0;
  Spectrogram thresholded;
  Spectrogram cleaned;
  std::size_t clean_passes = 0;
  std::size_t trace_rounds = 0;
  std::vector<CandidateCall> candidates;
  std::vector<FeatureVector> features;  // parallel to candidates
};

ClipAnalysis analyze_clip(const AudioClip& clip, const PipelineConfig& config,
                          std::uint64_t seed);

struct CandidateDecision {
  CandidateCall candidate;
  FeatureVector features;
  Classification result;

  friend bool operator==(const CandidateDecision&, const CandidateDecision&) = default;
};

struct ClipDecision {
  Decision label = Decision::kNoCall;
  double confidence = 0.0;
  std::vector<CandidateDecision> candidates;

  friend bool operator==(const ClipDecision&, const ClipDecision&) = default;
};

// A clip is a call when any candidate is; its confidence is the largest
// candidate confidence, 0 without candidates.
ClipDecision decide(const DetectorModel& model, std::span<const CandidateCall> candidates,
                    std::span<const FeatureVector> features);

ClipDecision detect_clip(const AudioClip& clip, const DetectorModel& model, std::uint64_t seed);

struct TrainingExample {
  const AudioClip* clip = nullptr;  // label must be positive or negative
  std::uint64_t seed = 0;
};

struct TrainingResult {
  DetectorModel model;
  double training_accuracy = 0.0;  // clip level
  std::size_t n_rows = 0;          // candidate rows given to the tree
};

// Runs the pipeline on every clip, fits the scorers on candidates from
// positive clips, and trains the tree on all candidates labelled with their
// clip's label. Errors: kInsufficientData when a label is missing or fewer
// than two positive candidates exist.
TrainingResult train_model(std::span<const TrainingExample> examples,
                           const PipelineConfig& config, const TreeParams& tree_params);

}  // namespace upcall
