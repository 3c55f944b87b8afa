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

#include "upcall/pipeline.hpp"

#include <algorithm>

#include "upcall/error.hpp"
#include "upcall/preprocess.hpp"

namespace upcall {

ClipAnalysis analyze_clip(const AudioClip& clip, const PipelineConfig& config,
                          std::uint64_t seed) {
  validate(config);
  ClipAnalysis a;
  a.raw = compute_spectrogram(clip, config.spectrogram);
  a.seg_threshold = weakest_threshold_value(a.raw, config.preprocess.discard_fraction);
  a.thresholded = threshold_weakest(a.raw, config.preprocess.discard_fraction);
  a.cleaned = weakest_neighborhood(a.thresholded, config.preprocess, &a.clean_passes);

  Rng rng(seed);
  const TraceResult traced = iterate_until_stable(a.cleaned, config.tracer, rng);
  a.trace_rounds = traced.rounds;
  const std::vector<CandidateCall> propagated = propagate_frequency(a.cleaned, traced.paths);
  a.candidates = prune(propagated, a.cleaned.time_res_s, config.tracer);
  a.features.reserve(a.candidates.size());
  for (const CandidateCall& c : a.candidates) {
    a.features.push_back(extract_features(c, a.raw, a.cleaned, a.seg_threshold));
  }
  return a;
}

ClipDecision decide(const DetectorModel& model, std::span<const CandidateCall> candidates,
                    std::span<const FeatureVector> features) {
  ClipDecision d;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    CandidateDecision c{candidates[i], features[i], classify(features[i], model)};
    if (c.result.label == Decision::kCall) d.label = Decision::kCall;
    d.confidence = std::max(d.confidence, c.result.confidence);
    d.candidates.push_back(std::move(c));
  }
  return d;
}

ClipDecision detect_clip(const AudioClip& clip, const DetectorModel& model, std::uint64_t seed) {
  const ClipAnalysis a = analyze_clip(clip, model.config, seed);
  return decide(model, a.candidates, a.features);
}

TrainingResult train_model(std::span<const TrainingExample> examples,
                           const PipelineConfig& config, const TreeParams& tree_params) {
  bool have_pos = false;
  bool have_neg = false;
  for (const TrainingExample& e : examples) {
    have_pos = have_pos || e.clip->label == Label::kPositive;
    have_neg = have_neg || e.clip->label == Label::kNegative;
    if (e.clip->label == Label::kUnknown) {
      fail(ErrorCode::kInvalidArgument, "training clips must be labelled");
    }
  }
  if (!have_pos || !have_neg) {
    fail(ErrorCode::kInsufficientData, "training needs both positive and negative clips");
  }

  struct Analysed {
    bool positive;
    std::vector<CandidateCall> candidates;
    std::vector<FeatureVector> features;
  };
  std::vector<Analysed> analysed;
  analysed.reserve(examples.size());
  std::vector<FeatureVector> positives;
  for (const TrainingExample& e : examples) {
    ClipAnalysis a = analyze_clip(*e.clip, config, e.seed);
    const bool positive = e.clip->label == Label::kPositive;
    if (positive) positives.insert(positives.end(), a.features.begin(), a.features.end());
    analysed.push_back({positive, std::move(a.candidates), std::move(a.features)});
  }

  TrainingResult result;
  result.model.config = config;
  result.model.scorers = fit_gaussians(positives);

  std::vector<TrainingRow> rows;
  for (const Analysed& a : analysed) {
    for (const FeatureVector& fv : a.features) {
      rows.push_back({result.model.scorers.score(fv), a.positive});
    }
  }
  result.n_rows = rows.size();
  result.model.tree = DecisionTree::train(rows, tree_params);

  std::size_t correct = 0;
  for (const Analysed& a : analysed) {
    const ClipDecision d = decide(result.model, a.candidates, a.features);
    if ((d.label == Decision::kCall) == a.positive) ++correct;
  }
  result.training_accuracy = static_cast<double>(correct) / static_cast<double>(analysed.size());
  return result;
}

}  // namespace upcall
