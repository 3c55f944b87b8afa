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

#include <array>
#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "upcall/config.hpp"
#include "upcall/features.hpp"

namespace upcall {

using ScoreVector = std::array<double, kFeatureCount>;

enum class Decision { kNoCall, kCall };

std::string_view to_string(Decision d);

// exp(-(x - mu)^2 / (2 sigma^2)), clamped away from zero so the result
// stays in (0, 1] even when the exponent underflows.
double gaussian_score(double x, double mu, double sigma);

struct GaussianScorer {
  ScoreVector mean{};
  ScoreVector stddev{};

  ScoreVector score(const FeatureVector& fv) const;

  friend bool operator==(const GaussianScorer&, const GaussianScorer&) = default;
};

// Sample mean and unbiased standard deviation per feature, the deviation
// floored at 1e-6 of the observed range (or of max(1, |mean|) for a
// constant feature). Errors: kInsufficientData with fewer than two rows.
GaussianScorer fit_gaussians(std::span<const FeatureVector> positives);

struct TreeParams {
  std::size_t max_depth = 8;
  std::size_t min_leaf = 5;
};

struct TrainingRow {
  ScoreVector scores{};
  bool positive = false;
};

struct Classification {
  Decision label = Decision::kNoCall;
  double confidence = 0.0;  // positive fraction of the training rows at the leaf

  friend bool operator==(const Classification&, const Classification&) = default;
};

// Binary tree over score vectors. An internal node sends a row left when
// scores[feature] <= threshold.
class DecisionTree {
 public:
  struct Node {
    int feature = -1;  // -1 marks a leaf
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    Decision label = Decision::kNoCall;
    double confidence = 0.0;

    bool is_leaf() const { return feature < 0; }
    friend bool operator==(const Node&, const Node&) = default;
  };

  DecisionTree();  // single no_call leaf

  // Greedy CART with Gini impurity. Split candidates are the observed score
  // values; ties in gain go to the lowest feature index, then the lowest
  // threshold. Errors: kEmptyTrainingSet.
  static DecisionTree train(std::span<const TrainingRow> rows, const TreeParams& params);

  // Takes ownership of a node table whose root is node 0.
  static DecisionTree from_nodes(std::vector<Node> nodes);

  Classification predict(const ScoreVector& scores) const;

  const std::vector<Node>& nodes() const { return nodes_; }
  std::size_t depth() const;

  friend bool operator==(const DecisionTree&, const DecisionTree&) = default;

 private:
  std::vector<Node> nodes_;
};

inline constexpr int kModelFormatVersion = 1;

struct DetectorModel {
  int format_version = kModelFormatVersion;
  GaussianScorer scorers;
  DecisionTree tree;
  PipelineConfig config;
};

Classification classify(const FeatureVector& fv, const DetectorModel& model);

// JSON persistence. Errors: kModelFormat on malformed input, kIoFailure.
std::string model_to_json(const DetectorModel& model);
DetectorModel model_from_json(std::string_view text);
void save_model(const DetectorModel& model, const std::filesystem::path& path);
DetectorModel load_model(const std::filesystem::path& path);

}  // namespace upcall
