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

#include "upcall/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iterator>
#include <limits>
#include <numeric>

#include <json.hpp>

#include "upcall/error.hpp"

namespace upcall {
namespace {

using nlohmann::json;

constexpr std::size_t kMaxTreeDepthOnLoad = 64;

double gini(std::size_t positives, std::size_t total) {
  if (total == 0) return 0.0;
  const double p = static_cast<double>(positives) / static_cast<double>(total);
  return 2.0 * p * (1.0 - p);
}

class TreeBuilder {
 public:
  TreeBuilder(std::span<const TrainingRow> rows, const TreeParams& params)
      : rows_(rows), params_(params) {}

  std::vector<DecisionTree::Node> build() {
    std::vector<std::size_t> all(rows_.size());
    std::iota(all.begin(), all.end(), 0);
    grow(all, 0);
    return std::move(nodes_);
  }

 private:
  int grow(std::vector<std::size_t>& idx, std::size_t depth) {
    const std::size_t n = idx.size();
    const std::size_t pos = positives(idx);
    const int me = static_cast<int>(nodes_.size());
    nodes_.emplace_back();
    nodes_[me].confidence = static_cast<double>(pos) / static_cast<double>(n);
    nodes_[me].label = 2 * pos > n ? Decision::kCall : Decision::kNoCall;

    if (depth >= params_.max_depth || pos == 0 || pos == n || n < 2 * params_.min_leaf) {
      return me;
    }

    const double parent = gini(pos, n);
    double best_gain = 0.0;
    int best_feature = -1;
    double best_threshold = 0.0;
    std::vector<std::size_t> order = idx;
    for (std::size_t k = 0; k < kFeatureCount; ++k) {
      std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return rows_[a].scores[k] < rows_[b].scores[k];
      });
      std::size_t left_pos = 0;
      for (std::size_t i = 0; i + 1 < n; ++i) {
        if (rows_[order[i]].positive) ++left_pos;
        const double v = rows_[order[i]].scores[k];
        if (v == rows_[order[i + 1]].scores[k]) continue;
        const std::size_t left_n = i + 1;
        const std::size_t right_n = n - left_n;
        if (left_n < params_.min_leaf || right_n < params_.min_leaf) continue;
        const double child =
            (static_cast<double>(left_n) * gini(left_pos, left_n) +
             static_cast<double>(right_n) * gini(pos - left_pos, right_n)) /
            static_cast<double>(n);
        const double gain = parent - child;
        if (gain > best_gain) {
          best_gain = gain;
          best_feature = static_cast<int>(k);
          best_threshold = v;
        }
      }
    }
    if (best_feature < 0) return me;

    std::vector<std::size_t> left;
    std::vector<std::size_t> right;
    for (std::size_t i : idx) {
      (rows_[i].scores[best_feature] <= best_threshold ? left : right).push_back(i);
    }
    nodes_[me].feature = best_feature;
    nodes_[me].threshold = best_threshold;
    const int l = grow(left, depth + 1);
    const int r = grow(right, depth + 1);
    nodes_[me].left = l;
    nodes_[me].right = r;
    return me;
  }

  std::size_t positives(const std::vector<std::size_t>& idx) const {
    return static_cast<std::size_t>(std::count_if(
        idx.begin(), idx.end(), [&](std::size_t i) { return rows_[i].positive; }));
  }

  std::span<const TrainingRow> rows_;
  TreeParams params_;
  std::vector<DecisionTree::Node> nodes_;
};

json node_to_json(const std::vector<DecisionTree::Node>& nodes, int i) {
  const DecisionTree::Node& n = nodes[i];
  if (n.is_leaf()) {
    return json{{"label", to_string(n.label)}, {"confidence", n.confidence}};
  }
  return json{{"score_index", n.feature + 1},
              {"threshold", n.threshold},
              {"label", to_string(n.label)},
              {"confidence", n.confidence},
              {"left", node_to_json(nodes, n.left)},
              {"right", node_to_json(nodes, n.right)}};
}

[[noreturn]] void bad_model(const std::string& what) {
  fail(ErrorCode::kModelFormat, "invalid model: " + what);
}

int node_from_json(const json& j, std::vector<DecisionTree::Node>& nodes, std::size_t depth) {
  if (depth > kMaxTreeDepthOnLoad) bad_model("tree too deep");
  if (!j.is_object()) bad_model("tree node must be an object");
  const int me = static_cast<int>(nodes.size());
  nodes.emplace_back();
  const double confidence = j.at("confidence").get<double>();
  if (!(confidence >= 0.0 && confidence <= 1.0)) bad_model("confidence outside [0, 1]");
  nodes[me].confidence = confidence;

  // Internal nodes carry the majority label too, but only leaves need it.
  if (j.contains("label") || !j.contains("score_index")) {
    const std::string label = j.at("label").get<std::string>();
    if (label == "call") nodes[me].label = Decision::kCall;
    else if (label == "no_call") nodes[me].label = Decision::kNoCall;
    else bad_model("unknown label '" + label + "'");
  }
  if (!j.contains("score_index")) return me;

  const int index = j.at("score_index").get<int>();
  const double threshold = j.at("threshold").get<double>();
  if (index < 1 || index > static_cast<int>(kFeatureCount)) bad_model("score_index outside 1..11");
  if (!(threshold > 0.0 && threshold <= 1.0)) bad_model("threshold outside (0, 1]");
  nodes[me].feature = index - 1;
  nodes[me].threshold = threshold;
  const int l = node_from_json(j.at("left"), nodes, depth + 1);
  const int r = node_from_json(j.at("right"), nodes, depth + 1);
  nodes[me].left = l;
  nodes[me].right = r;
  return me;
}

std::string_view window_name(Window w) { return w == Window::kHann ? "hann" : "rectangular"; }

Window parse_window(const std::string& name) {
  if (name == "hann") return Window::kHann;
  if (name == "rectangular") return Window::kRectangular;
  bad_model("unknown window '" + name + "'");
}

json config_to_json(const PipelineConfig& c) {
  return json{
      {"spectrogram",
       {{"window_len", c.spectrogram.window_len},
        {"hop", c.spectrogram.hop},
        {"window", window_name(c.spectrogram.window)},
        {"fft_len", c.spectrogram.fft_len},
        {"center", c.spectrogram.center}}},
      {"preprocess",
       {{"discard_fraction", c.preprocess.discard_fraction},
        {"max_passes", c.preprocess.max_passes}}},
      {"tracer",
       {{"n_particles", c.tracer.n_particles},
        {"alpha", c.tracer.alpha},
        {"beta", c.tracer.beta},
        {"min_path_duration_s", c.tracer.min_path_duration_s},
        {"max_steps_per_leg", c.tracer.max_steps_per_leg},
        {"max_rounds", c.tracer.max_rounds},
        {"rng_seed", c.tracer.rng_seed}}}};
}

PipelineConfig config_from_json(const json& j) {
  PipelineConfig c;
  const json& s = j.at("spectrogram");
  c.spectrogram.window_len = s.at("window_len").get<std::size_t>();
  c.spectrogram.hop = s.at("hop").get<std::size_t>();
  c.spectrogram.window = parse_window(s.at("window").get<std::string>());
  c.spectrogram.fft_len = s.at("fft_len").get<std::size_t>();
  c.spectrogram.center = s.at("center").get<bool>();
  const json& p = j.at("preprocess");
  c.preprocess.discard_fraction = p.at("discard_fraction").get<double>();
  c.preprocess.max_passes = p.at("max_passes").get<std::size_t>();
  const json& t = j.at("tracer");
  c.tracer.n_particles = t.at("n_particles").get<std::size_t>();
  c.tracer.alpha = t.at("alpha").get<double>();
  c.tracer.beta = t.at("beta").get<double>();
  c.tracer.min_path_duration_s = t.at("min_path_duration_s").get<double>();
  c.tracer.max_steps_per_leg = t.at("max_steps_per_leg").get<std::size_t>();
  c.tracer.max_rounds = t.at("max_rounds").get<std::size_t>();
  c.tracer.rng_seed = t.at("rng_seed").get<std::uint64_t>();
  return c;
}

}  // namespace

void validate(const PipelineConfig& config) {
  validate(config.spectrogram);
  validate(config.preprocess);
  validate(config.tracer);
}

std::string_view to_string(Decision d) { return d == Decision::kCall ? "call" : "no_call"; }

double gaussian_score(double x, double mu, double sigma) {
  const double z = (x - mu) / sigma;
  return std::max(std::exp(-0.5 * z * z), std::numeric_limits<double>::min());
}

ScoreVector GaussianScorer::score(const FeatureVector& fv) const {
  ScoreVector s{};
  for (std::size_t k = 0; k < kFeatureCount; ++k) s[k] = gaussian_score(fv[k], mean[k], stddev[k]);
  return s;
}

GaussianScorer fit_gaussians(std::span<const FeatureVector> positives) {
  if (positives.size() < 2) {
    fail(ErrorCode::kInsufficientData, "need at least two positive feature vectors");
  }
  const auto n = static_cast<double>(positives.size());
  GaussianScorer g;
  for (std::size_t k = 0; k < kFeatureCount; ++k) {
    double sum = 0.0;
    double lo = positives.front()[k];
    double hi = lo;
    for (const FeatureVector& fv : positives) {
      sum += fv[k];
      lo = std::min(lo, fv[k]);
      hi = std::max(hi, fv[k]);
    }
    const double mean = sum / n;
    double ss = 0.0;
    for (const FeatureVector& fv : positives) ss += (fv[k] - mean) * (fv[k] - mean);
    const double stddev = std::sqrt(ss / (n - 1.0));
    double floor = 1e-6 * (hi - lo);
    if (floor == 0.0) floor = 1e-6 * std::max(1.0, std::abs(mean));
    g.mean[k] = mean;
    g.stddev[k] = std::max(stddev, floor);
  }
  return g;
}

DecisionTree::DecisionTree() : nodes_(1) {}

DecisionTree DecisionTree::train(std::span<const TrainingRow> rows, const TreeParams& params) {
  if (rows.empty()) fail(ErrorCode::kEmptyTrainingSet, "no training rows");
  if (params.min_leaf == 0) fail(ErrorCode::kInvalidArgument, "min_leaf must be positive");
  DecisionTree tree;
  tree.nodes_ = TreeBuilder(rows, params).build();
  return tree;
}

DecisionTree DecisionTree::from_nodes(std::vector<Node> nodes) {
  if (nodes.empty()) fail(ErrorCode::kModelFormat, "empty tree");
  for (const Node& n : nodes) {
    if (n.is_leaf()) continue;
    const auto size = static_cast<int>(nodes.size());
    if (n.feature >= static_cast<int>(kFeatureCount) || n.left <= 0 || n.right <= 0 ||
        n.left >= size || n.right >= size) {
      fail(ErrorCode::kModelFormat, "malformed tree node");
    }
  }
  // Every node except the root must have exactly one parent and be
  // reachable from the root, i.e. the table is a tree.
  std::vector<int> parents(nodes.size(), 0);
  for (const Node& n : nodes) {
    if (n.is_leaf()) continue;
    ++parents[n.left];
    ++parents[n.right];
  }
  if (parents[0] != 0) fail(ErrorCode::kModelFormat, "root has a parent");
  for (std::size_t i = 1; i < nodes.size(); ++i) {
    if (parents[i] != 1) fail(ErrorCode::kModelFormat, "tree node without exactly one parent");
  }
  std::size_t reached = 0;
  std::vector<int> stack{0};
  while (!stack.empty()) {
    const Node& n = nodes[stack.back()];
    stack.pop_back();
    ++reached;
    if (!n.is_leaf()) {
      stack.push_back(n.left);
      stack.push_back(n.right);
    }
  }
  if (reached != nodes.size()) fail(ErrorCode::kModelFormat, "unreachable tree nodes");
  DecisionTree tree;
  tree.nodes_ = std::move(nodes);
  return tree;
}

Classification DecisionTree::predict(const ScoreVector& scores) const {
  // from_nodes and train only ever produce proper trees, so this terminates.
  const Node* n = &nodes_[0];
  while (!n->is_leaf()) n = &nodes_[scores[n->feature] <= n->threshold ? n->left : n->right];
  return {n->label, n->confidence};
}

std::size_t DecisionTree::depth() const {
  std::size_t deepest = 0;
  std::vector<std::pair<int, std::size_t>> stack{{0, 0}};
  while (!stack.empty()) {
    const auto [i, d] = stack.back();
    stack.pop_back();
    deepest = std::max(deepest, d);
    if (!nodes_[i].is_leaf()) {
      stack.push_back({nodes_[i].left, d + 1});
      stack.push_back({nodes_[i].right, d + 1});
    }
  }
  return deepest;
}

Classification classify(const FeatureVector& fv, const DetectorModel& model) {
  return model.tree.predict(model.scorers.score(fv));
}

std::string model_to_json(const DetectorModel& model) {
  json j;
  j["format_version"] = model.format_version;
  j["scorers"] = {{"mean", model.scorers.mean}, {"stddev", model.scorers.stddev}};
  j["tree"] = node_to_json(model.tree.nodes(), 0);
  j["pipeline_config"] = config_to_json(model.config);
  return j.dump(2) + "\n";
}

DetectorModel model_from_json(std::string_view text) {
  try {
    const json j = json::parse(text);
    DetectorModel model;
    model.format_version = j.at("format_version").get<int>();
    if (model.format_version != kModelFormatVersion) {
      bad_model("unsupported format_version " + std::to_string(model.format_version));
    }
    const auto mean = j.at("scorers").at("mean").get<std::vector<double>>();
    const auto stddev = j.at("scorers").at("stddev").get<std::vector<double>>();
    if (mean.size() != kFeatureCount || stddev.size() != kFeatureCount) {
      bad_model("scorers must hold 11 entries");
    }
    for (std::size_t k = 0; k < kFeatureCount; ++k) {
      if (!std::isfinite(mean[k]) || !(stddev[k] > 0.0) || !std::isfinite(stddev[k])) {
        bad_model("scorer parameters must be finite with positive stddev");
      }
      model.scorers.mean[k] = mean[k];
      model.scorers.stddev[k] = stddev[k];
    }
    std::vector<DecisionTree::Node> nodes;
    node_from_json(j.at("tree"), nodes, 0);
    model.tree = DecisionTree::from_nodes(std::move(nodes));
    model.config = config_from_json(j.at("pipeline_config"));
    validate(model.config);
    return model;
  } catch (const json::exception& e) {
    bad_model(e.what());
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kModelFormat) throw;
    bad_model(e.what());
  }
}

void save_model(const DetectorModel& model, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) fail(ErrorCode::kIoFailure, "cannot open " + path.string());
  out << model_to_json(model);
  if (!out) fail(ErrorCode::kIoFailure, "write error on " + path.string());
}

DetectorModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::kIoFailure, "cannot open " + path.string());
  const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return model_from_json(text);
}

}  // namespace upcall
