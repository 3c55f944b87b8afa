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

// Command-line front end over the C API.
//
//   upcall synth   --pos N --neg N --seed S --out DIR
//   upcall train   --manifest DIR/manifest.csv --out model.json [--seed S]
//   upcall detect  --model model.json [--seed S] [--features] clip.wav...
//   upcall eval    --model model.json --manifest DIR/manifest.csv [--json report.json]
//   upcall inspect clip.wav --stage raw|thresholded|cleaned|traced [--format pgm|csv]
//
// Exit codes: 0 success, 2 usage, 3 model/format error, 4 I/O error.

#include <charconv>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "upcall/upcall.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitFormat = 3;
constexpr int kExitIo = 4;

int exit_code(upc_status status) {
  switch (status) {
    case UPC_OK: return kExitOk;
    case UPC_ERR_INVALID_ARGUMENT: return kExitUsage;
    case UPC_ERR_IO: return kExitIo;
    case UPC_ERR_INTERNAL: return 1;
    default: return kExitFormat;
  }
}

int report_failure(upc_status status, const std::string& context) {
  std::cerr << "upcall: " << context << ": " << upc_status_string(status);
  const std::string detail = upc_last_error();
  if (!detail.empty()) std::cerr << " (" << detail << ")";
  std::cerr << "\n";
  return exit_code(status);
}

struct ModelDeleter {
  void operator()(upc_model* m) const { upc_model_free(m); }
};
struct ClipDeleter {
  void operator()(upc_clip* c) const { upc_clip_free(c); }
};
struct DecisionDeleter {
  void operator()(upc_decision* d) const { upc_decision_free(d); }
};
struct ReportDeleter {
  void operator()(upc_report* r) const { upc_report_free(r); }
};
struct StringDeleter {
  void operator()(char* s) const { upc_string_free(s); }
};
using ModelPtr = std::unique_ptr<upc_model, ModelDeleter>;
using ClipPtr = std::unique_ptr<upc_clip, ClipDeleter>;
using DecisionPtr = std::unique_ptr<upc_decision, DecisionDeleter>;
using ReportPtr = std::unique_ptr<upc_report, ReportDeleter>;
using StringPtr = std::unique_ptr<char, StringDeleter>;

std::string number(double v) {
  char buf[64];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  std::string s(buf, end);
  if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
  return s;
}

bool write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
  return static_cast<bool>(out);
}

struct SynthArgs {
  upc_corpus_options options{};
  std::string out_dir;
};

int run_synth(const SynthArgs& args) {
  size_t rows = 0;
  const upc_status st = upc_make_corpus(&args.options, args.out_dir.c_str(), &rows);
  if (st != UPC_OK) return report_failure(st, "synth");
  std::cout << "wrote " << rows << " clips to " << args.out_dir << "\n";
  return kExitOk;
}

struct TrainArgs {
  upc_train_options options{};
  std::string manifest;
  std::string out;
};

int run_train(const TrainArgs& args) {
  upc_model* raw = nullptr;
  double accuracy = 0.0;
  upc_status st = upc_model_train(args.manifest.c_str(), &args.options, &raw, &accuracy);
  if (st != UPC_OK) return report_failure(st, "train");
  const ModelPtr model(raw);
  st = upc_model_save(model.get(), args.out.c_str());
  if (st != UPC_OK) return report_failure(st, "train");
  std::cout << "training accuracy: " << number(accuracy) << "\n";
  return kExitOk;
}

std::optional<ModelPtr> load(const std::string& path, int& code) {
  upc_model* raw = nullptr;
  const upc_status st = upc_model_load(path.c_str(), &raw);
  if (st != UPC_OK) {
    code = report_failure(st, "loading model " + path);
    return std::nullopt;
  }
  return ModelPtr(raw);
}

struct DetectArgs {
  std::string model;
  std::vector<std::string> wavs;
  std::optional<std::uint64_t> seed;
  bool features = false;
};

int run_detect(const DetectArgs& args) {
  int code = kExitOk;
  auto model = load(args.model, code);
  if (!model) return code;
  const std::uint64_t seed = args.seed.value_or(upc_model_seed(model->get()));

  std::string out = args.features
                        ? "filename,candidate,label,confidence,start_s,end_s,f1,f2,f3,f4,f5,f6,"
                          "f7,f8,f9,f10,f11\n"
                        : "filename,label,confidence\n";
  for (const std::string& wav : args.wavs) {
    upc_clip* raw_clip = nullptr;
    upc_status st = upc_clip_read_wav(wav.c_str(), &raw_clip);
    if (st != UPC_OK) return report_failure(st, "reading " + wav);
    const ClipPtr clip(raw_clip);

    upc_decision* raw_decision = nullptr;
    st = upc_detect(model->get(), clip.get(), upc_clip_seed(seed, wav.c_str()), &raw_decision);
    if (st != UPC_OK) return report_failure(st, "detecting " + wav);
    const DecisionPtr decision(raw_decision);

    if (!args.features) {
      out += wav + ',' + (upc_decision_is_call(decision.get()) ? "call" : "no_call") + ',' +
             number(upc_decision_confidence(decision.get())) + '\n';
      continue;
    }
    const size_t n = upc_decision_candidate_count(decision.get());
    for (size_t i = 0; i < n; ++i) {
      upc_candidate_info info{};
      upc_decision_candidate(decision.get(), i, &info);
      out += wav + ',' + std::to_string(i) + ',' + (info.is_call ? "call" : "no_call") + ',' +
             number(info.confidence) + ',' + number(info.start_s) + ',' + number(info.end_s);
      for (double f : info.features) out += ',' + number(f);
      out += '\n';
    }
  }
  std::cout << out;
  return kExitOk;
}

struct EvalArgs {
  std::string model;
  std::string manifest;
  std::optional<std::uint64_t> seed;
  std::string json;
};

int run_eval(const EvalArgs& args) {
  int code = kExitOk;
  auto model = load(args.model, code);
  if (!model) return code;
  const std::uint64_t seed = args.seed.value_or(upc_model_seed(model->get()));

  upc_report* raw = nullptr;
  upc_status st = upc_evaluate(model->get(), args.manifest.c_str(), seed, &raw);
  if (st != UPC_OK) return report_failure(st, "eval");
  const ReportPtr report(raw);

  char* text = nullptr;
  st = upc_report_text(report.get(), &text);
  if (st != UPC_OK) return report_failure(st, "eval");
  std::cout << StringPtr(text).get();

  if (!args.json.empty()) {
    char* json = nullptr;
    st = upc_report_json(report.get(), &json);
    if (st != UPC_OK) return report_failure(st, "eval");
    const StringPtr owned(json);
    if (!write_text(args.json, owned.get())) {
      std::cerr << "upcall: cannot write " << args.json << "\n";
      return kExitIo;
    }
  }
  return kExitOk;
}

struct InspectArgs {
  std::string wav;
  std::string stage;
  std::string format = "csv";
  std::string model;
  std::uint64_t seed = 0;
  std::string out;
};

int run_inspect(const InspectArgs& args) {
  std::optional<ModelPtr> model;
  if (!args.model.empty()) {
    int code = kExitOk;
    model = load(args.model, code);
    if (!model) return code;
  }
  upc_clip* raw_clip = nullptr;
  upc_status st = upc_clip_read_wav(args.wav.c_str(), &raw_clip);
  if (st != UPC_OK) return report_failure(st, "reading " + args.wav);
  const ClipPtr clip(raw_clip);

  char* dump = nullptr;
  st = upc_inspect(clip.get(), model ? model->get() : nullptr, args.stage.c_str(),
                   args.format.c_str(), upc_clip_seed(args.seed, args.wav.c_str()), &dump);
  if (st != UPC_OK) return report_failure(st, "inspect");
  const StringPtr owned(dump);
  if (args.out.empty()) {
    std::cout << owned.get();
  } else if (!write_text(args.out, owned.get())) {
    std::cerr << "upcall: cannot write " << args.out << "\n";
    return kExitIo;
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Right whale up-call detector"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(upc_version()));

  SynthArgs synth;
  upc_corpus_options_init(&synth.options);
  auto* synth_cmd = app.add_subcommand("synth", "Generate a labelled synthetic corpus");
  synth_cmd->add_option("--pos", synth.options.n_pos, "Number of up-call clips")->required();
  synth_cmd->add_option("--neg", synth.options.n_neg, "Number of negative clips")->required();
  synth_cmd->add_option("--seed", synth.options.seed, "Corpus seed");
  synth_cmd->add_option("--snr-min", synth.options.snr_min_db, "Lowest SNR in dB");
  synth_cmd->add_option("--snr-max", synth.options.snr_max_db, "Highest SNR in dB");
  synth_cmd->add_option("--clip-len", synth.options.clip_len_s, "Clip length in seconds");
  synth_cmd->add_option("--out", synth.out_dir, "Output directory")->required();

  TrainArgs train;
  upc_train_options_init(&train.options);
  auto* train_cmd = app.add_subcommand("train", "Train a detector model from a manifest");
  train_cmd->add_option("--manifest", train.manifest, "Manifest CSV")->required();
  train_cmd->add_option("--out", train.out, "Model JSON to write")->required();
  train_cmd->add_option("--seed", train.options.seed, "Tracing seed stored in the model");
  train_cmd->add_option("--max-depth", train.options.max_depth, "Tree depth limit");
  train_cmd->add_option("--min-leaf", train.options.min_leaf, "Minimum rows per leaf");
  train_cmd->add_option("--particles", train.options.n_particles, "Particles per round");
  train_cmd->add_option("--alpha", train.options.alpha, "Deterministic weight (beta = 1 - alpha)")
      ->check(CLI::Range(0.0, 1.0));
  train_cmd->add_option("--discard", train.options.discard_fraction,
                        "Fraction of weakest cells zeroed");
  train_cmd->add_option("--min-duration", train.options.min_path_duration_s,
                        "Shortest path kept, seconds");

  DetectArgs detect;
  auto* detect_cmd = app.add_subcommand("detect", "Classify clips; one CSV row per clip");
  detect_cmd->add_option("--model", detect.model, "Model JSON")->required();
  detect_cmd->add_option("--seed", detect.seed, "Run seed (default: the model's)");
  detect_cmd->add_flag("--features", detect.features, "Emit one row per candidate with f1..f11");
  detect_cmd->add_option("wavs", detect.wavs, "WAV files")->required();

  EvalArgs eval;
  auto* eval_cmd = app.add_subcommand("eval", "Evaluate a model on a labelled manifest");
  eval_cmd->add_option("--model", eval.model, "Model JSON")->required();
  eval_cmd->add_option("--manifest", eval.manifest, "Manifest CSV")->required();
  eval_cmd->add_option("--seed", eval.seed, "Run seed (default: the model's)");
  eval_cmd->add_option("--json", eval.json, "Also write the report as JSON");

  InspectArgs inspect;
  auto* inspect_cmd = app.add_subcommand("inspect", "Dump one pipeline stage of a clip");
  inspect_cmd->add_option("wav", inspect.wav, "WAV file")->required();
  inspect_cmd->add_option("--stage", inspect.stage, "Pipeline stage")
      ->required()
      ->check(CLI::IsMember({"raw", "thresholded", "cleaned", "traced"}));
  inspect_cmd->add_option("--format", inspect.format, "Output format")
      ->check(CLI::IsMember({"pgm", "csv"}));
  inspect_cmd->add_option("--model", inspect.model, "Take pipeline settings from a model");
  inspect_cmd->add_option("--seed", inspect.seed, "Tracing seed");
  inspect_cmd->add_option("--out", inspect.out, "Write to a file instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  if (*synth_cmd) return run_synth(synth);
  if (*train_cmd) return run_train(train);
  if (*detect_cmd) return run_detect(detect);
  if (*eval_cmd) return run_eval(eval);
  return run_inspect(inspect);
}
