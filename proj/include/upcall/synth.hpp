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
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "upcall/audio_io.hpp"
#include "upcall/rng.hpp"

namespace upcall {

// Band used both to bound synthetic calls and to measure SNR.
inline constexpr double kCallBandLowHz = 50.0;
inline constexpr double kCallBandHighHz = 440.0;

enum class SweepShape { kLinear, kQuadratic };

struct UpcallSpec {
  double f_start_hz = 80.0;
  double f_end_hz = 200.0;
  double duration_s = 1.0;
  double onset_s = 0.5;
  double snr_db = 20.0;
  double harmonic_level = 0.0;  // amplitude of the 2x component relative to the fundamental
  SweepShape sweep_shape = SweepShape::kLinear;
};

// Errors: kBandViolation when the sweep leaves 50-440 Hz, is not upward, or
// its duration lies outside [0.3, 1.5] s; kInvalidArgument when the call
// does not fit in the clip.
void validate(const UpcallSpec& spec, double clip_len_s);

// Clean and noise parts of a synthetic clip, before mixing.
struct SynthParts {
  std::vector<double> signal;
  std::vector<double> noise;
};

// Frequency sweep under a raised-cosine (50 ms taper) envelope, peak 0.5,
// plus white Gaussian noise scaled so that in-band signal power over the
// call's duration divided by in-band noise power equals snr_db.
SynthParts synth_upcall_parts(const UpcallSpec& spec, int sample_rate_hz, double clip_len_s,
                              Rng& rng);
AudioClip synth_upcall(const UpcallSpec& spec, int sample_rate_hz, double clip_len_s, Rng& rng);

enum class NegativeKind { kWhite, kTonalVessel, kBroadbandTransient, kDownsweepConfuser };

std::string_view to_string(NegativeKind kind);
NegativeKind parse_negative_kind(std::string_view text);

// Parameters of a negative clip. Unused fields stay empty.
struct NegativeSpec {
  NegativeKind kind = NegativeKind::kWhite;
  std::optional<double> f_start_hz;
  std::optional<double> f_end_hz;
  std::optional<double> duration_s;
  std::optional<double> onset_s;
  std::optional<double> snr_db;
  double noise_level = 0.05;  // white-noise standard deviation
};

NegativeSpec draw_negative_spec(NegativeKind kind, double clip_len_s, double snr_min_db,
                                double snr_max_db, Rng& rng);
AudioClip synth_negative(const NegativeSpec& spec, int sample_rate_hz, double clip_len_s,
                         Rng& rng);
AudioClip synth_negative(NegativeKind kind, int sample_rate_hz, double clip_len_s, Rng& rng);

// In-band energy of `x` from a zero-padded one-sided DFT.
double band_energy(std::span<const double> x, int sample_rate_hz, double lo_hz, double hi_hz);

struct CorpusOptions {
  std::size_t n_pos = 0;
  std::size_t n_neg = 0;
  std::uint64_t seed = 0;
  double snr_min_db = 5.0;
  double snr_max_db = 20.0;
  int sample_rate_hz = 2000;
  double clip_len_s = 2.0;
};

struct ManifestRow {
  std::string filename;
  Label label = Label::kUnknown;
  std::optional<double> f_start;
  std::optional<double> f_end;
  std::optional<double> duration;
  std::optional<double> onset;
  std::optional<double> snr_db;
  std::string kind;
  std::uint64_t seed = 0;
};

struct CorpusManifest {
  std::vector<ManifestRow> rows;
};

inline constexpr std::string_view kManifestHeader =
    "filename,label,f_start,f_end,duration,onset,snr_db,kind,seed";
inline constexpr std::string_view kManifestFileName = "manifest.csv";

// Draws the parameters of a positive clip used by make_corpus.
UpcallSpec draw_upcall_spec(double clip_len_s, double snr_min_db, double snr_max_db, Rng& rng);

// Writes clip_NNNNN.wav files plus manifest.csv into out_dir. Labels are
// interleaved and negative kinds cycle, so any prefix of the manifest is
// roughly balanced. Errors: kIoFailure, kInvalidArgument.
CorpusManifest make_corpus(const CorpusOptions& options, const std::filesystem::path& out_dir);

std::string manifest_to_csv(const CorpusManifest& manifest);
CorpusManifest manifest_from_csv(std::string_view text);
void write_manifest(const CorpusManifest& manifest, const std::filesystem::path& path);
CorpusManifest read_manifest(const std::filesystem::path& path);

}  // namespace upcall
