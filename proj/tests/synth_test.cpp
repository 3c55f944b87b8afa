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

#include "upcall/synth.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <sstream>

#include "test_util.hpp"
#include "upcall/error.hpp"
#include "upcall/pipeline.hpp"

namespace upcall {
namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

double expected_freq(const UpcallSpec& s, double t) {
  const double u = (t - s.onset_s) / s.duration_s;
  const double shape = s.sweep_shape == SweepShape::kLinear ? u : u * u;
  return s.f_start_hz + (s.f_end_hz - s.f_start_hz) * shape;
}

TEST(SynthUpcall, RidgeFollowsProgrammedSweep) {
  for (SweepShape shape : {SweepShape::kLinear, SweepShape::kQuadratic}) {
    UpcallSpec spec;
    spec.f_start_hz = 80.0;
    spec.f_end_hz = 220.0;
    spec.duration_s = 1.2;
    spec.onset_s = 0.4;
    spec.snr_db = 60.0;
    spec.sweep_shape = shape;
    Rng rng(1);
    const AudioClip clip = synth_upcall(spec, 2000, 2.0, rng);
    const Spectrogram s = compute_spectrogram(clip, {});
    int checked = 0;
    for (std::size_t t = 0; t < s.n_frames; ++t) {
      const double time = s.frame_time_s(t);
      // Skip frames whose window reaches past either end of the call.
      if (time < spec.onset_s + 0.07 || time > spec.onset_s + spec.duration_s - 0.07) continue;
      std::size_t best = 0;
      for (std::size_t b = 1; b < s.n_bins; ++b) {
        if (s.at(b, t) > s.at(best, t)) best = b;
      }
      EXPECT_NEAR(static_cast<double>(best), expected_freq(spec, time) / s.freq_res_hz, 1.0)
          << "frame " << t;
      ++checked;
    }
    EXPECT_GT(checked, 50);
  }
}

TEST(SynthUpcall, EnvelopeExtentMatchesDuration) {
  UpcallSpec spec;
  spec.duration_s = 1.0;
  spec.onset_s = 0.5;
  Rng rng(2);
  const SynthParts parts = synth_upcall_parts(spec, 2000, 2.0, rng);
  // RMS over 16 ms blocks, then the span above -20 dB of the peak block.
  const std::size_t block = 32;
  std::vector<double> rms;
  for (std::size_t i = 0; i + block <= parts.signal.size(); i += block) {
    double e = 0.0;
    for (std::size_t j = 0; j < block; ++j) e += parts.signal[i + j] * parts.signal[i + j];
    rms.push_back(std::sqrt(e / block));
  }
  const double peak = *std::max_element(rms.begin(), rms.end());
  std::size_t first = rms.size();
  std::size_t last = 0;
  for (std::size_t i = 0; i < rms.size(); ++i) {
    if (rms[i] >= 0.1 * peak) {
      first = std::min(first, i);
      last = i;
    }
  }
  const double extent = static_cast<double>(last - first + 1) * block / 2000.0;
  EXPECT_NEAR(extent, 1.0, 2 * 0.016);
}

TEST(SynthUpcall, RealizedSnrWithinOneDb) {
  Rng draw(3);
  for (int trial = 0; trial < 40; ++trial) {
    UpcallSpec spec = draw_upcall_spec(2.0, 0.0, 30.0, draw);
    Rng rng(static_cast<std::uint64_t>(trial));
    const SynthParts parts = synth_upcall_parts(spec, 2000, 2.0, rng);
    const double call_samples = std::round(spec.duration_s * 2000.0);
    const double ps =
        band_energy(parts.signal, 2000, kCallBandLowHz, kCallBandHighHz) / call_samples;
    const double pn = band_energy(parts.noise, 2000, kCallBandLowHz, kCallBandHighHz) /
                      static_cast<double>(parts.noise.size());
    EXPECT_NEAR(10.0 * std::log10(ps / pn), spec.snr_db, 1.0) << "trial " << trial;
  }
}

TEST(SynthUpcall, HarmonicLevelControlsOctaveEnergy) {
  UpcallSpec spec;
  spec.f_start_hz = 80.0;
  spec.f_end_hz = 120.0;
  Rng rng(4);
  const double total_none = band_energy(synth_upcall_parts(spec, 2000, 2.0, rng).signal, 2000,
                                        kCallBandLowHz, kCallBandHighHz);
  Rng rng2(4);
  const double octave_none =
      band_energy(synth_upcall_parts(spec, 2000, 2.0, rng2).signal, 2000, 150.0, 250.0);
  EXPECT_LT(octave_none / total_none, 1e-3);

  spec.harmonic_level = 0.5;
  Rng rng3(4);
  const SynthParts with = synth_upcall_parts(spec, 2000, 2.0, rng3);
  const double ratio = band_energy(with.signal, 2000, 150.0, 250.0) /
                       band_energy(with.signal, 2000, kCallBandLowHz, kCallBandHighHz);
  EXPECT_NEAR(ratio, 0.25 / 1.25, 0.02);
}

TEST(SynthUpcall, OutOfRangeSpecsAreBandViolations) {
  auto code = [](UpcallSpec s) {
    try {
      validate(s, 2.0);
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::kInvalidArgument;
  };
  UpcallSpec s;
  s.f_end_hz = 500.0;
  EXPECT_EQ(code(s), ErrorCode::kBandViolation);
  s = {};
  s.f_start_hz = 40.0;
  EXPECT_EQ(code(s), ErrorCode::kBandViolation);
  s = {};
  s.f_start_hz = 200.0;
  s.f_end_hz = 100.0;
  EXPECT_EQ(code(s), ErrorCode::kBandViolation);
  s = {};
  s.duration_s = 1.8;
  s.onset_s = 0.1;
  EXPECT_EQ(code(s), ErrorCode::kBandViolation);
  s = {};
  s.onset_s = 1.5;  // runs past the end of a 2 s clip
  EXPECT_THROW(validate(s, 2.0), Error);
}

TEST(SynthNegative, WhiteNoiseRarelyTraces) {
  int with_paths = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    Rng rng(seed);
    const AudioClip clip = synth_negative(NegativeKind::kWhite, 2000, 2.0, rng);
    if (!analyze_clip(clip, PipelineConfig{}, seed).candidates.empty()) ++with_paths;
  }
  EXPECT_LE(with_paths, 5);
}

TEST(SynthNegative, TonesTraceFlat) {
  int candidates = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Rng rng(seed);
    NegativeSpec spec = draw_negative_spec(NegativeKind::kTonalVessel, 2.0, 5.0, 20.0, rng);
    const AudioClip clip = synth_negative(spec, 2000, 2.0, rng);
    const ClipAnalysis a = analyze_clip(clip, PipelineConfig{}, seed);
    for (const FeatureVector& fv : a.features) {
      ++candidates;
      EXPECT_LE(fv.start_end_bandwidth(), a.raw.freq_res_hz) << "seed " << seed;
    }
  }
  EXPECT_GT(candidates, 10);
}

TEST(SynthNegative, DownsweepsTraceDownward) {
  int candidates = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Rng rng(seed);
    NegativeSpec spec = draw_negative_spec(NegativeKind::kDownsweepConfuser, 2.0, 15.0, 20.0, rng);
    const AudioClip clip = synth_negative(spec, 2000, 2.0, rng);
    const ClipAnalysis a = analyze_clip(clip, PipelineConfig{}, seed);
    for (const FeatureVector& fv : a.features) {
      ++candidates;
      EXPECT_GT(fv.downsweep_fraction(), 0.5) << "seed " << seed;
    }
  }
  EXPECT_GT(candidates, 10);
}

TEST(SynthNegative, KindNamesRoundTrip) {
  for (NegativeKind k : {NegativeKind::kWhite, NegativeKind::kTonalVessel,
                         NegativeKind::kBroadbandTransient, NegativeKind::kDownsweepConfuser}) {
    EXPECT_EQ(parse_negative_kind(to_string(k)), k);
  }
  EXPECT_THROW(parse_negative_kind("whale"), Error);
}

TEST(Corpus, EmptyCorpusWritesOnlyManifest) {
  const auto dir = testing::scratch_dir("corpus_empty");
  CorpusOptions o;
  const CorpusManifest m = make_corpus(o, dir);
  EXPECT_TRUE(m.rows.empty());
  EXPECT_EQ(slurp(dir / kManifestFileName), std::string(kManifestHeader) + "\n");
  EXPECT_EQ(std::distance(std::filesystem::directory_iterator(dir), {}), 1);
}

TEST(Corpus, CountsLabelsAndBalancedPrefixes) {
  const auto dir = testing::scratch_dir("corpus_counts");
  CorpusOptions o;
  o.n_pos = 100;
  o.n_neg = 100;
  o.seed = 1;
  const CorpusManifest m = make_corpus(o, dir);
  ASSERT_EQ(m.rows.size(), 200U);
  int pos = 0;
  for (std::size_t i = 0; i < m.rows.size(); ++i) {
    const ManifestRow& r = m.rows[i];
    ASSERT_TRUE(std::filesystem::exists(dir / r.filename));
    pos += r.label == Label::kPositive;
    EXPECT_LE(std::abs(2 * pos - static_cast<int>(i + 1)), 2) << "prefix " << i + 1;
    if (r.label == Label::kPositive) {
      ASSERT_TRUE(r.snr_db && r.duration && r.f_start && r.f_end && r.onset);
      EXPECT_GE(*r.snr_db, 5.0);
      EXPECT_LE(*r.snr_db, 20.0);
      EXPECT_LT(*r.f_start, *r.f_end);
    }
  }
  EXPECT_EQ(pos, 100);
  const CorpusManifest back = read_manifest(dir / kManifestFileName);
  EXPECT_EQ(manifest_to_csv(back), manifest_to_csv(m));
  const AudioClip clip = read_wav(dir / m.rows[0].filename);
  EXPECT_EQ(clip.samples.size(), 4000U);
}

TEST(Corpus, SameSeedSameBytes) {
  CorpusOptions o;
  o.n_pos = 12;
  o.n_neg = 9;
  o.seed = 77;
  const auto a = testing::scratch_dir("corpus_a");
  const auto b = testing::scratch_dir("corpus_b");
  const CorpusManifest ma = make_corpus(o, a);
  make_corpus(o, b);
  EXPECT_EQ(slurp(a / kManifestFileName), slurp(b / kManifestFileName));
  for (const ManifestRow& r : ma.rows) {
    EXPECT_EQ(slurp(a / r.filename), slurp(b / r.filename)) << r.filename;
  }
  o.seed = 78;
  const auto c = testing::scratch_dir("corpus_c");
  make_corpus(o, c);
  EXPECT_NE(slurp(a / kManifestFileName), slurp(c / kManifestFileName));
}

TEST(Corpus, ManifestRejectsBadRows) {
  EXPECT_THROW(manifest_from_csv("nope\n"), Error);
  const std::string header = std::string(kManifestHeader) + "\n";
  EXPECT_THROW(manifest_from_csv(header + "a.wav,maybe,,,,,,white,1\n"), Error);
  EXPECT_NO_THROW(manifest_from_csv(header + "a.wav,negative,,,,,,white,1\n"));
}

}  // namespace
}  // namespace upcall
