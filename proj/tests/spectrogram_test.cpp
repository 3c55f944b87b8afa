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

#include "upcall/spectrogram.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "test_util.hpp"
#include "upcall/error.hpp"

namespace upcall {
namespace {

TEST(Spectrogram, DefaultsGiveDocumentedResolution) {
  AudioClip clip;
  clip.samples.assign(4000, 0.0);
  const Spectrogram s = compute_spectrogram(clip, {});
  EXPECT_EQ(s.n_bins, 129U);
  EXPECT_EQ(s.n_frames, 126U);  // centred frames, 0 .. 2.0 s
  EXPECT_DOUBLE_EQ(s.freq_res_hz, 7.8125);
  EXPECT_DOUBLE_EQ(s.time_res_s, 0.016);
  EXPECT_DOUBLE_EQ(s.frame_time_s(125), 2.0);
}

TEST(Spectrogram, ZeroClipGivesZeroMatrix) {
  AudioClip clip;
  clip.samples.assign(1000, 0.0);
  const Spectrogram s = compute_spectrogram(clip, {});
  EXPECT_EQ(s.count_nonzero(), 0U);
}

TEST(Spectrogram, ToneArgmaxAtBin26) {
  const AudioClip clip = testing::tone_clip(200.0, 0.5, 4000);
  const Spectrogram s = compute_spectrogram(clip, {});
  for (std::size_t t = 0; t < s.n_frames; ++t) {
    std::size_t best = 0;
    for (std::size_t b = 1; b < s.n_bins; ++b) {
      if (s.at(b, t) > s.at(best, t)) best = b;
    }
    EXPECT_EQ(best, 26U) << "frame " << t;
  }
}

TEST(Spectrogram, MatchesDirectDftOnOneFrame) {
  const AudioClip clip = testing::tone_clip(200.0, 0.5, 4000);
  SpectrogramParams p;
  p.center = false;
  const Spectrogram s = compute_spectrogram(clip, p);
  const std::size_t frame = 7;
  const std::vector<double> w = make_window(Window::kHann, 256);
  std::vector<double> x(256);
  for (std::size_t i = 0; i < 256; ++i) x[i] = clip.samples[frame * 32 + i] * w[i];
  const std::vector<double> oracle = testing::dft_magnitude(x, s.n_bins);
  for (std::size_t b = 0; b < s.n_bins; ++b) {
    EXPECT_NEAR(s.at(b, frame), oracle[b], 1e-9 * (1.0 + oracle[b]));
  }
}

TEST(Spectrogram, UncentredFramingCoversDocumentedSamples) {
  AudioClip clip;
  clip.samples.assign(4000, 0.0);
  SpectrogramParams p;
  p.center = false;
  const Spectrogram s = compute_spectrogram(clip, p);
  EXPECT_EQ(s.n_frames, (4000U - 256U) / 32U + 1U);
}

TEST(Spectrogram, ParsevalOnRectangularFrames) {
  std::mt19937_64 gen(3);
  std::normal_distribution<double> nd(0.0, 0.2);
  AudioClip clip;
  clip.samples.resize(2048);
  for (double& v : clip.samples) v = std::clamp(nd(gen), -1.0, 1.0);
  SpectrogramParams p;
  p.window = Window::kRectangular;
  p.center = false;
  const Spectrogram s = compute_spectrogram(clip, p);
  for (std::size_t t = 0; t < s.n_frames; ++t) {
    double energy = 0.0;
    for (std::size_t i = 0; i < 256; ++i) energy += clip.samples[t * 32 + i] * clip.samples[t * 32 + i];
    // One-sided sum: DC and Nyquist once, the rest twice; equals N * energy.
    double spectral = 0.0;
    for (std::size_t b = 0; b < s.n_bins; ++b) {
      const double w = (b == 0 || b == s.n_bins - 1) ? 1.0 : 2.0;
      spectral += w * s.at(b, t) * s.at(b, t);
    }
    EXPECT_NEAR(spectral / (256.0 * energy), 1.0, 1e-6);
  }
}

TEST(Spectrogram, DelayByOneHopShiftsColumns) {
  std::mt19937_64 gen(11);
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  AudioClip a;
  a.samples.resize(3000);
  for (double& v : a.samples) v = u(gen);
  AudioClip b = a;
  b.samples.insert(b.samples.begin(), 32, 0.0);
  b.samples.resize(a.samples.size());

  SpectrogramParams p;
  p.center = false;
  const Spectrogram sa = compute_spectrogram(a, p);
  const Spectrogram sb = compute_spectrogram(b, p);
  for (std::size_t t = 1; t + 1 < sa.n_frames; ++t) {
    for (std::size_t bin = 0; bin < sa.n_bins; ++bin) {
      ASSERT_NEAR(sb.at(bin, t), sa.at(bin, t - 1), 1e-9);
    }
  }
}

TEST(Spectrogram, ScalingIsLinear) {
  const AudioClip x = testing::tone_clip(123.0, 0.3, 2000);
  AudioClip y = x;
  for (double& v : y.samples) v *= 2.5;
  const Spectrogram sx = compute_spectrogram(x, {});
  const Spectrogram sy = compute_spectrogram(y, {});
  for (std::size_t i = 0; i < sx.mag.size(); ++i) {
    ASSERT_NEAR(sy.mag[i], 2.5 * sx.mag[i], 1e-9 * (1.0 + sy.mag[i]));
  }
}

TEST(Spectrogram, ShortClipAndBadParamsFail) {
  AudioClip clip;
  clip.samples.assign(100, 0.0);
  try {
    compute_spectrogram(clip, {});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kClipTooShort);
  }
  clip.samples.assign(1000, 0.0);
  SpectrogramParams p;
  p.fft_len = 300;
  p.window_len = 256;
  EXPECT_THROW(compute_spectrogram(clip, p), Error);
  p = {};
  p.hop = 0;
  EXPECT_THROW(compute_spectrogram(clip, p), Error);
  p = {};
  p.window_len = 512;
  EXPECT_THROW(compute_spectrogram(clip, p), Error);
}

}  // namespace
}  // namespace upcall
