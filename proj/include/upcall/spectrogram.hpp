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

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "upcall/audio_io.hpp"

namespace upcall {

enum class Window { kHann, kRectangular };

struct SpectrogramParams {
  std::size_t window_len = 256;
  std::size_t hop = 32;
  Window window = Window::kHann;
  std::size_t fft_len = 256;
  // When set, the clip is zero-padded by window_len/2 on both sides so that
  // frame t is centred on sample t*hop and frame times run from 0 to the
  // clip end. When clear, frame t covers samples [t*hop, t*hop + window_len).
  bool center = true;
};

// Throws kInvalidArgument unless 0 < hop <= window_len <= fft_len and
// fft_len is a power of two.
void validate(const SpectrogramParams& params);

// Nonnegative magnitude matrix, bins x frames, stored bin-major.
struct Spectrogram {
  std::size_t n_bins = 0;
  std::size_t n_frames = 0;
  std::vector<double> mag;
  double freq_res_hz = 0.0;
  double time_res_s = 0.0;
  double origin_time_s = 0.0;

  Spectrogram() = default;
  Spectrogram(std::size_t bins, std::size_t frames, double freq_res, double time_res)
      : n_bins(bins), n_frames(frames), mag(bins * frames, 0.0),
        freq_res_hz(freq_res), time_res_s(time_res) {}

  double& at(std::size_t bin, std::size_t frame) { return mag[bin * n_frames + frame]; }
  double at(std::size_t bin, std::size_t frame) const { return mag[bin * n_frames + frame]; }

  double frame_time_s(std::size_t frame) const { return origin_time_s + frame * time_res_s; }
  double bin_freq_hz(std::size_t bin) const { return bin * freq_res_hz; }

  bool empty() const { return mag.empty(); }
  std::size_t count_nonzero() const;

  friend bool operator==(const Spectrogram&, const Spectrogram&) = default;
};

// In-place iterative radix-2 FFT; data.size() must be a power of two.
void fft_inplace(std::span<std::complex<double>> data);

std::vector<double> make_window(Window window, std::size_t length);

// Errors: kClipTooShort when the clip holds fewer than window_len samples.
Spectrogram compute_spectrogram(const AudioClip& clip, const SpectrogramParams& params);

}  // namespace upcall
