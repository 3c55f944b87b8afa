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

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <string>

#include "upcall/error.hpp"

namespace upcall {

void validate(const SpectrogramParams& p) {
  if (p.hop == 0 || p.hop > p.window_len || p.window_len > p.fft_len) {
    fail(ErrorCode::kInvalidArgument, "require 0 < hop <= window_len <= fft_len");
  }
  if (!std::has_single_bit(p.fft_len)) {
    fail(ErrorCode::kInvalidArgument, "fft_len must be a power of two");
  }
}

std::size_t Spectrogram::count_nonzero() const {
  return static_cast<std::size_t>(
      std::count_if(mag.begin(), mag.end(), [](double v) { return v != 0.0; }));
}

void fft_inplace(std::span<std::complex<double>> a) {
  const std::size_t n = a.size();
  if (n <= 1) return;

  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }

  for (std::size_t len = 2; len <= n; len <<= 1) {
    const double ang = -2.0 * std::numbers::pi / static_cast<double>(len);
    const std::size_t half = len / 2;
    for (std::size_t i = 0; i < n; i += len) {
      for (std::size_t k = 0; k < half; ++k) {
        // Twiddles are computed directly rather than by recurrence to keep
        // rounding error independent of the stage length.
        const std::complex<double> w = std::polar(1.0, ang * static_cast<double>(k));
        const std::complex<double> u = a[i + k];
        const std::complex<double> v = a[i + k + half] * w;
        a[i + k] = u + v;
        a[i + k + half] = u - v;
      }
    }
  }
}

std::vector<double> make_window(Window window, std::size_t length) {
  std::vector<double> w(length, 1.0);
  if (window == Window::kHann) {
    // Periodic Hann.
    for (std::size_t i = 0; i < length; ++i) {
      w[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * i / static_cast<double>(length));
    }
  }
  return w;
}

Spectrogram compute_spectrogram(const AudioClip& clip, const SpectrogramParams& params) {
  validate(params);
  if (clip.sample_rate_hz <= 0) {
    fail(ErrorCode::kInvalidArgument, "sample rate must be positive");
  }
  const std::size_t n = clip.samples.size();
  if (n < params.window_len) {
    fail(ErrorCode::kClipTooShort,
         "clip has " + std::to_string(n) + " samples, window needs " +
             std::to_string(params.window_len));
  }

  const std::size_t pad = params.center ? params.window_len / 2 : 0;
  const std::size_t n_frames =
      params.center ? n / params.hop + 1 : (n - params.window_len) / params.hop + 1;
  const std::size_t n_bins = params.fft_len / 2 + 1;
  const double rate = clip.sample_rate_hz;

  Spectrogram out(n_bins, n_frames, rate / static_cast<double>(params.fft_len),
                  static_cast<double>(params.hop) / rate);

  const std::vector<double> window = make_window(params.window, params.window_len);
  std::vector<std::complex<double>> buf(params.fft_len);
  for (std::size_t t = 0; t < n_frames; ++t) {
    std::fill(buf.begin(), buf.end(), std::complex<double>{});
    const std::size_t start = t * params.hop;  // in padded coordinates
    for (std::size_t i = 0; i < params.window_len; ++i) {
      const std::size_t padded = start + i;
      if (padded < pad || padded - pad >= n) continue;
      buf[i] = clip.samples[padded - pad] * window[i];
    }
    fft_inplace(buf);
    for (std::size_t b = 0; b < n_bins; ++b) out.at(b, t) = std::abs(buf[b]);
  }
  return out;
}

}  // namespace upcall
