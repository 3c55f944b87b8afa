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

#include "upcall/features.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "upcall/error.hpp"

namespace upcall {

std::string_view feature_name(std::size_t index) {
  static constexpr std::array<std::string_view, kFeatureCount> kNames{
      "duration",         "min_frequency",       "max_bandwidth",
      "start_end_bandwidth", "upsweep_duration", "noise_level",
      "segmentation_threshold", "mean_bandwidth", "hole_fraction",
      "downsweep_fraction", "harmonic_fraction"};
  return index < kFeatureCount ? kNames[index] : std::string_view{};
}

std::vector<ContourPoint> ridge_contour(const CandidateCall& cand,
                                        const Spectrogram& spec_clean) {
  constexpr std::size_t kMedian = 5;

  std::vector<ContourPoint> contour;
  for (const FrameExtent& e : cand.frame_extents()) {
    int best = e.low_bin;
    for (int b = e.low_bin + 1; b <= e.high_bin; ++b) {
      if (spec_clean.at(b, e.frame) > spec_clean.at(best, e.frame)) best = b;
    }
    contour.push_back({e.frame, best});
  }

  // Running median: leaves monotone runs untouched and drops one- or
  // two-frame excursions onto a neighbouring blob.
  std::vector<ContourPoint> smoothed = contour;
  // The window shrinks symmetrically near the ends so endpoints keep their
  // own value.
  for (std::size_t i = 0; i < contour.size(); ++i) {
    const std::size_t half = std::min({kMedian / 2, i, contour.size() - 1 - i});
    const std::size_t lo = i - half;
    const std::size_t hi = i + half;
    std::vector<int> window;
    for (std::size_t j = lo; j <= hi; ++j) window.push_back(contour[j].bin);
    const auto mid = window.begin() + static_cast<std::ptrdiff_t>(window.size() / 2);
    std::nth_element(window.begin(), mid, window.end());
    smoothed[i].bin = *mid;
  }
  return smoothed;
}

FeatureVector extract_features(const CandidateCall& cand, const Spectrogram& spec_raw,
                               const Spectrogram& spec_clean, double seg_threshold) {
  const double fres = spec_clean.freq_res_hz;
  const double tres = spec_clean.time_res_s;
  if (spec_raw.n_bins == 0 ||
      static_cast<double>(spec_raw.n_bins - 1) * spec_raw.freq_res_hz < kNoiseBandHighHz) {
    fail(ErrorCode::kBandOutOfRange, "spectrogram does not cover the 50-440 Hz band");
  }
  if (cand.path.points.empty()) {
    fail(ErrorCode::kInvalidArgument, "candidate has no points");
  }

  FeatureVector fv;
  const Path& path = cand.path;
  const int first = path.first_frame();
  const int last = path.last_frame();
  const double duration = (last - first) * tres;
  fv[0] = duration;

  int min_bin = path.points.front().bin;
  for (const Cell& c : path.points) min_bin = std::min(min_bin, c.bin);
  fv[1] = min_bin * fres;

  const std::vector<FrameExtent> extents = cand.frame_extents();
  double max_width = 0.0;
  double sum_width = 0.0;
  for (const FrameExtent& e : extents) {
    const double w = (e.high_bin - e.low_bin) * fres;
    max_width = std::max(max_width, w);
    sum_width += w;
  }
  fv[2] = max_width;
  fv[7] = sum_width / static_cast<double>(extents.size());

  // Sweep direction on the ridge contour. A level step takes the direction
  // of the next rise or fall (or the previous one at the tail), so a slow
  // sweep that moves one bin every few frames counts as sweeping throughout.
  const std::vector<ContourPoint> contour = ridge_contour(cand, spec_clean);
  // Start-end bandwidth from a least-squares line through the contour, so a
  // frame or two on a neighbouring blob at either end does not dominate it.
  double slope = 0.0;
  if (contour.size() > 1) {
    double mt = 0.0;
    double mb = 0.0;
    for (const ContourPoint& p : contour) {
      mt += p.frame;
      mb += p.bin;
    }
    mt /= static_cast<double>(contour.size());
    mb /= static_cast<double>(contour.size());
    double stb = 0.0;
    double stt = 0.0;
    for (const ContourPoint& p : contour) {
      stb += (p.frame - mt) * (p.bin - mb);
      stt += (p.frame - mt) * (p.frame - mt);
    }
    slope = stb / stt;
  }
  fv[3] = std::abs(slope) * (last - first) * fres;
  std::vector<int> direction(contour.size() > 1 ? contour.size() - 1 : 0, 0);
  for (std::size_t i = 0; i < direction.size(); ++i) {
    const int d = contour[i + 1].bin - contour[i].bin;
    direction[i] = (d > 0) - (d < 0);
  }
  int next = 0;
  for (std::size_t i = direction.size(); i-- > 0;) {
    if (direction[i] != 0) next = direction[i];
    else direction[i] = next;
  }
  int prev = 0;
  for (std::size_t i = 0; i < direction.size(); ++i) {
    if (direction[i] != 0) prev = direction[i];
    else direction[i] = prev;
  }
  int up_frames = 0;
  int down_frames = 0;
  for (std::size_t i = 0; i < direction.size(); ++i) {
    const int gap = contour[i + 1].frame - contour[i].frame;
    if (direction[i] > 0) up_frames += gap;
    if (direction[i] < 0) down_frames += gap;
  }
  fv[4] = up_frames * tres;
  fv[9] = last > first ? static_cast<double>(down_frames) / (last - first) : 0.0;

  // Local noise: median raw magnitude in the band, outside the candidate.
  const auto band_lo = static_cast<std::size_t>(std::ceil(kNoiseBandLowHz / spec_raw.freq_res_hz));
  const auto band_hi = static_cast<std::size_t>(std::floor(kNoiseBandHighHz / spec_raw.freq_res_hz));
  std::vector<std::pair<int, int>> covered(spec_raw.n_frames, {1, 0});
  for (const FrameExtent& e : extents) covered[e.frame] = {e.low_bin, e.high_bin};
  std::vector<double> noise;
  noise.reserve((band_hi - band_lo + 1) * spec_raw.n_frames);
  for (std::size_t b = band_lo; b <= band_hi; ++b) {
    for (std::size_t t = 0; t < spec_raw.n_frames; ++t) {
      const auto [lo, hi] = covered[t];
      const int bin = static_cast<int>(b);
      if (bin >= lo && bin <= hi) continue;
      noise.push_back(spec_raw.at(b, t));
    }
  }
  if (!noise.empty()) {
    const auto mid = noise.begin() + static_cast<std::ptrdiff_t>(noise.size() / 2);
    std::nth_element(noise.begin(), mid, noise.end());
    double median = *mid;
    if (noise.size() % 2 == 0) {
      median = 0.5 * (median + *std::max_element(noise.begin(), mid));
    }
    fv[5] = median;
  }

  fv[6] = seg_threshold;

  std::size_t span_frames = static_cast<std::size_t>(last - first + 1);
  fv[8] = 1.0 - static_cast<double>(extents.size()) / static_cast<double>(span_frames);

  std::size_t with_harmonic = 0;
  const int n_bins = static_cast<int>(spec_clean.n_bins);
  for (std::size_t i = 0; i < contour.size(); ++i) {
    const ContourPoint& p = contour[i];
    const int centre = 2 * p.bin;
    for (int b = centre - 1; b <= centre + 1; ++b) {
      // Cells of the fundamental's own blob do not count as a harmonic.
      if (b <= extents[i].high_bin) continue;
      if (b >= 0 && b < n_bins && spec_clean.at(b, p.frame) != 0.0) {
        ++with_harmonic;
        break;
      }
    }
  }
  fv[10] = static_cast<double>(with_harmonic) / static_cast<double>(contour.size());
  return fv;
}

}  // namespace upcall
