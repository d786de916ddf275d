// Copyright (c) 2026 The xltts Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//   http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "audio/pitch.h"

#include <cmath>

#include "util/error.h"

namespace xltts {

namespace {

constexpr double kFrameSeconds = 0.040;
constexpr double kHopSeconds = 0.010;
constexpr double kMinHz = 50.0;
constexpr double kMaxHz = 600.0;
constexpr double kVoicingThreshold = 0.3;

// Normalized autocorrelation of the zero-mean frame at integer lag.
double NormCorr(const std::vector<double>& x, size_t start, size_t len,
                int lag) {
  double num = 0.0, e0 = 0.0, e1 = 0.0;
  size_t n = len - static_cast<size_t>(lag);
  for (size_t i = 0; i < n; ++i) {
    double a = x[start + i];
    double b = x[start + i + static_cast<size_t>(lag)];
    num += a * b;
    e0 += a * a;
    e1 += b * b;
  }
  double denom = std::sqrt(e0 * e1);
  if (denom < 1e-12) return 0.0;
  return num / denom;
}

}  // namespace

PitchContour ExtractPitch(const Waveform& w) {
  if (w.samples.empty()) {
    throw Error(ErrorCode::kEmptyWaveform, "pitch input");
  }
  int sr = w.sample_rate;
  size_t frame_len = static_cast<size_t>(sr * kFrameSeconds);
  size_t hop = static_cast<size_t>(sr * kHopSeconds);
  int lag_min = static_cast<int>(std::ceil(sr / kMaxHz));
  int lag_max = static_cast<int>(sr / kMinHz);

  PitchContour contour;
  if (w.samples.size() < frame_len) return contour;

  std::vector<double> frame(frame_len);
  for (size_t start = 0; start + frame_len <= w.samples.size();
       start += hop) {
    double mean = 0.0;
    for (size_t i = 0; i < frame_len; ++i) mean += w.samples[start + i];
    mean /= static_cast<double>(frame_len);
    for (size_t i = 0; i < frame_len; ++i) {
      frame[i] = w.samples[start + i] - mean;
    }

    int hi = std::min(lag_max, static_cast<int>(frame_len) - 1);
    std::vector<double> corr(hi - lag_min + 1);
    double best_corr = 0.0;
    int best_idx = 0;
    for (int lag = lag_min; lag <= hi; ++lag) {
      double c = NormCorr(frame, 0, frame_len, lag);
      corr[lag - lag_min] = c;
      if (c > best_corr) {
        best_corr = c;
        best_idx = lag - lag_min;
      }
    }

    double f0 = 0.0;
    if (best_corr >= kVoicingThreshold) {
      // A period's integer multiples correlate as strongly as the period
      // itself, so the global maximum often lands on a multiple. Take the
      // shortest local peak within 1% of the maximum instead.
      int pick = best_idx;
      double guard = 0.99 * best_corr;
      for (int i = 0; i < static_cast<int>(corr.size()); ++i) {
        double left = i > 0 ? corr[i - 1] : -2.0;
        double right =
            i + 1 < static_cast<int>(corr.size()) ? corr[i + 1] : -2.0;
        if (corr[i] >= guard && corr[i] >= left && corr[i] >= right) {
          pick = i;
          break;
        }
      }
      // Parabolic refinement around the peak for sub-sample lag precision.
      double refined = lag_min + pick;
      if (pick > 0 && pick + 1 < static_cast<int>(corr.size())) {
        double cm = corr[pick - 1];
        double c0 = corr[pick];
        double cp = corr[pick + 1];
        double denom = cm - 2.0 * c0 + cp;
        if (std::fabs(denom) > 1e-12) {
          double delta = 0.5 * (cm - cp) / denom;
          if (delta > -1.0 && delta < 1.0) refined += delta;
        }
      }
      f0 = sr / refined;
    }
    contour.times.push_back(
        (static_cast<double>(start) + frame_len / 2.0) / sr);
    contour.f0.push_back(f0);
  }
  return contour;
}

double MeanPitchHz(const PitchContour& contour) {
  double sum = 0.0;
  int voiced = 0;
  for (double v : contour.f0) {
    if (v > 0.0) {
      sum += v;
      ++voiced;
    }
  }
  return voiced > 0 ? sum / voiced : 0.0;
}

}  // namespace xltts
