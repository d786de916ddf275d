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

#include "audio/vad.h"

#include <cmath>
#include <cstddef>
#include <vector>

#include "util/error.h"

namespace xltts {

namespace {

// Absolute RMS thresholds per aggressiveness level. A frame counts as speech
// above the high threshold outright, or above the low threshold when its
// zero-crossing rate looks voice-like (hiss has high ZCR at low energy, hum
// has near-zero ZCR). Thresholds are absolute, not signal-relative, so
// re-trimming an already-trimmed clip classifies every kept frame the same
// way — that is what makes trim idempotent.
struct Thresholds {
  double rms_high;
  double rms_low;
};

constexpr Thresholds kLevels[4] = {
    {0.004, 0.002},
    {0.008, 0.004},
    {0.016, 0.008},
    {0.032, 0.016},
};

constexpr double kZcrMax = 0.35;
constexpr int kMaxSilenceFrames = 30;  // 300 ms of 10 ms frames

}  // namespace

std::vector<bool> DetectSpeechFrames(const Waveform& w, int aggressiveness) {
  if (aggressiveness < 0 || aggressiveness > 3) {
    throw Error(ErrorCode::kInvalidArgument,
                "aggressiveness must be in [0, 3]");
  }
  if (w.sample_rate < 1000) {
    throw Error(ErrorCode::kInvalidArgument,
                "sample rate too low for 10 ms framing");
  }
  if (w.samples.empty()) {
    throw Error(ErrorCode::kEmptyWaveform, "trim input");
  }
  const Thresholds th = kLevels[aggressiveness];
  size_t frame_len = static_cast<size_t>(w.sample_rate / 100);
  size_t n = w.samples.size();
  size_t n_frames = (n + frame_len - 1) / frame_len;

  std::vector<bool> speech(n_frames, false);
  for (size_t f = 0; f < n_frames; ++f) {
    size_t begin = f * frame_len;
    size_t end = std::min(n, begin + frame_len);
    double energy = 0.0;
    int crossings = 0;
    for (size_t i = begin; i < end; ++i) {
      energy += w.samples[i] * w.samples[i];
      if (i > begin && (w.samples[i] >= 0) != (w.samples[i - 1] >= 0)) {
        ++crossings;
      }
    }
    size_t count = end - begin;
    double rms = std::sqrt(energy / static_cast<double>(count));
    double zcr = count > 1 ? crossings / static_cast<double>(count - 1) : 0.0;
    speech[f] = rms >= th.rms_high || (rms >= th.rms_low && zcr <= kZcrMax);
  }
  return speech;
}

Waveform TrimSilence(const Waveform& w, int aggressiveness) {
  std::vector<bool> speech = DetectSpeechFrames(w, aggressiveness);
  size_t n_frames = speech.size();
  size_t first = n_frames, last = n_frames;
  for (size_t f = 0; f < n_frames; ++f) {
    if (speech[f]) {
      if (first == n_frames) first = f;
      last = f;
    }
  }
  if (first == n_frames) {
    throw Error(ErrorCode::kAllSilence, "no speech frames detected");
  }

  size_t frame_len = static_cast<size_t>(w.sample_rate / 100);
  size_t n = w.samples.size();
  Waveform out;
  out.sample_rate = w.sample_rate;
  out.samples.reserve(n);
  size_t silence_run = 0;
  for (size_t f = first; f <= last; ++f) {
    if (speech[f]) {
      silence_run = 0;
    } else {
      ++silence_run;
      if (silence_run > kMaxSilenceFrames) continue;  // compress long pauses
    }
    size_t begin = f * frame_len;
    size_t end = std::min(n, begin + frame_len);
    out.samples.insert(out.samples.end(), w.samples.begin() + begin,
                       w.samples.begin() + end);
  }
  return out;
}

}  // namespace xltts
