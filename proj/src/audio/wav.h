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

#ifndef XLTTS_AUDIO_WAV_H_
#define XLTTS_AUDIO_WAV_H_

#include <cstdint>
#include <string>
#include <vector>

namespace xltts {

// Everything downstream assumes this rate; files at other rates are
// resampled on load.
inline constexpr int kCanonicalSampleRate = 22050;

// Mono audio in [-1, 1].
struct Waveform {
  std::vector<double> samples;
  int sample_rate = kCanonicalSampleRate;

  double DurationSeconds() const {
    return static_cast<double>(samples.size()) / sample_rate;
  }
};

// Reads a RIFF/WAVE file (PCM 16/24/32-bit or IEEE float32, any channel
// count) and averages channels down to mono. Keeps the file's native rate.
Waveform ReadWav(const std::string& path);

// ReadWav + resample to the canonical rate.
Waveform ReadWavCanonical(const std::string& path);

// Writes mono 16-bit PCM.
void WriteWav(const std::string& path, const Waveform& w);

// Windowed-sinc resampler (anti-aliased when downsampling).
Waveform Resample(const Waveform& w, int target_rate);

}  // namespace xltts

#endif  // XLTTS_AUDIO_WAV_H_
