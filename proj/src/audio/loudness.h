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

#ifndef XLTTS_AUDIO_LOUDNESS_H_
#define XLTTS_AUDIO_LOUDNESS_H_

#include <array>
#include <vector>

#include "audio/wav.h"

namespace xltts {

// Direct-form-II-transposed biquad section, a0 normalized to 1.
struct Biquad {
  double b0, b1, b2, a1, a2;

  std::vector<double> Filter(const std::vector<double>& x) const;
  // |H(e^{j 2 pi f / fs})|, for response checks.
  double MagnitudeAt(double freq_hz, double sample_rate) const;
};

// The two K-weighting stages (head-related shelf, then low-cut), designed
// from their analog prototypes at the given rate.
std::array<Biquad, 2> KWeightingFilters(double sample_rate);

// Integrated loudness: K-weighting, 400 ms blocks with 75% overlap, -70 LUFS
// absolute gate then -10 LU relative gate. Throws ImmeasurableLoudness when
// the signal is shorter than one block or every block is gated out.
double MeasureLoudnessLufs(const Waveform& w);

// Scales the waveform so its integrated loudness hits target_lufs, then hard
// clips to [-1, 1]. The number of clipped samples is reported through
// clipped_count when non-null.
Waveform NormalizeLoudness(const Waveform& w, double target_lufs,
                           int* clipped_count = nullptr);

}  // namespace xltts

#endif  // XLTTS_AUDIO_LOUDNESS_H_
