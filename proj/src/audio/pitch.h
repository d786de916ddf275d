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

#ifndef XLTTS_AUDIO_PITCH_H_
#define XLTTS_AUDIO_PITCH_H_

#include <vector>

#include "audio/wav.h"

namespace xltts {

// Frame-wise fundamental frequency track. f0[i] is in Hz, 0 means the frame
// was judged unvoiced. times[i] is the frame center in seconds.
struct PitchContour {
  std::vector<double> times;
  std::vector<double> f0;
};

// Autocorrelation pitch tracker: 40 ms analysis frames every 10 ms,
// search range 50-600 Hz, normalized autocorrelation peak with parabolic
// refinement, voicing decision at 0.3 peak correlation.
PitchContour ExtractPitch(const Waveform& w);

// Mean of voiced f0 values; 0 if no frame is voiced.
double MeanPitchHz(const PitchContour& contour);

}  // namespace xltts

#endif  // XLTTS_AUDIO_PITCH_H_
