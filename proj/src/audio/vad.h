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

#ifndef XLTTS_AUDIO_VAD_H_
#define XLTTS_AUDIO_VAD_H_

#include "audio/wav.h"

namespace xltts {

// Energy + zero-crossing speech detector over 10 ms frames. Removes leading
// and trailing non-speech, and caps internal silences at 300 ms (the first
// 30 frames of a long run are kept). Aggressiveness 0..3 selects absolute
// energy thresholds, strictest at 3. Cuts happen only at whole-frame
// boundaries, which makes the operation idempotent.
//
// Throws AllSilence when no speech frame is found.
Waveform TrimSilence(const Waveform& w, int aggressiveness);

// Frame classification used by TrimSilence, exposed for inspection: one flag
// per 10 ms frame (a trailing partial frame counts as a frame).
std::vector<bool> DetectSpeechFrames(const Waveform& w, int aggressiveness);

}  // namespace xltts

#endif  // XLTTS_AUDIO_VAD_H_
