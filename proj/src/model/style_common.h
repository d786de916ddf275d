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

#ifndef XLTTS_MODEL_STYLE_COMMON_H_
#define XLTTS_MODEL_STYLE_COMMON_H_

#include "audio/wav.h"
#include "core/tensor.h"

namespace xltts {

// v / ||v||_2 for a single [d x 1] vector, with a tiny floor on the norm.
Tensor UnitNormVec(const Tensor& v);

// Log-mel features of a waveform as a graph constant, [mel_bands x T].
Tensor LogMelConst(const Waveform& w);

// Throws kTooShort when the clip is under min_seconds.
void CheckMinDuration(const Waveform& w, double min_seconds);

}  // namespace xltts

#endif  // XLTTS_MODEL_STYLE_COMMON_H_
