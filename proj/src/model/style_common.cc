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

#include "model/style_common.h"

#include <string>

#include "audio/stft.h"
#include "util/error.h"

namespace xltts {

Tensor UnitNormVec(const Tensor& v) {
  Tensor norm = Sqrt(ClampMin(SumAll(Square(v)), 1e-24));
  return ScaleByScalar(v, Div(Tensor::Scalar(1.0), norm));
}

Tensor LogMelConst(const Waveform& w) {
  Spectrogram mel = MelSpectrogram(w);
  Mat logmel = mel.magnitudes.array().max(1e-5).log().matrix();
  return Tensor::Constant(std::move(logmel));
}

void CheckMinDuration(const Waveform& w, double min_seconds) {
  if (w.DurationSeconds() < min_seconds) {
    throw Error(ErrorCode::kTooShort,
                "clip is " + std::to_string(w.DurationSeconds()) +
                    " s, need at least " + std::to_string(min_seconds));
  }
}

}  // namespace xltts
