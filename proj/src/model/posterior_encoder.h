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

#ifndef XLTTS_MODEL_POSTERIOR_ENCODER_H_
#define XLTTS_MODEL_POSTERIOR_ENCODER_H_

#include "audio/stft.h"
#include "model/config.h"
#include "nn/layers.h"
#include "nn/registry.h"
#include "nn/wavenet.h"

namespace xltts {

// q(z | linear spectrogram, style): a dilated-conv stack over the
// spectrogram with global style conditioning, projected to per-frame
// Gaussian stats; z is the reparameterized sample.
struct LatentSequence {
  Tensor z;          // [d_z x T]
  Tensor mu;         // [d_z x T]
  Tensor log_sigma;  // [d_z x T]
};

class PosteriorEncoder {
 public:
  PosteriorEncoder() = default;
  PosteriorEncoder(ParamRegistry* reg, const ModelConfig& cfg, Rng* rng);
  // noise_rng == nullptr pins epsilon to zero, so z == mu exactly.
  LatentSequence Forward(const Spectrogram& spec, const Tensor& g,
                         Rng* noise_rng, Rng* dropout_rng) const;

 private:
  ModelConfig cfg_;
  Linear pre_;
  WaveNetStack wn_;
  Linear proj_;
};

}  // namespace xltts

#endif  // XLTTS_MODEL_POSTERIOR_ENCODER_H_
