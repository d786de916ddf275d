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

#ifndef XLTTS_MODEL_SPEAKER_ENCODER_H_
#define XLTTS_MODEL_SPEAKER_ENCODER_H_

#include <string>
#include <vector>

#include "audio/wav.h"
#include "model/config.h"
#include "nn/layers.h"
#include "nn/registry.h"

namespace xltts {

// Compact residual 2-D CNN over log-mel frames with mean+std temporal
// pooling, trained with an additive-margin cosine classifier over speaker
// identities. The embedding is the unit-normalized pooled projection.
struct SpeakerEncoderConfig {
  int d_spk = 512;
  int mel_bands = 80;
  std::vector<int> channels = {32, 64, 128, 256};
  int num_speakers = 4;  // classifier head width, training only
  double margin = 0.2;
  double scale = 30.0;

  std::string ToJson() const;
  static SpeakerEncoderConfig FromJson(const std::string& json_text);
  static SpeakerEncoderConfig Desk();
};

class SpeakerEncoder {
 public:
  SpeakerEncoder() = default;
  SpeakerEncoder(ParamRegistry* reg, const SpeakerEncoderConfig& cfg,
                 Rng* rng);

  // Clip must be at least 1 s; result is unit-norm [d_spk x 1].
  Tensor Embed(const Waveform& w) const;
  // Differentiable trunk on a log-mel [mel_bands x T] input.
  Tensor EmbedMel(const Tensor& logmel) const;
  // Cosine similarities against the row-normalized class weights,
  // [num_speakers x 1]; margin/scale handling lives with the loss.
  Tensor CosineLogits(const Tensor& embedding) const;
  const SpeakerEncoderConfig& config() const { return cfg_; }

 private:
  struct StageBlock {
    Conv2dLayer down;
    Conv2dLayer c1;
    Conv2dLayer c2;
  };

  SpeakerEncoderConfig cfg_;
  std::vector<StageBlock> stages_;
  Linear out_;
  Tensor head_;  // [num_speakers x d_spk]
};

}  // namespace xltts

#endif  // XLTTS_MODEL_SPEAKER_ENCODER_H_
