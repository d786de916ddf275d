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

#ifndef XLTTS_MODEL_EMOTION_ENCODER_H_
#define XLTTS_MODEL_EMOTION_ENCODER_H_

#include <string>
#include <vector>

#include "audio/wav.h"
#include "model/config.h"
#include "nn/layers.h"
#include "nn/registry.h"
#include "nn/transformer.h"

namespace xltts {

// Six-way emotion classifier over log-mel features with two parallel
// branches — a strided 2-D CNN and a transformer over frames — whose pooled
// outputs are fused into a penultimate vector. The emotion embedding is
// that penultimate vector, unit-normalized.
struct EmotionEncoderConfig {
  int d_emo = 256;
  int mel_bands = 80;
  std::vector<int> cnn_channels = {32, 64, 128};
  int t_channels = 128;
  int t_layers = 2;
  int heads = 2;
  int ffn = 256;
  double dropout = 0.1;

  std::string ToJson() const;
  static EmotionEncoderConfig FromJson(const std::string& json_text);
  static EmotionEncoderConfig Desk();
};

class EmotionEncoder {
 public:
  EmotionEncoder() = default;
  EmotionEncoder(ParamRegistry* reg, const EmotionEncoderConfig& cfg,
                 Rng* rng);

  // Clip must be at least 1 s; result is unit-norm [d_emo x 1].
  Tensor Embed(const Waveform& w) const;
  // Pre-normalization fusion vector, differentiable; classifier input.
  Tensor PenultimateMel(const Tensor& logmel, Rng* dropout_rng) const;
  Tensor EmbedMel(const Tensor& logmel, Rng* dropout_rng) const;
  // [kNumEmotions x 1] class scores from a penultimate vector.
  Tensor ClassLogits(const Tensor& penultimate) const;
  const EmotionEncoderConfig& config() const { return cfg_; }

 private:
  EmotionEncoderConfig cfg_;
  std::vector<Conv2dLayer> cnn_;
  Linear t_in_;
  TransformerStack stack_;
  Linear fuse_;
  Linear head_;
};

}  // namespace xltts

#endif  // XLTTS_MODEL_EMOTION_ENCODER_H_
