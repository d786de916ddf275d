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

#ifndef XLTTS_MODEL_TEXT_ENCODER_H_
#define XLTTS_MODEL_TEXT_ENCODER_H_

#include "model/config.h"
#include "nn/layers.h"
#include "nn/registry.h"
#include "nn/transformer.h"
#include "text/vocab.h"

namespace xltts {

// Frame-rate Gaussian prior over latents, one (mu, log sigma) pair per
// character. The encoder input is the character embedding concatenated with
// a language embedding; projected speaker and emotion vectors are
// broadcast-added before the transformer stack.
struct PriorStats {
  Tensor hidden;     // [hidden x L]
  Tensor mu;         // [d_z x L]
  Tensor log_sigma;  // [d_z x L]
};

class TextEncoder {
 public:
  TextEncoder() = default;
  TextEncoder(ParamRegistry* reg, const ModelConfig& cfg, int vocab_size,
              Rng* rng);
  // spk [d_spk x 1], emo [d_emo x 1].
  PriorStats Forward(const TextSequence& seq, const Tensor& spk,
                     const Tensor& emo, Rng* dropout_rng) const;
  int vocab_size() const { return char_emb_.num(); }

 private:
  ModelConfig cfg_;
  Embedding char_emb_;
  Embedding lang_emb_;
  Linear spk_proj_, emo_proj_;
  TransformerStack stack_;
  Linear stats_proj_;
};

}  // namespace xltts

#endif  // XLTTS_MODEL_TEXT_ENCODER_H_
