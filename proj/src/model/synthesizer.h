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

#ifndef XLTTS_MODEL_SYNTHESIZER_H_
#define XLTTS_MODEL_SYNTHESIZER_H_

#include <cstdint>
#include <memory>
#include <string>

#include "audio/wav.h"
#include "core/checkpoint.h"
#include "model/config.h"
#include "model/content_encoder.h"
#include "model/emotion_encoder.h"
#include "model/flow.h"
#include "model/generator.h"
#include "model/posterior_encoder.h"
#include "model/sdp.h"
#include "model/speaker_encoder.h"
#include "model/text_encoder.h"
#include "text/vocab.h"

namespace xltts {

struct SynthesisRequest {
  std::string text;
  std::string lang;
  Waveform speaker_ref;
  Waveform emotion_ref;
  uint64_t seed = 0;
  double noise_scale = 0.667;
  double sdp_noise_scale = 0.8;
  double length_scale = 1.0;
};

// The full voice: backbone modules plus the style encoders, bundled so a
// single checkpoint file is enough to synthesize. Backbone parameters live
// in one registry (the one training optimizes); each style encoder keeps
// its own, and the content featurizer has no parameters at all.
class Synthesizer {
 public:
  Synthesizer(const ModelConfig& cfg, const Vocab& vocab,
              const SpeakerEncoderConfig& spk_cfg,
              const EmotionEncoderConfig& emo_cfg,
              const ContentEncoderConfig& content_cfg, uint64_t seed);
  Synthesizer(Synthesizer&&) = default;
  Synthesizer& operator=(Synthesizer&&) = default;

  // Text + two reference clips -> waveform. References must be >= 1 s.
  // Deterministic for a fixed request.
  Waveform Synthesize(const SynthesisRequest& req) const;

  // Full model state; `step` is recorded in the metadata block.
  void SaveInto(Checkpoint* ckpt, int64_t step) const;
  static Synthesizer LoadFrom(const Checkpoint& ckpt);

  // Shared style vector g = proj(spk) + proj(emo).
  Tensor StyleVector(const Tensor& spk, const Tensor& emo) const;
  // Style seen by the posterior encoder; drops the emotion half when the
  // config says so.
  Tensor PosteriorStyle(const Tensor& spk, const Tensor& emo) const;

  const ModelConfig& config() const { return cfg_; }
  const Vocab& vocab() const { return vocab_; }
  ParamRegistry* tts_registry() { return tts_reg_.get(); }
  ParamRegistry* spk_registry() { return spk_reg_.get(); }
  ParamRegistry* emo_registry() { return emo_reg_.get(); }
  const TextEncoder& text_encoder() const { return text_enc_; }
  const PosteriorEncoder& posterior() const { return posterior_; }
  const FlowDecoder& flow() const { return flow_; }
  const StochasticDurationPredictor& sdp() const { return sdp_; }
  const Generator& generator() const { return gen_; }
  const SpeakerEncoder& speaker_encoder() const { return spk_enc_; }
  const EmotionEncoder& emotion_encoder() const { return emo_enc_; }
  const ContentEncoder& content_encoder() const { return content_enc_; }

 private:
  void Build(uint64_t seed);

  ModelConfig cfg_;
  Vocab vocab_;
  SpeakerEncoderConfig spk_cfg_;
  EmotionEncoderConfig emo_cfg_;
  ContentEncoderConfig content_cfg_;
  std::unique_ptr<ParamRegistry> tts_reg_;
  std::unique_ptr<ParamRegistry> spk_reg_;
  std::unique_ptr<ParamRegistry> emo_reg_;
  TextEncoder text_enc_;
  PosteriorEncoder posterior_;
  FlowDecoder flow_;
  StochasticDurationPredictor sdp_;
  Generator gen_;
  Linear g_spk_;
  Linear g_emo_;
  SpeakerEncoder spk_enc_;
  EmotionEncoder emo_enc_;
  ContentEncoder content_enc_;
};

}  // namespace xltts

#endif  // XLTTS_MODEL_SYNTHESIZER_H_
