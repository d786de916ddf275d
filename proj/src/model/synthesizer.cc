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

#include "model/synthesizer.h"

#include <numeric>
#include <utility>

#include "model/mas.h"
#include "util/error.h"

namespace xltts {

namespace {

void CheckReference(const Waveform& w, const char* which) {
  if (w.DurationSeconds() < 1.0) {
    throw Error(ErrorCode::kReferenceTooShort,
                std::string(which) + " reference is " +
                    std::to_string(w.DurationSeconds()) +
                    " s, need at least 1.0");
  }
}

}  // namespace

Synthesizer::Synthesizer(const ModelConfig& cfg, const Vocab& vocab,
                         const SpeakerEncoderConfig& spk_cfg,
                         const EmotionEncoderConfig& emo_cfg,
                         const ContentEncoderConfig& content_cfg,
                         uint64_t seed)
    : cfg_(cfg),
      vocab_(vocab),
      spk_cfg_(spk_cfg),
      emo_cfg_(emo_cfg),
      content_cfg_(content_cfg) {
  Build(seed);
}

void Synthesizer::Build(uint64_t seed) {
  if (spk_cfg_.d_spk != cfg_.d_spk) {
    throw Error(ErrorCode::kIncompatibleDimensions,
                "speaker encoder emits " + std::to_string(spk_cfg_.d_spk) +
                    " dims, backbone expects " + std::to_string(cfg_.d_spk));
  }
  if (emo_cfg_.d_emo != cfg_.d_emo) {
    throw Error(ErrorCode::kIncompatibleDimensions,
                "emotion encoder emits " + std::to_string(emo_cfg_.d_emo) +
                    " dims, backbone expects " + std::to_string(cfg_.d_emo));
  }
  if (content_cfg_.d_content != cfg_.d_content) {
    throw Error(ErrorCode::kIncompatibleDimensions,
                "content encoder emits " +
                    std::to_string(content_cfg_.d_content) +
                    " dims, backbone expects " +
                    std::to_string(cfg_.d_content));
  }
  tts_reg_ = std::make_unique<ParamRegistry>();
  spk_reg_ = std::make_unique<ParamRegistry>();
  emo_reg_ = std::make_unique<ParamRegistry>();
  Rng rng(seed);
  text_enc_ = TextEncoder(tts_reg_.get(), cfg_, vocab_.size(), &rng);
  posterior_ = PosteriorEncoder(tts_reg_.get(), cfg_, &rng);
  flow_ = FlowDecoder(tts_reg_.get(), cfg_, &rng);
  sdp_ = StochasticDurationPredictor(tts_reg_.get(), cfg_, &rng);
  gen_ = Generator(tts_reg_.get(), cfg_, &rng);
  g_spk_ = Linear(tts_reg_.get(), "g.spk", cfg_.d_spk, cfg_.gin, true, &rng);
  g_emo_ = Linear(tts_reg_.get(), "g.emo", cfg_.d_emo, cfg_.gin, true, &rng);
  spk_enc_ = SpeakerEncoder(spk_reg_.get(), spk_cfg_, &rng);
  emo_enc_ = EmotionEncoder(emo_reg_.get(), emo_cfg_, &rng);
  content_enc_ = ContentEncoder(content_cfg_);
}

Tensor Synthesizer::StyleVector(const Tensor& spk, const Tensor& emo) const {
  return Add(g_spk_.Forward(spk), g_emo_.Forward(emo));
}

Tensor Synthesizer::PosteriorStyle(const Tensor& spk,
                                   const Tensor& emo) const {
  if (cfg_.posterior_use_emotion) return StyleVector(spk, emo);
  return g_spk_.Forward(spk);
}

Waveform Synthesizer::Synthesize(const SynthesisRequest& req) const {
  CheckReference(req.speaker_ref, "speaker");
  CheckReference(req.emotion_ref, "emotion");
  TextSequence seq = EncodeText(req.text, req.lang, vocab_);

  // Style vectors are plain values at synthesis time.
  Tensor spk = Tensor::Constant(spk_enc_.Embed(req.speaker_ref).value());
  Tensor emo = Tensor::Constant(emo_enc_.Embed(req.emotion_ref).value());
  Tensor g = StyleVector(spk, emo);

  Rng rng(req.seed);
  PriorStats prior = text_enc_.Forward(seq, spk, emo, nullptr);
  std::vector<int> durations = sdp_.Sample(
      prior.hidden.value(), g.value(), req.sdp_noise_scale, req.length_scale,
      &rng);
  Tensor mu = RepeatCols(prior.mu, durations);
  Tensor log_sigma = RepeatCols(prior.log_sigma, durations);

  const Eigen::Index frames =
      std::accumulate(durations.begin(), durations.end(), 0);
  Mat eps(cfg_.d_z, frames);
  for (Eigen::Index c = 0; c < frames; ++c) {
    for (Eigen::Index r = 0; r < cfg_.d_z; ++r) {
      eps(r, c) = rng.Normal() * req.noise_scale;
    }
  }
  Tensor z_p = Add(mu, Mul(Exp(log_sigma), Tensor::Constant(eps)));
  Tensor z = flow_.Inverse(z_p, g);
  Tensor wav = gen_.Forward(z, g);

  Waveform out;
  out.sample_rate = kCanonicalSampleRate;
  const Mat& row = wav.value();
  out.samples.assign(row.data(), row.data() + row.cols());
  return out;
}

void Synthesizer::SaveInto(Checkpoint* ckpt, int64_t step) const {
  ckpt->meta["model_config"] = nlohmann::json::parse(cfg_.ToJson());
  ckpt->meta["spk_config"] = nlohmann::json::parse(spk_cfg_.ToJson());
  ckpt->meta["emo_config"] = nlohmann::json::parse(emo_cfg_.ToJson());
  ckpt->meta["content_config"] =
      nlohmann::json::parse(content_cfg_.ToJson());
  ckpt->meta["vocab_hash"] = vocab_.Hash();
  ckpt->meta["step"] = step;
  ckpt->blobs["vocab"] = vocab_.ToJson();
  tts_reg_->SaveTensors(&ckpt->tensors, "model.");
  spk_reg_->SaveTensors(&ckpt->tensors, "model.");
  emo_reg_->SaveTensors(&ckpt->tensors, "model.");
}

Synthesizer Synthesizer::LoadFrom(const Checkpoint& ckpt) {
  ModelConfig cfg;
  SpeakerEncoderConfig spk_cfg;
  EmotionEncoderConfig emo_cfg;
  ContentEncoderConfig content_cfg;
  Vocab vocab;
  try {
    cfg = ModelConfig::FromJson(ckpt.meta.at("model_config").dump());
    spk_cfg =
        SpeakerEncoderConfig::FromJson(ckpt.meta.at("spk_config").dump());
    emo_cfg =
        EmotionEncoderConfig::FromJson(ckpt.meta.at("emo_config").dump());
    content_cfg = ContentEncoderConfig::FromJson(
        ckpt.meta.at("content_config").dump());
    vocab = Vocab::FromJson(ckpt.blobs.at("vocab"));
    if (ckpt.meta.at("vocab_hash").get<uint64_t>() != vocab.Hash()) {
      throw Error(ErrorCode::kCorruptCheckpoint,
                  "vocabulary hash does not match the stored vocabulary");
    }
  } catch (const Error&) {
    throw;
  } catch (const std::exception& e) {
    throw Error(ErrorCode::kCorruptCheckpoint,
                std::string("checkpoint metadata: ") + e.what());
  }

  Synthesizer s(cfg, vocab, spk_cfg, emo_cfg, content_cfg, /*seed=*/0);
  s.tts_reg_->LoadTensors(ckpt.tensors, "model.");
  s.spk_reg_->LoadTensors(ckpt.tensors, "model.");
  s.emo_reg_->LoadTensors(ckpt.tensors, "model.");
  return s;
}

}  // namespace xltts
