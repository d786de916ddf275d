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

#include "model/emotion_encoder.h"

#include <nlohmann/json.hpp>

#include "data/manifest.h"
#include "model/style_common.h"
#include "util/error.h"

namespace xltts {

using json = nlohmann::json;

std::string EmotionEncoderConfig::ToJson() const {
  json j;
  j["d_emo"] = d_emo;
  j["mel_bands"] = mel_bands;
  j["cnn_channels"] = cnn_channels;
  j["t_channels"] = t_channels;
  j["t_layers"] = t_layers;
  j["heads"] = heads;
  j["ffn"] = ffn;
  j["dropout"] = dropout;
  return j.dump();
}

EmotionEncoderConfig EmotionEncoderConfig::FromJson(
    const std::string& json_text) {
  EmotionEncoderConfig c;
  try {
    json j = json::parse(json_text);
    j.at("d_emo").get_to(c.d_emo);
    j.at("mel_bands").get_to(c.mel_bands);
    j.at("cnn_channels").get_to(c.cnn_channels);
    j.at("t_channels").get_to(c.t_channels);
    j.at("t_layers").get_to(c.t_layers);
    j.at("heads").get_to(c.heads);
    j.at("ffn").get_to(c.ffn);
    j.at("dropout").get_to(c.dropout);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kInvalidArgument,
                std::string("emotion encoder config: ") + e.what());
  }
  return c;
}

EmotionEncoderConfig EmotionEncoderConfig::Desk() {
  EmotionEncoderConfig c;
  c.d_emo = 32;
  c.cnn_channels = {4, 8, 16};
  c.t_channels = 32;
  c.ffn = 64;
  return c;
}

EmotionEncoder::EmotionEncoder(ParamRegistry* reg,
                               const EmotionEncoderConfig& cfg, Rng* rng)
    : cfg_(cfg) {
  int in = 1;
  for (size_t i = 0; i < cfg.cnn_channels.size(); ++i) {
    cnn_.push_back(Conv2dLayer(reg, "emoenc.c" + std::to_string(i), in,
                               cfg.cnn_channels[i], 3, 3, 2, 2, 1, 1, true,
                               rng));
    in = cfg.cnn_channels[i];
  }
  t_in_ = Linear(reg, "emoenc.tin", cfg.mel_bands, cfg.t_channels, true, rng);
  TransformerConfig tc;
  tc.channels = cfg.t_channels;
  tc.ffn_channels = cfg.ffn;
  tc.heads = cfg.heads;
  tc.layers = cfg.t_layers;
  tc.dropout = cfg.dropout;
  stack_ = TransformerStack(reg, "emoenc.tr", tc, rng);
  fuse_ = Linear(reg, "emoenc.fuse", in + cfg.t_channels, cfg.d_emo, true,
                 rng);
  head_ = Linear(reg, "emoenc.head", cfg.d_emo, kNumEmotions, true, rng);
}

Tensor EmotionEncoder::PenultimateMel(const Tensor& logmel,
                                      Rng* dropout_rng) const {
  if (!logmel.defined() || logmel.rows() != cfg_.mel_bands ||
      logmel.cols() < 1) {
    throw Error(ErrorCode::kDimensionMismatch,
                "expected [" + std::to_string(cfg_.mel_bands) + " x T] mel");
  }
  // CNN branch: time-by-mel image, globally mean-pooled.
  int h = static_cast<int>(logmel.cols());
  int w = cfg_.mel_bands;
  Tensor x = Reshape(logmel, 1, logmel.rows() * logmel.cols());
  for (const Conv2dLayer& conv : cnn_) {
    x = Relu(conv.Forward(x, h, w));
    h = conv.OutH(h);
    w = conv.OutW(w);
  }
  Tensor cnn_vec = MeanCols(x);

  // Transformer branch over frames, mean-pooled over time.
  Tensor t = stack_.Forward(t_in_.Forward(logmel), dropout_rng);
  Tensor t_vec = MeanCols(t);

  return fuse_.Forward(ConcatRows(cnn_vec, t_vec));
}

Tensor EmotionEncoder::EmbedMel(const Tensor& logmel, Rng* dropout_rng) const {
  return UnitNormVec(PenultimateMel(logmel, dropout_rng));
}

Tensor EmotionEncoder::Embed(const Waveform& w) const {
  CheckMinDuration(w, 1.0);
  return EmbedMel(LogMelConst(w), nullptr);
}

Tensor EmotionEncoder::ClassLogits(const Tensor& penultimate) const {
  if (!penultimate.defined() || penultimate.rows() != cfg_.d_emo) {
    throw Error(ErrorCode::kDimensionMismatch,
                "penultimate must have d_emo rows");
  }
  return head_.Forward(penultimate);
}

}  // namespace xltts
