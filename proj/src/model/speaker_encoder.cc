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

#include "model/speaker_encoder.h"

#include <nlohmann/json.hpp>

#include "model/style_common.h"
#include "util/error.h"

namespace xltts {

using json = nlohmann::json;

std::string SpeakerEncoderConfig::ToJson() const {
  json j;
  j["d_spk"] = d_spk;
  j["mel_bands"] = mel_bands;
  j["channels"] = channels;
  j["num_speakers"] = num_speakers;
  j["margin"] = margin;
  j["scale"] = scale;
  return j.dump();
}

SpeakerEncoderConfig SpeakerEncoderConfig::FromJson(
    const std::string& json_text) {
  SpeakerEncoderConfig c;
  try {
    json j = json::parse(json_text);
    j.at("d_spk").get_to(c.d_spk);
    j.at("mel_bands").get_to(c.mel_bands);
    j.at("channels").get_to(c.channels);
    j.at("num_speakers").get_to(c.num_speakers);
    j.at("margin").get_to(c.margin);
    j.at("scale").get_to(c.scale);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kInvalidArgument,
                std::string("speaker encoder config: ") + e.what());
  }
  return c;
}

SpeakerEncoderConfig SpeakerEncoderConfig::Desk() {
  SpeakerEncoderConfig c;
  c.d_spk = 64;
  c.channels = {8, 16, 32, 64};
  return c;
}

SpeakerEncoder::SpeakerEncoder(ParamRegistry* reg,
                               const SpeakerEncoderConfig& cfg, Rng* rng)
    : cfg_(cfg) {
  int in = 1;
  int w = cfg.mel_bands;
  for (size_t i = 0; i < cfg.channels.size(); ++i) {
    const int out = cfg.channels[i];
    const std::string p = "spkenc.s" + std::to_string(i);
    StageBlock blk;
    blk.down = Conv2dLayer(reg, p + ".down", in, out, 3, 3, 2, 2, 1, 1, true,
                           rng);
    blk.c1 = Conv2dLayer(reg, p + ".c1", out, out, 3, 3, 1, 1, 1, 1, true,
                         rng);
    blk.c2 = Conv2dLayer(reg, p + ".c2", out, out, 3, 3, 1, 1, 1, 1, true,
                         rng);
    w = blk.down.OutW(w);
    stages_.push_back(std::move(blk));
    in = out;
  }
  out_ = Linear(reg, "spkenc.out", 2 * in * w, cfg.d_spk, true, rng);
  head_ = reg->AddNormal("spkenc.head", cfg.num_speakers, cfg.d_spk, 0.05,
                         rng);
}

Tensor SpeakerEncoder::EmbedMel(const Tensor& logmel) const {
  if (!logmel.defined() || logmel.rows() != cfg_.mel_bands ||
      logmel.cols() < 1) {
    throw Error(ErrorCode::kDimensionMismatch,
                "expected [" + std::to_string(cfg_.mel_bands) + " x T] mel");
  }
  // The column-major [mel x T] buffer reads directly as a T-by-mel image
  // (time as height) in the 2-D convolution's spatial layout.
  int h = static_cast<int>(logmel.cols());
  int w = cfg_.mel_bands;
  Tensor x = Reshape(logmel, 1, logmel.rows() * logmel.cols());
  for (const StageBlock& blk : stages_) {
    x = Relu(blk.down.Forward(x, h, w));
    h = blk.down.OutH(h);
    w = blk.down.OutW(w);
    Tensor r = blk.c2.Forward(Relu(blk.c1.Forward(Relu(x), h, w)), h, w);
    x = Add(x, r);
  }

  // Mean and standard deviation over time, per (channel, mel-band) cell.
  Tensor mean, sd;
  for (int col = 0; col < w; ++col) {
    std::vector<int> idx(h);
    for (int row = 0; row < h; ++row) idx[row] = row * w + col;
    Tensor slice = GatherCols(x, idx);  // [C x H]
    Tensor mu = MeanCols(slice);
    Tensor var = Sub(MeanCols(Square(slice)), Square(mu));
    Tensor s = Sqrt(ClampMin(var, 1e-8));
    mean = mean.defined() ? ConcatRows(mean, mu) : mu;
    sd = sd.defined() ? ConcatRows(sd, s) : s;
  }
  return UnitNormVec(out_.Forward(ConcatRows(mean, sd)));
}

Tensor SpeakerEncoder::Embed(const Waveform& w) const {
  CheckMinDuration(w, 1.0);
  return EmbedMel(LogMelConst(w));
}

Tensor SpeakerEncoder::CosineLogits(const Tensor& embedding) const {
  if (!embedding.defined() || embedding.rows() != cfg_.d_spk ||
      embedding.cols() != 1) {
    throw Error(ErrorCode::kDimensionMismatch,
                "embedding must be [d_spk x 1]");
  }
  Tensor row_norms = Sqrt(ClampMin(SumCols(Square(head_)), 1e-24));
  Tensor inv = Div(Tensor::Constant(Mat::Ones(row_norms.rows(), 1)),
                   row_norms);
  Tensor w_norm = MulColVec(head_, inv);
  return MatMul(w_norm, UnitNormVec(embedding));
}

}  // namespace xltts
