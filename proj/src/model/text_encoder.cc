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

#include "model/text_encoder.h"

#include <cmath>

#include "util/error.h"

namespace xltts {

TextEncoder::TextEncoder(ParamRegistry* reg, const ModelConfig& cfg,
                         int vocab_size, Rng* rng)
    : cfg_(cfg) {
  char_emb_ = Embedding(reg, "txt.char", vocab_size, cfg.char_embed,
                        1.0 / std::sqrt(static_cast<double>(cfg.char_embed)),
                        rng);
  lang_emb_ = Embedding(reg, "txt.lang", kNumLanguages, cfg.lang_embed,
                        1.0 / std::sqrt(static_cast<double>(cfg.lang_embed)),
                        rng);
  spk_proj_ = Linear(reg, "txt.spk", cfg.d_spk, cfg.hidden(), true, rng);
  emo_proj_ = Linear(reg, "txt.emo", cfg.d_emo, cfg.hidden(), true, rng);
  TransformerConfig tcfg;
  tcfg.channels = cfg.hidden();
  tcfg.ffn_channels = cfg.ffn;
  tcfg.heads = cfg.heads;
  tcfg.layers = cfg.text_layers;
  tcfg.dropout = cfg.dropout;
  stack_ = TransformerStack(reg, "txt.enc", tcfg, rng);
  stats_proj_ = Linear(reg, "txt.stats", cfg.hidden(), 2 * cfg.d_z, true,
                       rng);
}

PriorStats TextEncoder::Forward(const TextSequence& seq, const Tensor& spk,
                                const Tensor& emo, Rng* dropout_rng) const {
  if (seq.ids.empty()) {
    throw Error(ErrorCode::kEmptyText, "no ids to encode");
  }
  if (spk.rows() != cfg_.d_spk || spk.cols() != 1 ||
      emo.rows() != cfg_.d_emo || emo.cols() != 1) {
    throw Error(ErrorCode::kDimensionMismatch,
                "style vectors do not match d_spk/d_emo");
  }
  size_t n = seq.ids.size();
  Tensor chars = char_emb_.Forward(seq.ids);
  Tensor lang =
      lang_emb_.Forward(std::vector<int>(n, seq.lang_id));
  Tensor x = ConcatRows(chars, lang);
  Tensor style = Add(spk_proj_.Forward(spk), emo_proj_.Forward(emo));
  x = AddColVec(x, style);
  Tensor h = stack_.Forward(x, dropout_rng);
  Tensor stats = stats_proj_.Forward(h);
  PriorStats out;
  out.hidden = h;
  out.mu = SliceRows(stats, 0, cfg_.d_z);
  out.log_sigma = SliceRows(stats, cfg_.d_z, cfg_.d_z);
  return out;
}

}  // namespace xltts
