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

#include "nn/transformer.h"

#include <cmath>

#include "util/error.h"

namespace xltts {

Mat SinusoidalPositions(int channels, int length) {
  if (channels % 2 != 0) {
    throw Error(ErrorCode::kInvalidArgument, "position table needs even dim");
  }
  Mat pe(channels, length);
  int half = channels / 2;
  for (int t = 0; t < length; ++t) {
    for (int i = 0; i < half; ++i) {
      double rate = std::pow(10000.0, -2.0 * i / channels);
      pe(2 * i, t) = std::sin(t * rate);
      pe(2 * i + 1, t) = std::cos(t * rate);
    }
  }
  return pe;
}

MultiHeadSelfAttention::MultiHeadSelfAttention(ParamRegistry* reg,
                                               const std::string& prefix,
                                               int channels, int heads,
                                               Rng* rng)
    : heads_(heads) {
  if (channels % heads != 0) {
    throw Error(ErrorCode::kInvalidArgument, "channels must divide by heads");
  }
  q_ = Linear(reg, prefix + ".q", channels, channels, true, rng);
  k_ = Linear(reg, prefix + ".k", channels, channels, true, rng);
  v_ = Linear(reg, prefix + ".v", channels, channels, true, rng);
  out_ = Linear(reg, prefix + ".o", channels, channels, true, rng);
}

Tensor MultiHeadSelfAttention::Forward(const Tensor& x) const {
  Tensor q = q_.Forward(x);
  Tensor k = k_.Forward(x);
  Tensor v = v_.Forward(x);
  Eigen::Index dh = x.rows() / heads_;
  double scale = 1.0 / std::sqrt(static_cast<double>(dh));
  Tensor merged;
  for (int h = 0; h < heads_; ++h) {
    Tensor qh = SliceRows(q, h * dh, dh);
    Tensor kh = SliceRows(k, h * dh, dh);
    Tensor vh = SliceRows(v, h * dh, dh);
    // scores(i, j) = k_i . q_j; softmax over keys i for each query j.
    Tensor scores = MulScalar(MatMulTA(kh, qh), scale);
    Tensor attn = SoftmaxCols(scores);
    Tensor oh = MatMul(vh, attn);
    merged = h == 0 ? oh : ConcatRows(merged, oh);
  }
  return out_.Forward(merged);
}

TransformerBlock::TransformerBlock(ParamRegistry* reg,
                                   const std::string& prefix,
                                   const TransformerConfig& cfg, Rng* rng)
    : dropout_(cfg.dropout) {
  attn_ = MultiHeadSelfAttention(reg, prefix + ".attn", cfg.channels,
                                 cfg.heads, rng);
  norm1_ = LayerNormChannels(reg, prefix + ".ln1", cfg.channels);
  norm2_ = LayerNormChannels(reg, prefix + ".ln2", cfg.channels);
  Conv1dSpec spec;
  spec.kernel = cfg.ffn_kernel;
  spec.pad_left = spec.pad_right = SamePad(cfg.ffn_kernel, 1);
  ffn1_ = Conv1dLayer(reg, prefix + ".ffn1", cfg.channels, cfg.ffn_channels,
                      spec, true, rng);
  ffn2_ = Conv1dLayer(reg, prefix + ".ffn2", cfg.ffn_channels, cfg.channels,
                      spec, true, rng);
}

Tensor TransformerBlock::Forward(const Tensor& x, Rng* dropout_rng) const {
  Tensor y = attn_.Forward(x);
  if (dropout_rng != nullptr) y = Dropout(y, dropout_, dropout_rng);
  Tensor h = norm1_.Forward(Add(x, y));
  Tensor f = ffn2_.Forward(Relu(ffn1_.Forward(h)));
  if (dropout_rng != nullptr) f = Dropout(f, dropout_, dropout_rng);
  return norm2_.Forward(Add(h, f));
}

TransformerStack::TransformerStack(ParamRegistry* reg,
                                   const std::string& prefix,
                                   const TransformerConfig& cfg, Rng* rng)
    : cfg_(cfg) {
  for (int i = 0; i < cfg.layers; ++i) {
    blocks_.emplace_back(reg, prefix + ".blk" + std::to_string(i), cfg, rng);
  }
}

Tensor TransformerStack::Forward(const Tensor& x, Rng* dropout_rng) const {
  Tensor h = Add(x, Tensor::Constant(SinusoidalPositions(
                       cfg_.channels, static_cast<int>(x.cols()))));
  for (const TransformerBlock& blk : blocks_) {
    h = blk.Forward(h, dropout_rng);
  }
  return h;
}

}  // namespace xltts
