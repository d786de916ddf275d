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

#ifndef XLTTS_NN_TRANSFORMER_H_
#define XLTTS_NN_TRANSFORMER_H_

#include <string>
#include <vector>

#include "nn/layers.h"
#include "nn/registry.h"

namespace xltts {

struct TransformerConfig {
  int channels = 0;
  int ffn_channels = 0;
  int heads = 2;
  int layers = 0;
  int ffn_kernel = 3;
  double dropout = 0.1;
};

// Standard sin/cos position table, [channels x length]; channels must be
// even.
Mat SinusoidalPositions(int channels, int length);

class MultiHeadSelfAttention {
 public:
  MultiHeadSelfAttention() = default;
  MultiHeadSelfAttention(ParamRegistry* reg, const std::string& prefix,
                         int channels, int heads, Rng* rng);
  // x [channels x L]; full (unmasked) self-attention over the L positions.
  Tensor Forward(const Tensor& x) const;

 private:
  int heads_ = 0;
  Linear q_, k_, v_, out_;
};

// Post-norm block: x = LN(x + Attn(x)); x = LN(x + FFN(x)). The FFN is a
// pair of kernel-width convolutions with a ReLU between.
class TransformerBlock {
 public:
  TransformerBlock() = default;
  TransformerBlock(ParamRegistry* reg, const std::string& prefix,
                   const TransformerConfig& cfg, Rng* rng);
  // dropout_rng == nullptr means inference (no dropout).
  Tensor Forward(const Tensor& x, Rng* dropout_rng) const;

 private:
  double dropout_ = 0.0;
  MultiHeadSelfAttention attn_;
  LayerNormChannels norm1_, norm2_;
  Conv1dLayer ffn1_, ffn2_;
};

// Adds the position table, then runs the block stack.
class TransformerStack {
 public:
  TransformerStack() = default;
  TransformerStack(ParamRegistry* reg, const std::string& prefix,
                   const TransformerConfig& cfg, Rng* rng);
  Tensor Forward(const Tensor& x, Rng* dropout_rng) const;

 private:
  TransformerConfig cfg_;
  std::vector<TransformerBlock> blocks_;
};

}  // namespace xltts

#endif  // XLTTS_NN_TRANSFORMER_H_
