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

#ifndef XLTTS_MODEL_GENERATOR_H_
#define XLTTS_MODEL_GENERATOR_H_

#include <vector>

#include "model/config.h"
#include "nn/layers.h"
#include "nn/registry.h"

namespace xltts {

// Latent-to-waveform generator: a stack of transposed-convolution upsamplers
// (realized as zero-stuffing plus an ordinary convolution), each followed by
// a multi-receptive-field fusion of dilated residual branches, with global
// style conditioning added after the input convolution. Output is one
// tanh-bounded channel of exactly hop() samples per latent frame.
class Generator {
 public:
  Generator() = default;
  Generator(ParamRegistry* reg, const ModelConfig& cfg, Rng* rng);

  // z [d_z x T] -> waveform [1 x hop()*T], values in [-1, 1].
  Tensor Forward(const Tensor& z, const Tensor& g) const;

 private:
  struct ResUnit {
    Conv1dLayer dilated;
    Conv1dLayer plain;
  };
  struct Stage {
    int factor = 1;
    Conv1dLayer up;
    std::vector<std::vector<ResUnit>> branches;  // [mrf kernel][dilation]
  };

  ModelConfig cfg_;
  Conv1dLayer conv_pre_;
  Linear cond_;
  std::vector<Stage> stages_;
  Conv1dLayer conv_post_;
};

}  // namespace xltts

#endif  // XLTTS_MODEL_GENERATOR_H_
