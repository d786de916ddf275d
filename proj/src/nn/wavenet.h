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

#ifndef XLTTS_NN_WAVENET_H_
#define XLTTS_NN_WAVENET_H_

#include <string>
#include <vector>

#include "nn/layers.h"
#include "nn/registry.h"

namespace xltts {

struct WaveNetConfig {
  int hidden = 0;
  int kernel = 5;
  int dilation_rate = 1;
  int layers = 0;
  int g_channels = 0;  // 0: unconditioned
  double dropout = 0.0;
};

// Gated residual dilated-convolution stack with global conditioning: each
// layer computes tanh/sigmoid halves of a dilated conv plus a per-layer
// slice of the conditioning projection, then feeds residual and skip paths.
// Returns the skip sum, [hidden x T].
class WaveNetStack {
 public:
  WaveNetStack() = default;
  WaveNetStack(ParamRegistry* reg, const std::string& prefix,
               const WaveNetConfig& cfg, Rng* rng);
  // g is [g_channels x 1] (or undefined iff g_channels == 0).
  Tensor Forward(const Tensor& x, const Tensor& g, Rng* dropout_rng) const;

 private:
  WaveNetConfig cfg_;
  std::vector<Conv1dLayer> in_layers_;
  std::vector<Conv1dLayer> res_skip_layers_;
  Linear cond_;  // g -> [2*hidden*layers x 1]
};

}  // namespace xltts

#endif  // XLTTS_NN_WAVENET_H_
