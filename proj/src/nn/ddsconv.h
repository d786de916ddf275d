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

#ifndef XLTTS_NN_DDSCONV_H_
#define XLTTS_NN_DDSCONV_H_

#include <string>
#include <vector>

#include "nn/layers.h"
#include "nn/registry.h"

namespace xltts {

struct DdsConvConfig {
  int channels = 0;
  int kernel = 3;
  int layers = 3;
  double dropout = 0.0;
};

// Dilated depth-separable convolution stack: each layer is a depthwise conv
// with dilation kernel^i, then a pointwise mix, layer norms and GELUs, with
// a residual connection. Conditioning is added to the input when defined.
class DdsConvStack {
 public:
  DdsConvStack() = default;
  DdsConvStack(ParamRegistry* reg, const std::string& prefix,
               const DdsConvConfig& cfg, Rng* rng);
  // x [channels x T]; g is undefined, a global [channels x 1] vector, or a
  // per-step [channels x T] context.
  Tensor Forward(const Tensor& x, const Tensor& g, Rng* dropout_rng) const;

 private:
  DdsConvConfig cfg_;
  std::vector<Conv1dLayer> sep_;
  std::vector<Conv1dLayer> mix_;
  std::vector<LayerNormChannels> norm1_, norm2_;
};

}  // namespace xltts

#endif  // XLTTS_NN_DDSCONV_H_
