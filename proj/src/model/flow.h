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

#ifndef XLTTS_MODEL_FLOW_H_
#define XLTTS_MODEL_FLOW_H_

#include <vector>

#include "model/config.h"
#include "nn/layers.h"
#include "nn/registry.h"
#include "nn/wavenet.h"

namespace xltts {

// Invertible map between the posterior latent and the prior latent: a chain
// of affine coupling blocks with a half-channel swap between blocks. The
// scale/shift heads are zero-initialized, so a fresh flow is the identity.
struct FlowResult {
  Tensor z;       // transformed sequence, [d_z x T]
  Tensor logdet;  // scalar [1 x 1], sum of log-scales over the whole map
};

class FlowDecoder {
 public:
  FlowDecoder() = default;
  FlowDecoder(ParamRegistry* reg, const ModelConfig& cfg, Rng* rng);

  FlowResult Forward(const Tensor& z, const Tensor& g) const;
  Tensor Inverse(const Tensor& z, const Tensor& g) const;

 private:
  struct Coupling {
    Linear pre;
    WaveNetStack wn;
    Linear post;
  };
  Tensor CheckInput(const Tensor& z, const Tensor& g) const;

  ModelConfig cfg_;
  int half_ = 0;
  std::vector<Coupling> couplings_;
};

}  // namespace xltts

#endif  // XLTTS_MODEL_FLOW_H_
