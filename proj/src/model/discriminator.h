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

#ifndef XLTTS_MODEL_DISCRIMINATOR_H_
#define XLTTS_MODEL_DISCRIMINATOR_H_

#include <utility>
#include <vector>

#include "model/config.h"
#include "nn/layers.h"
#include "nn/registry.h"

namespace xltts {

// Adversarial critics over waveforms: one per-period reshaped 2-D critic
// for each configured period, plus three 1-D critics at progressively
// average-pooled scales. Logits stay unsquashed (least-squares objective);
// intermediate activations are exposed for feature matching.
struct DiscOutput {
  std::vector<Tensor> logits;                 // one per sub-critic
  std::vector<std::vector<Tensor>> features;  // per sub-critic, per layer
};

class PeriodDiscriminator {
 public:
  PeriodDiscriminator() = default;
  PeriodDiscriminator(ParamRegistry* reg, const std::string& prefix,
                      int period, const ModelConfig& cfg, Rng* rng);
  // wav [1 x N]; appends one logit and one feature list.
  void Forward(const Tensor& wav, DiscOutput* out) const;

 private:
  int period_ = 1;
  std::vector<Conv2dLayer> convs_;
  Conv2dLayer post_;
};

class ScaleDiscriminator {
 public:
  ScaleDiscriminator() = default;
  ScaleDiscriminator(ParamRegistry* reg, const std::string& prefix,
                     const ModelConfig& cfg, Rng* rng);
  void Forward(const Tensor& wav, DiscOutput* out) const;

 private:
  std::vector<Conv1dLayer> convs_;
  Conv1dLayer post_;
};

class DiscriminatorSet {
 public:
  DiscriminatorSet() = default;
  DiscriminatorSet(ParamRegistry* reg, const ModelConfig& cfg, Rng* rng);

  // All critics on one waveform [1 x N].
  DiscOutput Forward(const Tensor& wav) const;
  // Real/fake pair for training; the two must have equal length.
  std::pair<DiscOutput, DiscOutput> ForwardPair(const Tensor& real,
                                                const Tensor& fake) const;

 private:
  std::vector<PeriodDiscriminator> period_;
  std::vector<ScaleDiscriminator> scale_;
};

}  // namespace xltts

#endif  // XLTTS_MODEL_DISCRIMINATOR_H_
