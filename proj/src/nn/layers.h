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

#ifndef XLTTS_NN_LAYERS_H_
#define XLTTS_NN_LAYERS_H_

#include <string>
#include <vector>

#include "core/tensor.h"
#include "nn/registry.h"

namespace xltts {

// Dense map [in x T] -> [out x T]. Weight init U(-k, k), k = 1/sqrt(in).
class Linear {
 public:
  Linear() = default;
  Linear(ParamRegistry* reg, const std::string& prefix, int in, int out,
         bool bias, Rng* rng);
  Tensor Forward(const Tensor& x) const;
  // Replaces weight and bias with zeros so the layer starts as the zero map.
  void ZeroInit();
  // Shrinks the random init so the layer starts near (but not at) zero.
  void ScaleInit(double s);
  int in_channels() const { return static_cast<int>(w_.cols()); }
  int out_channels() const { return static_cast<int>(w_.rows()); }

 private:
  Tensor w_;  // [out x in]
  Tensor b_;  // [out x 1], undefined when bias-free
};

// 1-D convolution over the time axis. Centered padding for odd kernels.
int SamePad(int kernel, int dilation);

class Conv1dLayer {
 public:
  Conv1dLayer() = default;
  Conv1dLayer(ParamRegistry* reg, const std::string& prefix, int in, int out,
              Conv1dSpec spec, bool bias, Rng* rng);
  Tensor Forward(const Tensor& x) const;
  // Replaces the kernel with zeros so the layer starts as the zero map.
  void ZeroInit();
  const Conv1dSpec& spec() const { return spec_; }

 private:
  Conv1dSpec spec_;
  Tensor w_;
  Tensor b_;
};

// 2-D convolution over [channels x (H*W)] maps (row-major spatial layout).
class Conv2dLayer {
 public:
  Conv2dLayer() = default;
  Conv2dLayer(ParamRegistry* reg, const std::string& prefix, int in, int out,
              int kh, int kw, int sh, int sw, int ph, int pw, bool bias,
              Rng* rng);
  Tensor Forward(const Tensor& x, int h, int w) const;
  int OutH(int h) const;
  int OutW(int w) const;

 private:
  Conv2dSpec base_;  // in_h/in_w filled per call
  int in_ = 0;
  Tensor w_;
  Tensor b_;
};

// Per-timestep normalization over channels with learned gain/shift.
class LayerNormChannels {
 public:
  LayerNormChannels() = default;
  LayerNormChannels(ParamRegistry* reg, const std::string& prefix,
                    int channels);
  Tensor Forward(const Tensor& x) const;

 private:
  Tensor gamma_;
  Tensor beta_;
};

// Lookup table [dim x vocab]; Forward gathers one column per id.
class Embedding {
 public:
  Embedding() = default;
  Embedding(ParamRegistry* reg, const std::string& prefix, int num, int dim,
            double stddev, Rng* rng);
  Tensor Forward(const std::vector<int>& ids) const;
  int dim() const { return static_cast<int>(w_.rows()); }
  int num() const { return static_cast<int>(w_.cols()); }

 private:
  Tensor w_;
};

}  // namespace xltts

#endif  // XLTTS_NN_LAYERS_H_
