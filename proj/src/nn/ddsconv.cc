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

#include "nn/ddsconv.h"

#include "util/error.h"

namespace xltts {

DdsConvStack::DdsConvStack(ParamRegistry* reg, const std::string& prefix,
                           const DdsConvConfig& cfg, Rng* rng)
    : cfg_(cfg) {
  int dilation = 1;
  for (int i = 0; i < cfg.layers; ++i) {
    Conv1dSpec spec;
    spec.kernel = cfg.kernel;
    spec.dilation = dilation;
    spec.groups = cfg.channels;
    spec.pad_left = spec.pad_right = SamePad(cfg.kernel, dilation);
    sep_.emplace_back(reg, prefix + ".sep" + std::to_string(i), cfg.channels,
                      cfg.channels, spec, true, rng);
    mix_.emplace_back(reg, prefix + ".mix" + std::to_string(i), cfg.channels,
                      cfg.channels, Conv1dSpec{}, true, rng);
    norm1_.emplace_back(reg, prefix + ".ln1_" + std::to_string(i),
                        cfg.channels);
    norm2_.emplace_back(reg, prefix + ".ln2_" + std::to_string(i),
                        cfg.channels);
    dilation *= cfg.kernel;
  }
}

Tensor DdsConvStack::Forward(const Tensor& x, const Tensor& g,
                             Rng* dropout_rng) const {
  if (x.rows() != cfg_.channels) {
    throw Error(ErrorCode::kShapeMismatch, "DdsConvStack input channels");
  }
  Tensor h = x;
  if (g.defined()) {
    if (g.rows() != cfg_.channels ||
        (g.cols() != 1 && g.cols() != x.cols())) {
      throw Error(ErrorCode::kShapeMismatch, "DdsConvStack conditioning");
    }
    h = g.cols() == 1 ? AddColVec(h, g) : Add(h, g);
  }
  for (int i = 0; i < cfg_.layers; ++i) {
    Tensor y = Gelu(norm1_[i].Forward(sep_[i].Forward(h)));
    y = Gelu(norm2_[i].Forward(mix_[i].Forward(y)));
    if (dropout_rng != nullptr && cfg_.dropout > 0.0) {
      y = Dropout(y, cfg_.dropout, dropout_rng);
    }
    h = Add(h, y);
  }
  return h;
}

}  // namespace xltts
