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

#include "nn/wavenet.h"

#include "util/error.h"

namespace xltts {

WaveNetStack::WaveNetStack(ParamRegistry* reg, const std::string& prefix,
                           const WaveNetConfig& cfg, Rng* rng)
    : cfg_(cfg) {
  int dilation = 1;
  for (int i = 0; i < cfg.layers; ++i) {
    Conv1dSpec spec;
    spec.kernel = cfg.kernel;
    spec.dilation = dilation;
    spec.pad_left = spec.pad_right = SamePad(cfg.kernel, dilation);
    in_layers_.emplace_back(reg, prefix + ".in" + std::to_string(i),
                            cfg.hidden, 2 * cfg.hidden, spec, true, rng);
    dilation *= cfg.dilation_rate;

    // The last layer feeds only the skip path.
    int res_skip = i < cfg.layers - 1 ? 2 * cfg.hidden : cfg.hidden;
    res_skip_layers_.emplace_back(reg, prefix + ".rs" + std::to_string(i),
                                  cfg.hidden, res_skip, Conv1dSpec{}, true,
                                  rng);
  }
  if (cfg.g_channels > 0) {
    cond_ = Linear(reg, prefix + ".cond", cfg.g_channels,
                   2 * cfg.hidden * cfg.layers, true, rng);
  }
}

Tensor WaveNetStack::Forward(const Tensor& x, const Tensor& g,
                             Rng* dropout_rng) const {
  if (x.rows() != cfg_.hidden) {
    throw Error(ErrorCode::kShapeMismatch, "WaveNetStack input channels");
  }
  Tensor cond;
  if (cfg_.g_channels > 0) {
    if (!g.defined() || g.rows() != cfg_.g_channels || g.cols() != 1) {
      throw Error(ErrorCode::kShapeMismatch, "WaveNetStack conditioning");
    }
    cond = cond_.Forward(g);  // [2*hidden*layers x 1]
  } else if (g.defined()) {
    throw Error(ErrorCode::kShapeMismatch,
                "conditioning passed to unconditioned stack");
  }

  Tensor h = x;
  Tensor skip_sum;
  for (int i = 0; i < cfg_.layers; ++i) {
    Tensor z = in_layers_[i].Forward(h);
    if (cond.defined()) {
      z = AddColVec(z, SliceRows(cond, 2 * cfg_.hidden * i, 2 * cfg_.hidden));
    }
    Tensor gate = Mul(Tanh(SliceRows(z, 0, cfg_.hidden)),
                      Sigmoid(SliceRows(z, cfg_.hidden, cfg_.hidden)));
    if (dropout_rng != nullptr && cfg_.dropout > 0.0) {
      gate = Dropout(gate, cfg_.dropout, dropout_rng);
    }
    Tensor rs = res_skip_layers_[i].Forward(gate);
    if (i < cfg_.layers - 1) {
      h = Add(h, SliceRows(rs, 0, cfg_.hidden));
      Tensor skip = SliceRows(rs, cfg_.hidden, cfg_.hidden);
      skip_sum = skip_sum.defined() ? Add(skip_sum, skip) : skip;
    } else {
      skip_sum = skip_sum.defined() ? Add(skip_sum, rs) : rs;
    }
  }
  return skip_sum;
}

}  // namespace xltts
