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

#include "model/flow.h"

#include <string>

#include "util/error.h"

namespace xltts {

namespace {

// Swaps the two channel halves; its own inverse.
Tensor Flip(const Tensor& z, int half) {
  return ConcatRows(SliceRows(z, half, half), SliceRows(z, 0, half));
}

}  // namespace

FlowDecoder::FlowDecoder(ParamRegistry* reg, const ModelConfig& cfg, Rng* rng)
    : cfg_(cfg) {
  if (cfg.d_z % 2 != 0) {
    throw Error(ErrorCode::kOddChannelCount,
                "coupling flow needs an even latent width, got " +
                    std::to_string(cfg.d_z));
  }
  half_ = cfg.d_z / 2;
  couplings_.resize(cfg.flow_couplings);
  for (int i = 0; i < cfg.flow_couplings; ++i) {
    const std::string p = "flow.c" + std::to_string(i);
    Coupling& c = couplings_[i];
    c.pre = Linear(reg, p + ".pre", half_, cfg.flow_hidden, true, rng);
    WaveNetConfig wn;
    wn.hidden = cfg.flow_hidden;
    wn.kernel = cfg.wn_kernel;
    wn.layers = cfg.flow_wn_layers;
    wn.g_channels = cfg.gin;
    c.wn = WaveNetStack(reg, p + ".wn", wn, rng);
    c.post = Linear(reg, p + ".post", cfg.flow_hidden, cfg.d_z, true, rng);
    c.post.ZeroInit();  // identity map at init
  }
}

Tensor FlowDecoder::CheckInput(const Tensor& z, const Tensor& g) const {
  if (!z.defined() || z.rows() != cfg_.d_z) {
    throw Error(ErrorCode::kDimensionMismatch,
                "flow input must have " + std::to_string(cfg_.d_z) + " rows");
  }
  if (!g.defined() || g.rows() != cfg_.gin || g.cols() != 1) {
    throw Error(ErrorCode::kDimensionMismatch, "style vector must be [gin x 1]");
  }
  return z;
}

FlowResult FlowDecoder::Forward(const Tensor& z, const Tensor& g) const {
  Tensor x = CheckInput(z, g);
  Tensor logdet = Tensor::Scalar(0.0);
  for (const Coupling& c : couplings_) {
    Tensor x0 = SliceRows(x, 0, half_);
    Tensor x1 = SliceRows(x, half_, half_);
    Tensor h = c.wn.Forward(c.pre.Forward(x0), g, nullptr);
    Tensor stats = c.post.Forward(h);
    Tensor m = SliceRows(stats, 0, half_);
    Tensor logs = SliceRows(stats, half_, half_);
    Tensor y1 = Add(m, Mul(x1, Exp(logs)));
    x = Flip(ConcatRows(x0, y1), half_);
    logdet = Add(logdet, SumAll(logs));
  }
  FlowResult out;
  out.z = x;
  out.logdet = logdet;
  return out;
}

Tensor FlowDecoder::Inverse(const Tensor& z, const Tensor& g) const {
  Tensor x = CheckInput(z, g);
  for (auto it = couplings_.rbegin(); it != couplings_.rend(); ++it) {
    x = Flip(x, half_);
    Tensor x0 = SliceRows(x, 0, half_);
    Tensor y1 = SliceRows(x, half_, half_);
    Tensor h = it->wn.Forward(it->pre.Forward(x0), g, nullptr);
    Tensor stats = it->post.Forward(h);
    Tensor m = SliceRows(stats, 0, half_);
    Tensor logs = SliceRows(stats, half_, half_);
    Tensor x1 = Mul(Sub(y1, m), Exp(Neg(logs)));
    x = ConcatRows(x0, x1);
  }
  return x;
}

}  // namespace xltts
