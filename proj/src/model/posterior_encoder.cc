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

#include "model/posterior_encoder.h"

#include "util/error.h"

namespace xltts {

PosteriorEncoder::PosteriorEncoder(ParamRegistry* reg, const ModelConfig& cfg,
                                   Rng* rng)
    : cfg_(cfg) {
  pre_ = Linear(reg, "post.pre", cfg.spec_bins, cfg.post_hidden, true, rng);
  WaveNetConfig wn;
  wn.hidden = cfg.post_hidden;
  wn.kernel = cfg.wn_kernel;
  wn.layers = cfg.post_layers;
  wn.g_channels = cfg.gin;
  wn_ = WaveNetStack(reg, "post.wn", wn, rng);
  proj_ = Linear(reg, "post.proj", cfg.post_hidden, 2 * cfg.d_z, true, rng);
}

LatentSequence PosteriorEncoder::Forward(const Spectrogram& spec,
                                         const Tensor& g, Rng* noise_rng,
                                         Rng* dropout_rng) const {
  if (spec.kind != Spectrogram::Kind::kLinear) {
    throw Error(ErrorCode::kInvalidArgument,
                "posterior encoder expects a linear spectrogram");
  }
  if (spec.bins() != cfg_.spec_bins) {
    throw Error(ErrorCode::kDimensionMismatch,
                "spectrogram has " + std::to_string(spec.bins()) +
                    " bins, expected " + std::to_string(cfg_.spec_bins));
  }
  if (!g.defined() || g.rows() != cfg_.gin || g.cols() != 1) {
    throw Error(ErrorCode::kDimensionMismatch, "style vector must be [gin x 1]");
  }
  const Eigen::Index t = spec.frames();
  Tensor x = pre_.Forward(Tensor::Constant(spec.magnitudes));
  x = wn_.Forward(x, g, dropout_rng);
  Tensor stats = proj_.Forward(x);

  LatentSequence out;
  out.mu = SliceRows(stats, 0, cfg_.d_z);
  out.log_sigma = SliceRows(stats, cfg_.d_z, cfg_.d_z);
  if (noise_rng == nullptr) {
    out.z = out.mu;
  } else {
    Mat eps(cfg_.d_z, t);
    for (Eigen::Index c = 0; c < t; ++c) {
      for (Eigen::Index r = 0; r < cfg_.d_z; ++r) {
        eps(r, c) = noise_rng->Normal();
      }
    }
    out.z = Add(out.mu, Mul(Exp(out.log_sigma), Tensor::Constant(eps)));
  }
  return out;
}

}  // namespace xltts
