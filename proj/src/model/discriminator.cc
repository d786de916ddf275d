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

#include "model/discriminator.h"

#include <string>

#include "util/error.h"

namespace xltts {

namespace {

constexpr double kSlope = 0.1;

void CheckWave(const Tensor& wav) {
  if (!wav.defined() || wav.rows() != 1 || wav.cols() < 1) {
    throw Error(ErrorCode::kShapeMismatch, "critic input must be [1 x N]");
  }
}

}  // namespace

PeriodDiscriminator::PeriodDiscriminator(ParamRegistry* reg,
                                         const std::string& prefix,
                                         int period, const ModelConfig& cfg,
                                         Rng* rng)
    : period_(period) {
  int in = 1;
  for (size_t i = 0; i < cfg.mpd_channels.size(); ++i) {
    const int out = cfg.mpd_channels[i];
    convs_.push_back(Conv2dLayer(reg, prefix + ".c" + std::to_string(i), in,
                                 out, 5, 1, 3, 1, 2, 0, true, rng));
    in = out;
  }
  convs_.push_back(Conv2dLayer(reg, prefix + ".c" +
                                   std::to_string(cfg.mpd_channels.size()),
                               in, in, 5, 1, 1, 1, 2, 0, true, rng));
  post_ = Conv2dLayer(reg, prefix + ".post", in, 1, 3, 1, 1, 1, 1, 0, true,
                      rng);
}

void PeriodDiscriminator::Forward(const Tensor& wav, DiscOutput* out) const {
  CheckWave(wav);
  const Eigen::Index n = wav.cols();
  const Eigen::Index pad =
      (n % period_ == 0) ? 0 : period_ - (n % period_);
  // After padding, the flat [1 x N] buffer already reads as an
  // (N/period) x period image in the 2-D convolution's spatial layout.
  Tensor x = (pad > 0) ? PadCols(wav, 0, pad) : wav;
  int h = static_cast<int>((n + pad) / period_);
  const int w = period_;

  std::vector<Tensor> feats;
  for (const Conv2dLayer& conv : convs_) {
    x = LeakyRelu(conv.Forward(x, h, w), kSlope);
    h = conv.OutH(h);
    feats.push_back(x);
  }
  Tensor logit = post_.Forward(x, h, w);
  feats.push_back(logit);
  out->logits.push_back(logit);
  out->features.push_back(std::move(feats));
}

ScaleDiscriminator::ScaleDiscriminator(ParamRegistry* reg,
                                       const std::string& prefix,
                                       const ModelConfig& cfg, Rng* rng) {
  const std::vector<int>& ch = cfg.msd_channels;
  if (ch.size() != 5) {
    throw Error(ErrorCode::kInvalidArgument,
                "scale critic expects a 5-entry channel plan");
  }
  const int kernels[5] = {15, 41, 41, 41, 41};
  const int strides[5] = {1, 2, 2, 4, 4};
  const int groups[5] = {1, 4, 16, 16, 16};
  int in = 1;
  for (int i = 0; i < 5; ++i) {
    Conv1dSpec s;
    s.kernel = kernels[i];
    s.stride = strides[i];
    s.groups = groups[i];
    s.pad_left = (kernels[i] - 1) / 2;
    s.pad_right = (kernels[i] - 1) / 2;
    convs_.push_back(Conv1dLayer(reg, prefix + ".c" + std::to_string(i), in,
                                 ch[i], s, true, rng));
    in = ch[i];
  }
  Conv1dSpec s5;
  s5.kernel = 5;
  s5.pad_left = 2;
  s5.pad_right = 2;
  convs_.push_back(Conv1dLayer(reg, prefix + ".c5", in, in, s5, true, rng));
  Conv1dSpec sp;
  sp.kernel = 3;
  sp.pad_left = 1;
  sp.pad_right = 1;
  post_ = Conv1dLayer(reg, prefix + ".post", in, 1, sp, true, rng);
}

void ScaleDiscriminator::Forward(const Tensor& wav, DiscOutput* out) const {
  CheckWave(wav);
  Tensor x = wav;
  std::vector<Tensor> feats;
  for (const Conv1dLayer& conv : convs_) {
    x = LeakyRelu(conv.Forward(x), kSlope);
    feats.push_back(x);
  }
  Tensor logit = post_.Forward(x);
  feats.push_back(logit);
  out->logits.push_back(logit);
  out->features.push_back(std::move(feats));
}

DiscriminatorSet::DiscriminatorSet(ParamRegistry* reg, const ModelConfig& cfg,
                                   Rng* rng) {
  for (size_t i = 0; i < cfg.mpd_periods.size(); ++i) {
    period_.push_back(PeriodDiscriminator(
        reg, "mpd" + std::to_string(i), cfg.mpd_periods[i], cfg, rng));
  }
  for (int i = 0; i < 3; ++i) {
    scale_.push_back(
        ScaleDiscriminator(reg, "msd" + std::to_string(i), cfg, rng));
  }
}

DiscOutput DiscriminatorSet::Forward(const Tensor& wav) const {
  CheckWave(wav);
  DiscOutput out;
  for (const PeriodDiscriminator& d : period_) {
    d.Forward(wav, &out);
  }
  Tensor x = wav;
  for (size_t i = 0; i < scale_.size(); ++i) {
    if (i > 0) x = AvgPool1d(x, 4, 2, 2);
    scale_[i].Forward(x, &out);
  }
  return out;
}

std::pair<DiscOutput, DiscOutput> DiscriminatorSet::ForwardPair(
    const Tensor& real, const Tensor& fake) const {
  CheckWave(real);
  CheckWave(fake);
  if (real.cols() != fake.cols()) {
    throw Error(ErrorCode::kLengthMismatch,
                "real " + std::to_string(real.cols()) + " vs fake " +
                    std::to_string(fake.cols()) + " samples");
  }
  return {Forward(real), Forward(fake)};
}

}  // namespace xltts
