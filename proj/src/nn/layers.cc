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

#include "nn/layers.h"

#include <cmath>

#include "util/error.h"

namespace xltts {

Linear::Linear(ParamRegistry* reg, const std::string& prefix, int in, int out,
               bool bias, Rng* rng) {
  double k = 1.0 / std::sqrt(static_cast<double>(in));
  w_ = reg->AddUniform(prefix + ".w", out, in, k, rng);
  if (bias) b_ = reg->AddUniform(prefix + ".b", out, 1, k, rng);
}

Tensor Linear::Forward(const Tensor& x) const {
  Tensor y = MatMul(w_, x);
  if (b_.defined()) y = AddColVec(y, b_);
  return y;
}

void Linear::ZeroInit() {
  w_.mutable_value().setZero();
  if (b_.defined()) b_.mutable_value().setZero();
}

void Linear::ScaleInit(double s) {
  w_.mutable_value() *= s;
  if (b_.defined()) b_.mutable_value() *= s;
}

int SamePad(int kernel, int dilation) { return dilation * (kernel - 1) / 2; }

Conv1dLayer::Conv1dLayer(ParamRegistry* reg, const std::string& prefix,
                         int in, int out, Conv1dSpec spec, bool bias,
                         Rng* rng)
    : spec_(spec) {
  if (in % spec.groups != 0) {
    throw Error(ErrorCode::kInvalidArgument, "conv channels vs groups");
  }
  int fan_in = (in / spec.groups) * spec.kernel;
  double k = 1.0 / std::sqrt(static_cast<double>(fan_in));
  w_ = reg->AddUniform(prefix + ".w", out, fan_in, k, rng);
  if (bias) b_ = reg->AddUniform(prefix + ".b", out, 1, k, rng);
}

Tensor Conv1dLayer::Forward(const Tensor& x) const {
  return Conv1d(x, w_, b_, spec_);
}

void Conv1dLayer::ZeroInit() {
  w_.mutable_value().setZero();
  if (b_.defined()) b_.mutable_value().setZero();
}

Conv2dLayer::Conv2dLayer(ParamRegistry* reg, const std::string& prefix,
                         int in, int out, int kh, int kw, int sh, int sw,
                         int ph, int pw, bool bias, Rng* rng)
    : in_(in) {
  base_.kh = kh;
  base_.kw = kw;
  base_.sh = sh;
  base_.sw = sw;
  base_.ph = ph;
  base_.pw = pw;
  int fan_in = in * kh * kw;
  double k = 1.0 / std::sqrt(static_cast<double>(fan_in));
  w_ = reg->AddUniform(prefix + ".w", out, fan_in, k, rng);
  if (bias) b_ = reg->AddUniform(prefix + ".b", out, 1, k, rng);
}

Tensor Conv2dLayer::Forward(const Tensor& x, int h, int w) const {
  Conv2dSpec spec = base_;
  spec.in_h = h;
  spec.in_w = w;
  if (x.rows() != in_ || x.cols() != static_cast<Eigen::Index>(h) * w) {
    throw Error(ErrorCode::kShapeMismatch, "Conv2dLayer input");
  }
  return Conv2d(x, w_, b_, spec);
}

int Conv2dLayer::OutH(int h) const {
  Conv2dSpec spec = base_;
  spec.in_h = h;
  return Conv2dOutH(spec);
}

int Conv2dLayer::OutW(int w) const {
  Conv2dSpec spec = base_;
  spec.in_w = w;
  return Conv2dOutW(spec);
}

LayerNormChannels::LayerNormChannels(ParamRegistry* reg,
                                     const std::string& prefix,
                                     int channels) {
  gamma_ = reg->AddOnes(prefix + ".g", channels, 1);
  beta_ = reg->AddZeros(prefix + ".b", channels, 1);
}

Tensor LayerNormChannels::Forward(const Tensor& x) const {
  return LayerNormCols(x, gamma_, beta_);
}

Embedding::Embedding(ParamRegistry* reg, const std::string& prefix, int num,
                     int dim, double stddev, Rng* rng) {
  w_ = reg->AddNormal(prefix + ".w", dim, num, stddev, rng);
}

Tensor Embedding::Forward(const std::vector<int>& ids) const {
  for (int id : ids) {
    if (id < 0 || id >= num()) {
      throw Error(ErrorCode::kInvalidArgument,
                  "embedding id " + std::to_string(id) + " out of range");
    }
  }
  return GatherCols(w_, ids);
}

}  // namespace xltts
