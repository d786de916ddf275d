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

#ifndef XLTTS_MODEL_SDP_H_
#define XLTTS_MODEL_SDP_H_

#include <string>
#include <vector>

#include "model/config.h"
#include "nn/ddsconv.h"
#include "nn/layers.h"
#include "nn/registry.h"

namespace xltts {

// Per-element scale/shift with learned [channels x 1] parameters; the
// entry flow of each spline-flow chain.
class ElementwiseAffineFlow {
 public:
  ElementwiseAffineFlow() = default;
  ElementwiseAffineFlow(ParamRegistry* reg, const std::string& prefix,
                        int channels);
  Tensor Forward(const Tensor& x, Tensor* logdet) const;
  Mat Inverse(const Mat& y) const;

 private:
  Tensor m_;
  Tensor logs_;
};

// One spline-flow step: the first channel conditions a rational-quadratic
// spline applied to the second channel, with per-step context added into
// the conditioner stack. The parameter head starts near zero, so a fresh
// step is close to the identity while the context already matters.
class ConvFlowLayer {
 public:
  ConvFlowLayer() = default;
  ConvFlowLayer(ParamRegistry* reg, const std::string& prefix,
                const ModelConfig& cfg, Rng* rng);
  // x [2 x T], ctx [filter x T]; accumulates the log-determinant.
  Tensor Forward(const Tensor& x, const Tensor& ctx, Tensor* logdet) const;
  Mat Inverse(const Mat& y, const Tensor& ctx) const;

 private:
  Tensor SplineParams(const Tensor& x0, const Tensor& ctx) const;

  int bins_ = 0;
  int filter_ = 0;
  double tail_ = 5.0;
  Linear pre_;
  DdsConvStack convs_;
  Linear proj_;
};

// Stochastic duration predictor: a variational bound over log-durations
// under conditional spline flows, with a posterior-augmentation pair of
// noise channels. Training consumes alignment durations; inference inverts
// the flow chain on scaled noise.
class StochasticDurationPredictor {
 public:
  StochasticDurationPredictor() = default;
  StochasticDurationPredictor(ParamRegistry* reg, const ModelConfig& cfg,
                              Rng* rng);

  // Variational NLL of the duration sequence (raw sum over tokens). The
  // token representation is detached inside; gradients reach only predictor
  // parameters and the style vector g.
  Tensor Nll(const Tensor& hidden, const std::vector<int>& durations,
             const Tensor& g, Rng* noise_rng, Rng* dropout_rng) const;

  // Inverse-flow sampling; every duration is at least 1.
  std::vector<int> Sample(const Mat& hidden, const Mat& g, double noise_scale,
                          double length_scale, Rng* rng) const;

 private:
  Tensor Context(const Tensor& hidden, const Tensor& g,
                 Rng* dropout_rng) const;

  ModelConfig cfg_;
  Linear pre_;
  Linear cond_;
  DdsConvStack convs_;
  Linear proj_;
  Linear post_pre_;
  DdsConvStack post_convs_;
  Linear post_proj_;
  ElementwiseAffineFlow affine_;
  std::vector<ConvFlowLayer> flows_;
  ElementwiseAffineFlow post_affine_;
  std::vector<ConvFlowLayer> post_flows_;
};

}  // namespace xltts

#endif  // XLTTS_MODEL_SDP_H_
