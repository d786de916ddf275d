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

#include "model/sdp.h"

#include <cmath>

#include "nn/spline.h"
#include "util/error.h"

namespace xltts {

namespace {

constexpr double kLog2Pi = 1.8378770664093453;

Tensor SwapPair(const Tensor& z) {
  return ConcatRows(SliceRows(z, 1, 1), SliceRows(z, 0, 1));
}

Mat SwapPair(const Mat& z) {
  Mat out(2, z.cols());
  out.row(0) = z.row(1);
  out.row(1) = z.row(0);
  return out;
}

}  // namespace

ElementwiseAffineFlow::ElementwiseAffineFlow(ParamRegistry* reg,
                                             const std::string& prefix,
                                             int channels) {
  m_ = reg->AddZeros(prefix + ".m", channels, 1);
  logs_ = reg->AddZeros(prefix + ".logs", channels, 1);
}

Tensor ElementwiseAffineFlow::Forward(const Tensor& x, Tensor* logdet) const {
  if (logdet != nullptr) {
    *logdet = Add(*logdet,
                  MulScalar(SumAll(logs_), static_cast<double>(x.cols())));
  }
  return AddColVec(MulColVec(x, Exp(logs_)), m_);
}

Mat ElementwiseAffineFlow::Inverse(const Mat& y) const {
  const Mat m = m_.value();
  const Mat logs = logs_.value();
  Mat x = y;
  for (Eigen::Index r = 0; r < y.rows(); ++r) {
    x.row(r) = (y.row(r).array() - m(r, 0)) * std::exp(-logs(r, 0));
  }
  return x;
}

ConvFlowLayer::ConvFlowLayer(ParamRegistry* reg, const std::string& prefix,
                             const ModelConfig& cfg, Rng* rng)
    : bins_(cfg.sdp_bins), filter_(cfg.sdp_filter), tail_(cfg.sdp_tail) {
  pre_ = Linear(reg, prefix + ".pre", 1, filter_, true, rng);
  DdsConvConfig dds;
  dds.channels = filter_;
  dds.kernel = cfg.sdp_kernel;
  dds.layers = cfg.sdp_layers;
  convs_ = DdsConvStack(reg, prefix + ".convs", dds, rng);
  proj_ = Linear(reg, prefix + ".proj", filter_, 3 * bins_ - 1, true, rng);
  // Near-identity spline at init, but not exactly zero: the context must
  // already influence the flow on an untrained model.
  proj_.ScaleInit(0.1);
}

Tensor ConvFlowLayer::SplineParams(const Tensor& x0, const Tensor& ctx) const {
  Tensor h = pre_.Forward(x0);
  h = convs_.Forward(h, ctx, nullptr);
  Tensor params = proj_.Forward(h);
  // Width/height logits shrink with the conditioner width; derivative
  // logits stay unscaled.
  const double scale = 1.0 / std::sqrt(static_cast<double>(filter_));
  return ConcatRows(MulScalar(SliceRows(params, 0, 2 * bins_), scale),
                    SliceRows(params, 2 * bins_, bins_ - 1));
}

Tensor ConvFlowLayer::Forward(const Tensor& x, const Tensor& ctx,
                              Tensor* logdet) const {
  Tensor x0 = SliceRows(x, 0, 1);
  Tensor x1 = SliceRows(x, 1, 1);
  Tensor params = SplineParams(x0, ctx);
  SplineResult sr = RationalQuadraticForward(x1, params, bins_, tail_);
  if (logdet != nullptr) {
    *logdet = Add(*logdet, SumAll(sr.logdet_map));
  }
  return ConcatRows(x0, sr.y);
}

Mat ConvFlowLayer::Inverse(const Mat& y, const Tensor& ctx) const {
  Tensor params =
      SplineParams(Tensor::Constant(y.topRows(1)), ctx);
  Mat x1 = RationalQuadraticInverse(y.bottomRows(1), params.value(), bins_,
                                    tail_);
  Mat out(2, y.cols());
  out.row(0) = y.row(0);
  out.row(1) = x1.row(0);
  return out;
}

StochasticDurationPredictor::StochasticDurationPredictor(ParamRegistry* reg,
                                                         const ModelConfig& cfg,
                                                         Rng* rng)
    : cfg_(cfg) {
  const int f = cfg.sdp_filter;
  pre_ = Linear(reg, "sdp.pre", cfg.hidden(), f, true, rng);
  cond_ = Linear(reg, "sdp.cond", cfg.gin, f, true, rng);
  DdsConvConfig dds;
  dds.channels = f;
  dds.kernel = cfg.sdp_kernel;
  dds.layers = cfg.sdp_layers;
  dds.dropout = cfg.dropout;
  convs_ = DdsConvStack(reg, "sdp.convs", dds, rng);
  proj_ = Linear(reg, "sdp.proj", f, f, true, rng);
  post_pre_ = Linear(reg, "sdp.post_pre", 1, f, true, rng);
  post_convs_ = DdsConvStack(reg, "sdp.post_convs", dds, rng);
  post_proj_ = Linear(reg, "sdp.post_proj", f, f, true, rng);
  affine_ = ElementwiseAffineFlow(reg, "sdp.affine", 2);
  post_affine_ = ElementwiseAffineFlow(reg, "sdp.post_affine", 2);
  flows_.resize(cfg.sdp_flows);
  post_flows_.resize(cfg.sdp_flows);
  for (int i = 0; i < cfg.sdp_flows; ++i) {
    flows_[i] =
        ConvFlowLayer(reg, "sdp.flow" + std::to_string(i), cfg, rng);
    post_flows_[i] =
        ConvFlowLayer(reg, "sdp.post_flow" + std::to_string(i), cfg, rng);
  }
}

Tensor StochasticDurationPredictor::Context(const Tensor& hidden,
                                            const Tensor& g,
                                            Rng* dropout_rng) const {
  if (!hidden.defined() || hidden.rows() != cfg_.hidden()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "token representation must have " +
                    std::to_string(cfg_.hidden()) + " rows");
  }
  if (!g.defined() || g.rows() != cfg_.gin || g.cols() != 1) {
    throw Error(ErrorCode::kDimensionMismatch, "style vector must be [gin x 1]");
  }
  Tensor x = pre_.Forward(Detach(hidden));
  x = AddColVec(x, cond_.Forward(g));
  x = convs_.Forward(x, Tensor(), dropout_rng);
  return proj_.Forward(x);
}

Tensor StochasticDurationPredictor::Nll(const Tensor& hidden,
                                        const std::vector<int>& durations,
                                        const Tensor& g, Rng* noise_rng,
                                        Rng* dropout_rng) const {
  if (noise_rng == nullptr) {
    throw Error(ErrorCode::kInvalidArgument,
                "duration NLL needs a noise source");
  }
  const Eigen::Index len = hidden.defined() ? hidden.cols() : 0;
  if (static_cast<Eigen::Index>(durations.size()) != len) {
    throw Error(ErrorCode::kDimensionMismatch,
                "got " + std::to_string(durations.size()) +
                    " durations for " + std::to_string(len) + " tokens");
  }
  Mat w(1, len);
  for (Eigen::Index i = 0; i < len; ++i) {
    if (durations[i] <= 0) {
      throw Error(ErrorCode::kNonPositiveDuration,
                  "duration " + std::to_string(durations[i]) + " at token " +
                      std::to_string(i));
    }
    w(0, i) = static_cast<double>(durations[i]);
  }

  Tensor x_ctx = Context(hidden, g, dropout_rng);
  Tensor w_const = Tensor::Constant(w);
  Tensor h_w = post_pre_.Forward(w_const);
  h_w = post_convs_.Forward(h_w, Tensor(), dropout_rng);
  h_w = post_proj_.Forward(h_w);
  Tensor ctx_q = Add(x_ctx, h_w);

  // Posterior-augmentation pair: push standard noise through the posterior
  // flow chain, then carve the duration into a continuous positive part.
  Mat e_q(2, len);
  for (Eigen::Index c = 0; c < len; ++c) {
    e_q(0, c) = noise_rng->Normal();
    e_q(1, c) = noise_rng->Normal();
  }
  Tensor z_q = Tensor::Constant(e_q);
  Tensor logdet_q = Tensor::Scalar(0.0);
  z_q = post_affine_.Forward(z_q, &logdet_q);
  for (const ConvFlowLayer& cf : post_flows_) {
    z_q = SwapPair(cf.Forward(z_q, ctx_q, &logdet_q));
  }
  Tensor z_u = SliceRows(z_q, 0, 1);
  Tensor z1 = SliceRows(z_q, 1, 1);
  Tensor u = Sigmoid(z_u);
  Tensor z0 = Sub(w_const, u);  // strictly positive: u < 1 <= w
  logdet_q =
      Add(logdet_q, SumAll(Add(LogSigmoid(z_u), LogSigmoid(Neg(z_u)))));
  Tensor logq =
      Sub(SumAll(MulScalar(AddScalar(Square(Tensor::Constant(e_q)), kLog2Pi),
                           -0.5)),
          logdet_q);

  // Main chain on (log-duration remainder, augmentation channel).
  Tensor logdet_main = Tensor::Scalar(0.0);
  Tensor y = Log(z0);
  logdet_main = Add(logdet_main, Neg(SumAll(y)));
  Tensor z = ConcatRows(y, z1);
  z = affine_.Forward(z, &logdet_main);
  for (const ConvFlowLayer& cf : flows_) {
    z = SwapPair(cf.Forward(z, x_ctx, &logdet_main));
  }
  Tensor nll =
      Sub(SumAll(MulScalar(AddScalar(Square(z), kLog2Pi), 0.5)), logdet_main);
  return Add(nll, logq);
}

std::vector<int> StochasticDurationPredictor::Sample(const Mat& hidden,
                                                     const Mat& g,
                                                     double noise_scale,
                                                     double length_scale,
                                                     Rng* rng) const {
  if (rng == nullptr) {
    throw Error(ErrorCode::kInvalidArgument,
                "duration sampling needs a noise source");
  }
  if (length_scale <= 0.0) {
    throw Error(ErrorCode::kInvalidArgument, "length_scale must be positive");
  }
  Tensor x_ctx =
      Context(Tensor::Constant(hidden), Tensor::Constant(g), nullptr);
  const Eigen::Index len = hidden.cols();
  Mat z(2, len);
  for (Eigen::Index c = 0; c < len; ++c) {
    z(0, c) = rng->Normal() * noise_scale;
    z(1, c) = rng->Normal() * noise_scale;
  }
  for (auto it = flows_.rbegin(); it != flows_.rend(); ++it) {
    z = it->Inverse(SwapPair(z), x_ctx);
  }
  z = affine_.Inverse(z);

  std::vector<int> durations(len);
  for (Eigen::Index i = 0; i < len; ++i) {
    const double d = std::ceil(length_scale * std::exp(z(0, i)));
    durations[i] = std::max(1, static_cast<int>(d));
  }
  return durations;
}

}  // namespace xltts
