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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "nn/ddsconv.h"
#include "nn/layers.h"
#include "nn/registry.h"
#include "nn/spline.h"
#include "nn/transformer.h"
#include "nn/wavenet.h"
#include "util/error.h"

namespace xltts {
namespace {

Mat RandMat(Rng* rng, int r, int c, double scale = 1.0) {
  Mat m(r, c);
  for (Eigen::Index j = 0; j < c; ++j) {
    for (Eigen::Index i = 0; i < r; ++i) m(i, j) = rng->Normal() * scale;
  }
  return m;
}

template <typename Fn>
ErrorCode ThrownCode(Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an Error to be thrown");
  return ErrorCode::kIoError;
}

// Central-difference check of every registered parameter (a spread of
// entries per tensor) against reverse-mode gradients of loss_fn, which must
// rebuild its graph from current parameter values on each call.
void CheckModuleGrads(const std::function<Tensor()>& loss_fn,
                      ParamRegistry* reg, double tol = 1e-5,
                      int samples_per_param = 4) {
  reg->ZeroGrads();
  Tensor loss = loss_fn();
  REQUIRE(loss.rows() == 1);
  REQUIRE(loss.cols() == 1);
  loss.Backward();
  std::map<std::string, Mat> analytic;
  for (const auto& [name, p] : reg->params()) {
    analytic[name] = p.GradOrZero();
  }
  const double eps = 1e-5;
  for (const auto& [name, p_const] : reg->params()) {
    Tensor p = p_const;  // shared handle; gives non-const access
    Eigen::Index n = p.rows() * p.cols();
    int samples = static_cast<int>(std::min<Eigen::Index>(n, samples_per_param));
    for (int s = 0; s < samples; ++s) {
      Eigen::Index flat =
          samples == 1 ? 0 : s * (n - 1) / (samples - 1);
      Eigen::Index i = flat % p.rows();
      Eigen::Index j = flat / p.rows();
      double orig = p.value()(i, j);
      p.mutable_value()(i, j) = orig + eps;
      double up = loss_fn().item();
      p.mutable_value()(i, j) = orig - eps;
      double dn = loss_fn().item();
      p.mutable_value()(i, j) = orig;
      double num = (up - dn) / (2.0 * eps);
      double ana = analytic[name](i, j);
      double denom = 1.0 + std::max(std::abs(num), std::abs(ana));
      CHECK_MESSAGE(std::abs(num - ana) <= tol * denom,
                    name << "(" << i << "," << j << "): analytic " << ana
                         << " numeric " << num);
    }
  }
}

// Same check for the loss as a function of one free input matrix.
void CheckInputGrad(const std::function<Tensor(const Tensor&)>& f,
                    const Mat& x0, double tol = 1e-5) {
  Tensor x = Tensor::Parameter(x0);
  Tensor loss = f(x);
  loss.Backward();
  Mat ana = x.GradOrZero();
  const double eps = 1e-5;
  for (Eigen::Index j = 0; j < x0.cols(); ++j) {
    for (Eigen::Index i = 0; i < x0.rows(); ++i) {
      Mat up = x0, dn = x0;
      up(i, j) += eps;
      dn(i, j) -= eps;
      double num = (f(Tensor::Constant(up)).item() -
                    f(Tensor::Constant(dn)).item()) /
                   (2.0 * eps);
      double denom = 1.0 + std::max(std::abs(num), std::abs(ana(i, j)));
      CHECK_MESSAGE(std::abs(num - ana(i, j)) <= tol * denom,
                    "input (" << i << "," << j << "): analytic " << ana(i, j)
                              << " numeric " << num);
    }
  }
}

}  // namespace

TEST_CASE("registry rejects duplicates and reports counts") {
  ParamRegistry reg;
  Rng rng(1);
  reg.AddUniform("a.w", 3, 4, 0.1, &rng);
  reg.AddZeros("a.b", 3, 1);
  CHECK(reg.ParameterCount() == 15);
  CHECK(ThrownCode([&] { reg.AddZeros("a.w", 1, 1); }) ==
        ErrorCode::kInvalidArgument);
}

TEST_CASE("registry save/load round trip and failure modes") {
  Rng rng(2);
  ParamRegistry a;
  a.AddUniform("x", 2, 3, 1.0, &rng);
  a.AddUniform("y", 4, 1, 1.0, &rng);
  std::map<std::string, Mat> store;
  a.SaveTensors(&store, "m.");
  CHECK(store.count("m.x") == 1);

  ParamRegistry b;
  b.AddZeros("x", 2, 3);
  b.AddZeros("y", 4, 1);
  b.LoadTensors(store, "m.");
  CHECK(b.params().at("x").value() == a.params().at("x").value());

  ParamRegistry missing;
  missing.AddZeros("z", 1, 1);
  CHECK(ThrownCode([&] { missing.LoadTensors(store, "m."); }) ==
        ErrorCode::kCorruptCheckpoint);
  ParamRegistry wrong;
  wrong.AddZeros("x", 3, 2);
  CHECK(ThrownCode([&] { wrong.LoadTensors(store, "m."); }) ==
        ErrorCode::kIncompatibleDimensions);
}

TEST_CASE("linear layer maps shapes and gradients correctly") {
  ParamRegistry reg;
  Rng rng(3);
  Linear lin(&reg, "lin", 3, 5, true, &rng);
  Mat x0 = RandMat(&rng, 3, 4);
  Tensor y = lin.Forward(Tensor::Constant(x0));
  CHECK(y.rows() == 5);
  CHECK(y.cols() == 4);

  auto loss = [&] { return SumAll(Square(lin.Forward(Tensor::Constant(x0)))); };
  CheckModuleGrads(loss, &reg, 1e-5, 6);
  CheckInputGrad(
      [&](const Tensor& x) { return SumAll(Square(lin.Forward(x))); }, x0);

  ParamRegistry reg2;
  Linear no_bias(&reg2, "nb", 3, 2, false, &rng);
  CHECK(reg2.ParameterCount() == 6);
  Mat zero_in = Mat::Zero(3, 2);
  CHECK(no_bias.Forward(Tensor::Constant(zero_in)).value().cwiseAbs().maxCoeff() ==
        0.0);
}

TEST_CASE("conv layer zero-init gives the zero map") {
  ParamRegistry reg;
  Rng rng(4);
  Conv1dSpec spec;
  spec.kernel = 3;
  spec.pad_left = spec.pad_right = 1;
  Conv1dLayer conv(&reg, "c", 2, 3, spec, true, &rng);
  conv.ZeroInit();
  Mat x = RandMat(&rng, 2, 6);
  CHECK(conv.Forward(Tensor::Constant(x)).value().cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("conv2d layer forwards and validates shapes") {
  ParamRegistry reg;
  Rng rng(5);
  Conv2dLayer conv(&reg, "c2", 1, 4, 3, 3, 2, 2, 1, 1, true, &rng);
  CHECK(conv.OutH(8) == 4);
  CHECK(conv.OutW(10) == 5);
  Mat x = RandMat(&rng, 1, 80);
  Tensor y = conv.Forward(Tensor::Constant(x), 8, 10);
  CHECK(y.rows() == 4);
  CHECK(y.cols() == 4 * 5);
  CHECK(ThrownCode([&] { conv.Forward(Tensor::Constant(x), 4, 10); }) ==
        ErrorCode::kShapeMismatch);

  auto loss = [&] {
    return SumAll(Square(conv.Forward(Tensor::Constant(x), 8, 10)));
  };
  CheckModuleGrads(loss, &reg, 1e-5, 6);
}

TEST_CASE("layer norm standardizes each column at init") {
  ParamRegistry reg;
  Rng rng(6);
  LayerNormChannels ln(&reg, "ln", 8);
  Mat x = RandMat(&rng, 8, 3, 2.5);
  Mat y = ln.Forward(Tensor::Constant(x)).value();
  for (int j = 0; j < 3; ++j) {
    CHECK(std::abs(y.col(j).mean()) < 1e-10);
    double var = (y.col(j).array() - y.col(j).mean()).square().mean();
    CHECK(var == doctest::Approx(1.0).epsilon(1e-3));
  }
  Mat x0 = RandMat(&rng, 8, 2);
  auto loss = [&] { return SumAll(Square(ln.Forward(Tensor::Constant(x0)))); };
  CheckModuleGrads(loss, &reg, 1e-5, 4);
  CheckInputGrad(
      [&](const Tensor& x_in) { return SumAll(Square(ln.Forward(x_in))); },
      x0);
}

TEST_CASE("embedding gathers columns and routes gradients") {
  ParamRegistry reg;
  Rng rng(7);
  Embedding emb(&reg, "e", 5, 3, 1.0, &rng);
  std::vector<int> ids = {4, 0, 4};
  Tensor y = emb.Forward(ids);
  CHECK(y.rows() == 3);
  CHECK(y.cols() == 3);
  CHECK(y.value().col(0) == y.value().col(2));

  reg.ZeroGrads();
  SumAll(y).Backward();
  Mat g = reg.params().at("e.w").GradOrZero();
  CHECK(g.col(4) == Mat::Ones(3, 1) * 2.0);  // picked twice
  CHECK(g.col(0) == Mat::Ones(3, 1));
  CHECK(g.col(1).cwiseAbs().maxCoeff() == 0.0);

  CHECK(ThrownCode([&] { emb.Forward({5}); }) == ErrorCode::kInvalidArgument);
  CHECK(ThrownCode([&] { emb.Forward({-1}); }) ==
        ErrorCode::kInvalidArgument);
}

TEST_CASE("sinusoidal positions have the reference layout") {
  Mat pe = SinusoidalPositions(4, 6);
  CHECK(pe.rows() == 4);
  CHECK(pe.cols() == 6);
  for (int t = 0; t < 6; ++t) {
    CHECK(pe(0, t) == doctest::Approx(std::sin(t)).epsilon(1e-12));
    CHECK(pe(1, t) == doctest::Approx(std::cos(t)).epsilon(1e-12));
    CHECK(pe(2, t) ==
          doctest::Approx(std::sin(t * std::pow(10000.0, -0.5))).epsilon(1e-12));
  }
  CHECK(ThrownCode([] { SinusoidalPositions(5, 2); }) ==
        ErrorCode::kInvalidArgument);
}

TEST_CASE("self-attention is permutation-equivariant over positions") {
  ParamRegistry reg;
  Rng rng(8);
  MultiHeadSelfAttention attn(&reg, "a", 6, 2, &rng);
  Mat x = RandMat(&rng, 6, 5);
  Mat y = attn.Forward(Tensor::Constant(x)).value();

  std::vector<int> perm = {3, 0, 4, 1, 2};
  Mat xp(6, 5);
  for (int j = 0; j < 5; ++j) xp.col(j) = x.col(perm[j]);
  Mat yp = attn.Forward(Tensor::Constant(xp)).value();
  for (int j = 0; j < 5; ++j) {
    CHECK((yp.col(j) - y.col(perm[j])).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("transformer block preserves shape and has exact gradients") {
  ParamRegistry reg;
  Rng rng(9);
  TransformerConfig cfg;
  cfg.channels = 4;
  cfg.ffn_channels = 8;
  cfg.heads = 2;
  cfg.layers = 1;
  TransformerBlock blk(&reg, "blk", cfg, &rng);
  Mat x0 = RandMat(&rng, 4, 3);
  Tensor y = blk.Forward(Tensor::Constant(x0), nullptr);
  CHECK(y.rows() == 4);
  CHECK(y.cols() == 3);

  auto loss = [&] {
    return SumAll(Square(blk.Forward(Tensor::Constant(x0), nullptr)));
  };
  CheckModuleGrads(loss, &reg, 1e-4, 3);
  CheckInputGrad(
      [&](const Tensor& x) { return SumAll(Square(blk.Forward(x, nullptr))); },
      x0, 1e-4);
}

TEST_CASE("transformer stack is deterministic and position-sensitive") {
  ParamRegistry reg;
  Rng rng(10);
  TransformerConfig cfg;
  cfg.channels = 6;
  cfg.ffn_channels = 12;
  cfg.heads = 2;
  cfg.layers = 2;
  TransformerStack stack(&reg, "enc", cfg, &rng);

  Mat x = RandMat(&rng, 6, 4);
  x.col(2) = x.col(0);  // two identical tokens at different positions
  Mat y1 = stack.Forward(Tensor::Constant(x), nullptr).value();
  Mat y2 = stack.Forward(Tensor::Constant(x), nullptr).value();
  CHECK(y1 == y2);
  CHECK((y1.col(0) - y1.col(2)).cwiseAbs().maxCoeff() > 1e-6);

  Rng drop(1);
  Mat y3 = stack.Forward(Tensor::Constant(x), &drop).value();
  CHECK((y1 - y3).cwiseAbs().maxCoeff() > 1e-9);
}

TEST_CASE("wavenet stack conditions and differentiates") {
  ParamRegistry reg;
  Rng rng(11);
  WaveNetConfig cfg;
  cfg.hidden = 4;
  cfg.kernel = 3;
  cfg.dilation_rate = 2;
  cfg.layers = 3;
  cfg.g_channels = 3;
  WaveNetStack wn(&reg, "wn", cfg, &rng);

  Mat x0 = RandMat(&rng, 4, 6);
  Mat g0 = RandMat(&rng, 3, 1);
  Tensor y = wn.Forward(Tensor::Constant(x0), Tensor::Constant(g0), nullptr);
  CHECK(y.rows() == 4);
  CHECK(y.cols() == 6);

  // Conditioning is live.
  Mat g1 = g0;
  g1(0, 0) += 1.0;
  Mat y1 =
      wn.Forward(Tensor::Constant(x0), Tensor::Constant(g1), nullptr).value();
  CHECK((y.value() - y1).cwiseAbs().maxCoeff() > 1e-9);

  CHECK(ThrownCode([&] {
          wn.Forward(Tensor::Constant(x0), Tensor::Constant(Mat::Zero(2, 1)),
                     nullptr);
        }) == ErrorCode::kShapeMismatch);

  auto loss = [&] {
    return SumAll(Square(
        wn.Forward(Tensor::Constant(x0), Tensor::Constant(g0), nullptr)));
  };
  CheckModuleGrads(loss, &reg, 1e-4, 3);
  CheckInputGrad(
      [&](const Tensor& x) {
        return SumAll(
            Square(wn.Forward(x, Tensor::Constant(g0), nullptr)));
      },
      x0, 1e-4);
}

TEST_CASE("unconditioned wavenet rejects stray conditioning") {
  ParamRegistry reg;
  Rng rng(12);
  WaveNetConfig cfg;
  cfg.hidden = 2;
  cfg.kernel = 3;
  cfg.layers = 2;
  WaveNetStack wn(&reg, "wn", cfg, &rng);
  Mat x = RandMat(&rng, 2, 4);
  CHECK(wn.Forward(Tensor::Constant(x), Tensor(), nullptr).cols() == 4);
  CHECK(ThrownCode([&] {
          wn.Forward(Tensor::Constant(x), Tensor::Constant(Mat::Zero(1, 1)),
                     nullptr);
        }) == ErrorCode::kShapeMismatch);
}

TEST_CASE("dds conv stack keeps shape, conditions, differentiates") {
  ParamRegistry reg;
  Rng rng(13);
  DdsConvConfig cfg;
  cfg.channels = 4;
  cfg.kernel = 3;
  cfg.layers = 3;
  DdsConvStack dds(&reg, "dds", cfg, &rng);

  Mat x0 = RandMat(&rng, 4, 7);
  Mat g0 = RandMat(&rng, 4, 1);
  Tensor y = dds.Forward(Tensor::Constant(x0), Tensor::Constant(g0), nullptr);
  CHECK(y.rows() == 4);
  CHECK(y.cols() == 7);
  Mat y_nog =
      dds.Forward(Tensor::Constant(x0), Tensor(), nullptr).value();
  CHECK((y.value() - y_nog).cwiseAbs().maxCoeff() > 1e-9);

  auto loss = [&] {
    return SumAll(Square(
        dds.Forward(Tensor::Constant(x0), Tensor::Constant(g0), nullptr)));
  };
  CheckModuleGrads(loss, &reg, 1e-4, 3);
}

TEST_CASE("spline is identity outside the tail bound") {
  Rng rng(14);
  int bins = 4;
  Mat x(1, 3);
  x << -7.5, 6.0, 100.0;
  Mat params = RandMat(&rng, 3 * bins - 1, 3, 0.5);
  SplineResult res = RationalQuadraticForward(
      Tensor::Constant(x), Tensor::Constant(params), bins, 5.0);
  CHECK(res.y.value() == x);
  CHECK(res.logdet_map.value() == Mat::Zero(1, 3));
}

TEST_CASE("spline inverse undoes forward") {
  Rng rng(15);
  int bins = 10;
  for (int trial = 0; trial < 20; ++trial) {
    Mat x = RandMat(&rng, 2, 6, 3.0);  // mixes inside/outside of [-5, 5]
    Mat params = RandMat(&rng, 2 * (3 * bins - 1), 6, 0.4);
    SplineResult res = RationalQuadraticForward(
        Tensor::Constant(x), Tensor::Constant(params), bins, 5.0);
    Mat back = RationalQuadraticInverse(res.y.value(), params, bins, 5.0);
    CHECK((back - x).cwiseAbs().maxCoeff() < 1e-8);
  }
}

TEST_CASE("spline is strictly monotonic") {
  Rng rng(16);
  int bins = 6;
  int n = 101;
  Mat x(1, n);
  for (int j = 0; j < n; ++j) x(0, j) = -6.0 + 12.0 * j / (n - 1);
  Mat col = RandMat(&rng, 3 * bins - 1, 1, 0.8);
  Mat params = col.replicate(1, n);
  Mat y = RationalQuadraticForward(Tensor::Constant(x),
                                   Tensor::Constant(params), bins, 5.0)
              .y.value();
  for (int j = 1; j < n; ++j) CHECK(y(0, j) > y(0, j - 1));
}

TEST_CASE("spline log-derivative matches finite differences") {
  Rng rng(17);
  int bins = 5;
  Mat col = RandMat(&rng, 3 * bins - 1, 1, 0.5);
  for (double xv : {-4.3, -1.1, 0.37, 2.9, 4.6}) {
    auto value_at = [&](double v) {
      Mat x(1, 1);
      x(0, 0) = v;
      return RationalQuadraticForward(Tensor::Constant(x),
                                      Tensor::Constant(col), bins, 5.0)
          .y.value()(0, 0);
    };
    Mat x(1, 1);
    x(0, 0) = xv;
    double ld = RationalQuadraticForward(Tensor::Constant(x),
                                         Tensor::Constant(col), bins, 5.0)
                    .logdet_map.value()(0, 0);
    double eps = 1e-6;
    double num = (value_at(xv + eps) - value_at(xv - eps)) / (2.0 * eps);
    CHECK(std::log(num) == doctest::Approx(ld).epsilon(1e-5));
  }
}

TEST_CASE("spline gradients are exact for x and parameters") {
  Rng master(18);
  int bins = 4;
  Mat x0(1, 5);
  x0 << -4.9, -1.3, 0.2, 2.4, 7.0;  // last point sits outside the domain
  Mat p0 = RandMat(&master, 3 * bins - 1, 5, 0.3);

  auto f = [bins](const std::vector<Tensor>& in) {
    SplineResult res = RationalQuadraticForward(in[0], in[1], bins, 5.0);
    return Add(SumAll(res.y), SumAll(res.logdet_map));
  };

  std::vector<Tensor> params = {Tensor::Parameter(x0), Tensor::Parameter(p0)};
  Tensor loss = f(params);
  loss.Backward();
  Mat ana_x = params[0].GradOrZero();
  Mat ana_p = params[1].GradOrZero();

  const double eps = 1e-6;
  auto eval = [&](const Mat& xm, const Mat& pm) {
    return f({Tensor::Constant(xm), Tensor::Constant(pm)}).item();
  };
  for (Eigen::Index j = 0; j < x0.cols(); ++j) {
    Mat up = x0, dn = x0;
    up(0, j) += eps;
    dn(0, j) -= eps;
    double num = (eval(up, p0) - eval(dn, p0)) / (2.0 * eps);
    CHECK_MESSAGE(
        std::abs(num - ana_x(0, j)) <= 1e-4 * (1.0 + std::abs(num)),
        "x entry " << j << ": analytic " << ana_x(0, j) << " numeric "
                   << num);
  }
  for (Eigen::Index j = 0; j < p0.cols(); ++j) {
    for (Eigen::Index i = 0; i < p0.rows(); ++i) {
      Mat up = p0, dn = p0;
      up(i, j) += eps;
      dn(i, j) -= eps;
      double num = (eval(x0, up) - eval(x0, dn)) / (2.0 * eps);
      CHECK_MESSAGE(
          std::abs(num - ana_p(i, j)) <= 1e-4 * (1.0 + std::abs(num)),
          "param (" << i << "," << j << "): analytic " << ana_p(i, j)
                    << " numeric " << num);
    }
  }
  // The out-of-domain column is an identity passthrough: no parameter there
  // can matter.
  CHECK(ana_p.col(4).cwiseAbs().maxCoeff() == 0.0);
  CHECK(ana_x(0, 4) == 1.0);
}

TEST_CASE("spline rejects malformed parameter blocks") {
  Mat x = Mat::Zero(2, 3);
  CHECK(ThrownCode([&] {
          RationalQuadraticForward(Tensor::Constant(x),
                                   Tensor::Constant(Mat::Zero(5, 3)), 4, 5.0);
        }) == ErrorCode::kShapeMismatch);
  CHECK(ThrownCode([&] {
          RationalQuadraticForward(Tensor::Constant(x),
                                   Tensor::Constant(Mat::Zero(22, 4)), 4,
                                   5.0);
        }) == ErrorCode::kShapeMismatch);
  CHECK(ThrownCode([&] {
          RationalQuadraticForward(Tensor::Constant(x),
                                   Tensor::Constant(Mat::Zero(4, 3)), 1, 5.0);
        }) == ErrorCode::kInvalidArgument);
}

}  // namespace xltts
