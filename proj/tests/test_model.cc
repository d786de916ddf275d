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
#include <numeric>
#include <string>
#include <vector>

#include <Eigen/LU>

#include "audio/stft.h"
#include "audio/wav.h"
#include "core/checkpoint.h"
#include "data/manifest.h"
#include "model/config.h"
#include "model/content_encoder.h"
#include "model/discriminator.h"
#include "model/emotion_encoder.h"
#include "model/flow.h"
#include "model/generator.h"
#include "model/mas.h"
#include "model/posterior_encoder.h"
#include "model/sdp.h"
#include "model/speaker_encoder.h"
#include "model/synthesizer.h"
#include "model/text_encoder.h"
#include "text/vocab.h"
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

// Narrow preset sized for unit tests; structure mirrors the real model.
ModelConfig Tiny() {
  ModelConfig c;
  c.char_embed = 12;
  c.lang_embed = 4;
  c.ffn = 24;
  c.heads = 2;
  c.text_layers = 2;
  c.d_z = 8;
  c.spec_bins = 33;
  c.post_hidden = 12;
  c.post_layers = 3;
  c.wn_kernel = 5;
  c.flow_couplings = 2;
  c.flow_wn_layers = 2;
  c.flow_hidden = 12;
  c.sdp_filter = 12;
  c.sdp_kernel = 3;
  c.sdp_layers = 2;
  c.sdp_bins = 4;
  c.sdp_flows = 2;
  c.d_spk = 6;
  c.d_emo = 5;
  c.d_content = 7;
  c.gin = 8;
  c.gen_initial = 16;
  c.upsample = {2, 2};
  c.up_kernels = {4, 4};
  c.mrf_kernels = {3};
  c.mrf_dilations = {1, 2};
  c.mpd_periods = {2, 3, 5};
  c.mpd_channels = {2, 3};
  // Grouped-conv channel plan divides by {1, 4, 16, 16, 16}.
  c.msd_channels = {16, 16, 16, 16, 16};
  c.dropout = 0.0;
  return c;
}

SpeakerEncoderConfig TinySpk() {
  SpeakerEncoderConfig c;
  c.d_spk = 6;
  c.channels = {2, 3};
  c.num_speakers = 3;
  return c;
}

EmotionEncoderConfig TinyEmo() {
  EmotionEncoderConfig c;
  c.d_emo = 5;
  c.cnn_channels = {2, 3, 4};
  c.t_channels = 4;
  c.t_layers = 1;
  c.heads = 2;
  c.ffn = 8;
  c.dropout = 0.0;
  return c;
}

ContentEncoderConfig TinyContent() {
  ContentEncoderConfig c;
  c.d_content = 7;
  return c;
}

Waveform MakeWave(double seconds, uint64_t seed) {
  Waveform w;
  w.sample_rate = kCanonicalSampleRate;
  const int n = static_cast<int>(seconds * kCanonicalSampleRate);
  w.samples.resize(n);
  Rng rng(seed);
  for (int i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / kCanonicalSampleRate;
    w.samples[i] =
        0.4 * std::sin(6.283185307179586 * 220.0 * t) + 0.1 * rng.Normal();
  }
  return w;
}

double MaxAbsDiff(const Mat& a, const Mat& b) {
  REQUIRE(a.rows() == b.rows());
  REQUIRE(a.cols() == b.cols());
  return (a - b).cwiseAbs().maxCoeff();
}

// Adds noise to every parameter whose name starts with `prefix`, so maps
// that are the identity at init become non-trivial.
void PerturbParams(ParamRegistry* reg, const std::string& prefix,
                   double scale, uint64_t seed) {
  Rng rng(seed);
  for (const auto& [name, p_const] : reg->params()) {
    if (name.rfind(prefix, 0) != 0) continue;
    Tensor p = p_const;  // shared handle; gives non-const access
    p.mutable_value() +=
        RandMat(&rng, static_cast<int>(p.rows()), static_cast<int>(p.cols()),
                scale);
  }
}

// Exhaustive alignment reference: tries every way to give each token at
// least one frame, keeps the best total log-likelihood, and on ties keeps
// the duration tuple that transitions latest (lexicographically largest
// tuple = lexicographically smallest frame-to-token map).
struct BruteMas {
  std::vector<int> durations;
  double score = 0.0;
};

BruteMas BruteForceAlign(const Mat& ll) {
  const int num_tokens = static_cast<int>(ll.rows());
  const int num_frames = static_cast<int>(ll.cols());
  std::vector<int> cur(num_tokens, 0);
  BruteMas best;
  bool have = false;
  constexpr double kTieEps = 1e-9;
  std::function<void(int, int)> place = [&](int token, int frames_left) {
    if (token == num_tokens - 1) {
      cur[token] = frames_left;
      double s = 0.0;
      int t = 0;
      for (int l = 0; l < num_tokens; ++l) {
        for (int k = 0; k < cur[l]; ++k) s += ll(l, t++);
      }
      if (!have || s > best.score + kTieEps) {
        best.durations = cur;
        best.score = s;
        have = true;
      } else if (s >= best.score - kTieEps && cur > best.durations) {
        best.durations = cur;
      }
      return;
    }
    const int reserve = num_tokens - 1 - token;
    for (int d = 1; d + reserve <= frames_left; ++d) {
      cur[token] = d;
      place(token + 1, frames_left - d);
    }
  };
  place(0, num_frames);
  return best;
}

}  // namespace

TEST_CASE("model config json round trip and presets") {
  ModelConfig tiny = Tiny();
  tiny.posterior_use_emotion = false;
  ModelConfig back = ModelConfig::FromJson(tiny.ToJson());
  CHECK(back == tiny);
  CHECK_FALSE(back.posterior_use_emotion);

  CHECK(Tiny().hidden() == 16);
  CHECK(Tiny().hop() == 4);
  CHECK(ModelConfig::Desk().hop() == 256);
  CHECK(ModelConfig::Paper().hop() == 256);
  CHECK(ModelConfig::Paper().posterior_use_emotion);
  CHECK_FALSE(ModelConfig::Desk() == ModelConfig::Paper());

  CHECK(ThrownCode([] { ModelConfig::FromJson("{\"nope\":1}"); }) ==
        ErrorCode::kInvalidArgument);
}

TEST_CASE("text encoder shapes, determinism, and style liveness") {
  const ModelConfig cfg = Tiny();
  Vocab vocab = Vocab::Build({"abc def"});
  ParamRegistry reg;
  Rng rng(1);
  TextEncoder enc(&reg, cfg, vocab.size(), &rng);
  TextSequence seq = EncodeText("abc", "en", vocab);
  REQUIRE(seq.ids.size() == 3);

  Rng style(2);
  Tensor spk = Tensor::Constant(RandMat(&style, cfg.d_spk, 1));
  Tensor emo = Tensor::Constant(RandMat(&style, cfg.d_emo, 1));
  PriorStats a = enc.Forward(seq, spk, emo, nullptr);
  CHECK(a.hidden.rows() == cfg.hidden());
  CHECK(a.hidden.cols() == 3);
  CHECK(a.mu.rows() == cfg.d_z);
  CHECK(a.mu.cols() == 3);
  CHECK(a.log_sigma.rows() == cfg.d_z);
  CHECK(a.log_sigma.value().allFinite());

  PriorStats b = enc.Forward(seq, spk, emo, nullptr);
  CHECK(MaxAbsDiff(a.mu.value(), b.mu.value()) == 0.0);
  CHECK(MaxAbsDiff(a.hidden.value(), b.hidden.value()) == 0.0);

  // Both style inputs must move the prior.
  Tensor spk2 = Tensor::Constant(RandMat(&style, cfg.d_spk, 1));
  Tensor emo2 = Tensor::Constant(RandMat(&style, cfg.d_emo, 1));
  CHECK(MaxAbsDiff(enc.Forward(seq, spk2, emo, nullptr).mu.value(),
                   a.mu.value()) > 1e-8);
  CHECK(MaxAbsDiff(enc.Forward(seq, spk, emo2, nullptr).mu.value(),
                   a.mu.value()) > 1e-8);
}

TEST_CASE("text encoder input contracts") {
  const ModelConfig cfg = Tiny();
  Vocab vocab = Vocab::Build({"abc"});
  ParamRegistry reg;
  Rng rng(1);
  TextEncoder enc(&reg, cfg, vocab.size(), &rng);
  Rng style(2);
  Tensor spk = Tensor::Constant(RandMat(&style, cfg.d_spk, 1));
  Tensor emo = Tensor::Constant(RandMat(&style, cfg.d_emo, 1));

  TextSequence empty;
  empty.ids.clear();
  CHECK(ThrownCode([&] { enc.Forward(empty, spk, emo, nullptr); }) ==
        ErrorCode::kEmptyText);

  TextSequence seq = EncodeText("abc", "en", vocab);
  Tensor bad_spk = Tensor::Constant(RandMat(&style, cfg.d_spk + 1, 1));
  CHECK(ThrownCode([&] { enc.Forward(seq, bad_spk, emo, nullptr); }) ==
        ErrorCode::kDimensionMismatch);
}

TEST_CASE("posterior encoder mean path and sampling") {
  const ModelConfig cfg = Tiny();
  ParamRegistry reg;
  Rng rng(3);
  PosteriorEncoder post(&reg, cfg, &rng);

  Rng data(4);
  Spectrogram spec;
  spec.kind = Spectrogram::Kind::kLinear;
  spec.magnitudes = RandMat(&data, cfg.spec_bins, 9).cwiseAbs();
  Tensor g = Tensor::Constant(RandMat(&data, cfg.gin, 1));

  // No noise source pins z to the mean exactly.
  LatentSequence mean_path = post.Forward(spec, g, nullptr, nullptr);
  CHECK(mean_path.z.rows() == cfg.d_z);
  CHECK(mean_path.z.cols() == 9);
  CHECK(MaxAbsDiff(mean_path.z.value(), mean_path.mu.value()) == 0.0);
  CHECK(mean_path.log_sigma.value().allFinite());

  Rng n1(7), n2(7), n3(8);
  LatentSequence s1 = post.Forward(spec, g, &n1, nullptr);
  LatentSequence s2 = post.Forward(spec, g, &n2, nullptr);
  LatentSequence s3 = post.Forward(spec, g, &n3, nullptr);
  CHECK(MaxAbsDiff(s1.z.value(), s2.z.value()) == 0.0);
  CHECK(MaxAbsDiff(s1.z.value(), s3.z.value()) > 1e-8);
  // Stats do not depend on the noise draw.
  CHECK(MaxAbsDiff(s1.mu.value(), mean_path.mu.value()) == 0.0);
}

TEST_CASE("posterior encoder input contracts") {
  const ModelConfig cfg = Tiny();
  ParamRegistry reg;
  Rng rng(3);
  PosteriorEncoder post(&reg, cfg, &rng);
  Rng data(4);
  Tensor g = Tensor::Constant(RandMat(&data, cfg.gin, 1));

  Spectrogram mel;
  mel.kind = Spectrogram::Kind::kMel;
  mel.magnitudes = RandMat(&data, cfg.spec_bins, 5).cwiseAbs();
  CHECK(ThrownCode([&] { post.Forward(mel, g, nullptr, nullptr); }) ==
        ErrorCode::kInvalidArgument);

  Spectrogram wrong;
  wrong.kind = Spectrogram::Kind::kLinear;
  wrong.magnitudes = RandMat(&data, cfg.spec_bins - 1, 5).cwiseAbs();
  CHECK(ThrownCode([&] { post.Forward(wrong, g, nullptr, nullptr); }) ==
        ErrorCode::kDimensionMismatch);

  Spectrogram ok;
  ok.kind = Spectrogram::Kind::kLinear;
  ok.magnitudes = RandMat(&data, cfg.spec_bins, 5).cwiseAbs();
  Tensor bad_g = Tensor::Constant(RandMat(&data, cfg.gin + 2, 1));
  CHECK(ThrownCode([&] { post.Forward(ok, bad_g, nullptr, nullptr); }) ==
        ErrorCode::kDimensionMismatch);
}

TEST_CASE("flow is the identity at init") {
  const ModelConfig cfg = Tiny();
  ParamRegistry reg;
  Rng rng(5);
  FlowDecoder flow(&reg, cfg, &rng);

  Rng data(6);
  Mat z0 = RandMat(&data, cfg.d_z, 7);
  Tensor z = Tensor::Constant(z0);
  Tensor g = Tensor::Constant(RandMat(&data, cfg.gin, 1));

  FlowResult fwd = flow.Forward(z, g);
  CHECK(MaxAbsDiff(fwd.z.value(), z0) == 0.0);
  CHECK(fwd.logdet.item() == 0.0);
  CHECK(MaxAbsDiff(flow.Inverse(z, g).value(), z0) == 0.0);
}

TEST_CASE("flow inverts its forward map after perturbation") {
  const ModelConfig cfg = Tiny();
  ParamRegistry reg;
  Rng rng(5);
  FlowDecoder flow(&reg, cfg, &rng);
  PerturbParams(&reg, "flow.", 0.1, 99);

  Rng data(6);
  Mat z0 = RandMat(&data, cfg.d_z, 7);
  Tensor g = Tensor::Constant(RandMat(&data, cfg.gin, 1));
  FlowResult fwd = flow.Forward(Tensor::Constant(z0), g);
  CHECK(MaxAbsDiff(fwd.z.value(), z0) > 1e-6);  // no longer the identity
  CHECK(fwd.logdet.item() != 0.0);

  Tensor back = flow.Inverse(Tensor::Constant(fwd.z.value()), g);
  CHECK(MaxAbsDiff(back.value(), z0) < 1e-10);

  // The style vector conditions the map.
  Tensor g2 = Tensor::Constant(RandMat(&data, cfg.gin, 1));
  FlowResult other = flow.Forward(Tensor::Constant(z0), g2);
  CHECK(MaxAbsDiff(other.z.value(), fwd.z.value()) > 1e-8);
}

TEST_CASE("flow log-determinant matches its Jacobian") {
  ModelConfig cfg = Tiny();
  cfg.d_z = 4;
  cfg.flow_hidden = 6;
  ParamRegistry reg;
  Rng rng(5);
  FlowDecoder flow(&reg, cfg, &rng);
  PerturbParams(&reg, "flow.", 0.15, 42);

  const int rows = cfg.d_z;
  const int cols = 3;
  Rng data(6);
  Mat z0 = RandMat(&data, rows, cols);
  Tensor g = Tensor::Constant(RandMat(&data, cfg.gin, 1));

  // One reverse pass per output entry gives the exact Jacobian row by row.
  const int n = rows * cols;
  Mat jac(n, n);
  for (int j = 0; j < cols; ++j) {
    for (int i = 0; i < rows; ++i) {
      Tensor z = Tensor::Parameter(z0);
      FlowResult r = flow.Forward(z, g);
      Mat pick = Mat::Zero(rows, cols);
      pick(i, j) = 1.0;
      SumAll(Mul(r.z, Tensor::Constant(pick))).Backward();
      const Mat gz = z.GradOrZero();
      for (int jj = 0; jj < cols; ++jj) {
        for (int ii = 0; ii < rows; ++ii) {
          jac(i + j * rows, ii + jj * rows) = gz(ii, jj);
        }
      }
    }
  }
  const double logdet = flow.Forward(Tensor::Constant(z0), g).logdet.item();
  CHECK(std::log(std::abs(jac.determinant())) ==
        doctest::Approx(logdet).epsilon(1e-8));
}

TEST_CASE("flow input contracts") {
  ModelConfig odd = Tiny();
  odd.d_z = 7;
  ParamRegistry reg1;
  Rng rng(5);
  CHECK(ThrownCode([&] { FlowDecoder f(&reg1, odd, &rng); }) ==
        ErrorCode::kOddChannelCount);

  const ModelConfig cfg = Tiny();
  ParamRegistry reg2;
  FlowDecoder flow(&reg2, cfg, &rng);
  Rng data(6);
  Tensor g = Tensor::Constant(RandMat(&data, cfg.gin, 1));
  Tensor bad_z = Tensor::Constant(RandMat(&data, cfg.d_z + 2, 4));
  CHECK(ThrownCode([&] { flow.Forward(bad_z, g); }) ==
        ErrorCode::kDimensionMismatch);
  Tensor z = Tensor::Constant(RandMat(&data, cfg.d_z, 4));
  Tensor bad_g = Tensor::Constant(RandMat(&data, cfg.gin, 2));
  CHECK(ThrownCode([&] { flow.Inverse(z, bad_g); }) ==
        ErrorCode::kDimensionMismatch);
}

TEST_CASE("gaussian frame log-likelihood table") {
  // One token, one frame, two latent dims: check against the closed form.
  Mat mu(2, 1), logs(2, 1), frame(2, 1);
  mu << 0.5, -1.0;
  logs << 0.1, -0.2;
  frame << 1.0, 0.3;
  const double log2pi = std::log(2.0 * 3.14159265358979323846);
  double want = 0.0;
  for (int d = 0; d < 2; ++d) {
    const double diff = frame(d, 0) - mu(d, 0);
    want += log2pi + 2.0 * logs(d, 0) +
            diff * diff * std::exp(-2.0 * logs(d, 0));
  }
  want *= -0.5;
  Mat ll = GaussianFrameLogLik(mu, logs, frame);
  REQUIRE(ll.rows() == 1);
  REQUIRE(ll.cols() == 1);
  CHECK(ll(0, 0) == doctest::Approx(want).epsilon(1e-12));

  // Shapes: [d x L] stats against [d x T] frames -> [L x T].
  Rng rng(9);
  Mat mu2 = RandMat(&rng, 3, 4);
  Mat logs2 = RandMat(&rng, 3, 4, 0.2);
  Mat frames2 = RandMat(&rng, 3, 6);
  Mat table = GaussianFrameLogLik(mu2, logs2, frames2);
  CHECK(table.rows() == 4);
  CHECK(table.cols() == 6);

  CHECK(ThrownCode([&] {
          GaussianFrameLogLik(mu2, RandMat(&rng, 3, 5), frames2);
        }) == ErrorCode::kDimensionMismatch);
  CHECK(ThrownCode([&] {
          GaussianFrameLogLik(mu2, logs2, RandMat(&rng, 2, 6));
        }) == ErrorCode::kDimensionMismatch);
}

TEST_CASE("alignment search matches exhaustive enumeration") {
  Rng rng(1234);
  int tie_cases = 0;
  for (int trial = 0; trial < 1200; ++trial) {
    const int num_tokens = 1 + static_cast<int>(rng.UniformInt(5));
    const int num_frames =
        num_tokens + static_cast<int>(rng.UniformInt(
                         static_cast<uint64_t>(9 - num_tokens)));
    Mat ll(num_tokens, num_frames);
    const bool quantized = trial >= 600;
    for (Eigen::Index j = 0; j < ll.cols(); ++j) {
      for (Eigen::Index i = 0; i < ll.rows(); ++i) {
        // Quantized tables force exact score ties so the tie-break rule is
        // exercised; continuous tables check the generic argmax.
        ll(i, j) = quantized
                       ? 0.5 * (static_cast<double>(rng.UniformInt(5)) - 2.0)
                       : rng.Normal();
      }
    }
    BruteMas want = BruteForceAlign(ll);
    Alignment got = MasFromLogLik(ll);
    CHECK(got.durations == want.durations);
    if (quantized) {
      CHECK(got.score == want.score);  // sums of halves are exact
    } else {
      CHECK(got.score == doctest::Approx(want.score).epsilon(1e-12));
    }
    CHECK(std::accumulate(got.durations.begin(), got.durations.end(), 0) ==
          num_frames);
    if (quantized && num_tokens > 1) ++tie_cases;
  }
  CHECK(tie_cases > 100);  // the tie-heavy half actually ran
}

TEST_CASE("alignment search edges and expansion") {
  // Single token absorbs every frame.
  Rng edge_rng(2);
  Mat one = RandMat(&edge_rng, 1, 5);
  Alignment a = MasFromLogLik(one);
  CHECK(a.durations == std::vector<int>{5});
  CHECK(a.score == doctest::Approx(one.sum()).epsilon(1e-12));

  CHECK(ThrownCode([] { MasFromLogLik(Mat()); }) ==
        ErrorCode::kInvalidArgument);
  CHECK(ThrownCode([] { MasFromLogLik(Mat::Zero(4, 3)); }) ==
        ErrorCode::kFewerFramesThanTokens);

  // Wrapper agrees with the two-step form.
  Rng rng(3);
  Mat mu = RandMat(&rng, 2, 3);
  Mat logs = RandMat(&rng, 2, 3, 0.1);
  Mat frames = RandMat(&rng, 2, 7);
  Alignment whole = MasAlign(mu, logs, frames);
  Alignment steps = MasFromLogLik(GaussianFrameLogLik(mu, logs, frames));
  CHECK(whole.durations == steps.durations);
  CHECK(whole.score == steps.score);

  CHECK(ExpandIndices({2, 1, 3}) ==
        std::vector<int>{0, 0, 1, 2, 2, 2});
  CHECK(ThrownCode([] { ExpandIndices({2, 0, 1}); }) ==
        ErrorCode::kNonPositiveDuration);
}

TEST_CASE("duration nll is finite, deterministic, and style-sensitive") {
  const ModelConfig cfg = Tiny();
  ParamRegistry reg;
  Rng rng(11);
  StochasticDurationPredictor sdp(&reg, cfg, &rng);

  const int len = 6;
  Rng data(12);
  Mat hidden0 = RandMat(&data, cfg.hidden(), len);
  Mat g0 = RandMat(&data, cfg.gin, 1);
  const std::vector<int> durations = {1, 2, 3, 1, 4, 2};

  Tensor hidden = Tensor::Parameter(hidden0);
  Tensor g = Tensor::Parameter(g0);
  Rng noise(13);
  Tensor nll = sdp.Nll(hidden, durations, g, &noise, nullptr);
  REQUIRE(nll.rows() == 1);
  REQUIRE(nll.cols() == 1);
  CHECK(std::isfinite(nll.item()));

  nll.Backward();
  // Style conditioning is live; the token representation is detached.
  CHECK(g.GradOrZero().norm() > 0.0);
  CHECK(hidden.GradOrZero().norm() == 0.0);

  Rng noise2(13);
  Tensor again = sdp.Nll(Tensor::Constant(hidden0), durations,
                         Tensor::Constant(g0), &noise2, nullptr);
  CHECK(again.item() == nll.item());

  Rng noise3(13);
  Mat g1 = RandMat(&data, cfg.gin, 1);
  Tensor other = sdp.Nll(Tensor::Constant(hidden0), durations,
                         Tensor::Constant(g1), &noise3, nullptr);
  CHECK(other.item() != nll.item());
}

TEST_CASE("duration nll input contracts") {
  const ModelConfig cfg = Tiny();
  ParamRegistry reg;
  Rng rng(11);
  StochasticDurationPredictor sdp(&reg, cfg, &rng);
  Rng data(12);
  Tensor hidden = Tensor::Constant(RandMat(&data, cfg.hidden(), 3));
  Tensor g = Tensor::Constant(RandMat(&data, cfg.gin, 1));
  Rng noise(13);

  CHECK(ThrownCode([&] {
          sdp.Nll(hidden, {1, 2, 3}, g, nullptr, nullptr);
        }) == ErrorCode::kInvalidArgument);
  CHECK(ThrownCode([&] { sdp.Nll(hidden, {1, 2}, g, &noise, nullptr); }) ==
        ErrorCode::kDimensionMismatch);
  CHECK(ThrownCode([&] {
          sdp.Nll(hidden, {1, 0, 2}, g, &noise, nullptr);
        }) == ErrorCode::kNonPositiveDuration);
}

TEST_CASE("duration sampling floors, determinism, and length scale") {
  const ModelConfig cfg = Tiny();
  ParamRegistry reg;
  Rng rng(11);
  StochasticDurationPredictor sdp(&reg, cfg, &rng);

  const int len = 24;
  Rng data(12);
  Mat hidden = RandMat(&data, cfg.hidden(), len);
  Mat g = RandMat(&data, cfg.gin, 1);

  Rng s1(77), s2(77), s3(78);
  std::vector<int> a = sdp.Sample(hidden, g, 0.3, 1.0, &s1);
  std::vector<int> b = sdp.Sample(hidden, g, 0.3, 1.0, &s2);
  REQUIRE(a.size() == static_cast<size_t>(len));
  CHECK(a == b);
  for (int d : a) CHECK(d >= 1);
  // Zero noise makes the draw seed-independent.
  Rng z1(1), z2(2);
  CHECK(sdp.Sample(hidden, g, 0.0, 1.0, &z1) ==
        sdp.Sample(hidden, g, 0.0, 1.0, &z2));

  // Shift the base-flow mean so raw durations sit near 20 frames, then
  // doubling length_scale must double the total up to ceiling slack.
  Tensor shift = reg.params().at("sdp.affine.m");
  shift.mutable_value()(0, 0) = -std::log(20.0);
  Rng l1(99), l2(99);
  std::vector<int> d1 = sdp.Sample(hidden, g, 0.3, 1.0, &l1);
  std::vector<int> d2 = sdp.Sample(hidden, g, 0.3, 2.0, &l2);
  const double sum1 = std::accumulate(d1.begin(), d1.end(), 0.0);
  const double sum2 = std::accumulate(d2.begin(), d2.end(), 0.0);
  CHECK(sum2 / sum1 > 1.8);
  CHECK(sum2 / sum1 < 2.2);

  CHECK(ThrownCode([&] { sdp.Sample(hidden, g, 0.3, 1.0, nullptr); }) ==
        ErrorCode::kInvalidArgument);
  CHECK(ThrownCode([&] { sdp.Sample(hidden, g, 0.3, 0.0, &s3); }) ==
        ErrorCode::kInvalidArgument);
}

TEST_CASE("generator output length, range, and conditioning") {
  const ModelConfig cfg = Tiny();
  ParamRegistry reg;
  Rng rng(21);
  Generator gen(&reg, cfg, &rng);

  Rng data(22);
  Tensor z = Tensor::Constant(RandMat(&data, cfg.d_z, 5));
  Tensor g = Tensor::Constant(RandMat(&data, cfg.gin, 1));
  Tensor wav = gen.Forward(z, g);
  REQUIRE(wav.rows() == 1);
  CHECK(wav.cols() == cfg.hop() * 5);
  CHECK(wav.value().cwiseAbs().maxCoeff() <= 1.0);

  Tensor g2 = Tensor::Constant(RandMat(&data, cfg.gin, 1));
  CHECK(MaxAbsDiff(gen.Forward(z, g2).value(), wav.value()) > 1e-10);

  Tensor bad_z = Tensor::Constant(RandMat(&data, cfg.d_z + 1, 5));
  CHECK(ThrownCode([&] { gen.Forward(bad_z, g); }) ==
        ErrorCode::kDimensionMismatch);
  Tensor bad_g = Tensor::Constant(RandMat(&data, cfg.gin, 3));
  CHECK(ThrownCode([&] { gen.Forward(z, bad_g); }) ==
        ErrorCode::kDimensionMismatch);
}

TEST_CASE("generator upsamples 256x with the full factor chain") {
  ModelConfig cfg = Tiny();
  cfg.gen_initial = 16;
  cfg.upsample = {8, 8, 2, 2};
  cfg.up_kernels = {16, 16, 4, 4};
  cfg.mrf_kernels = {3};
  cfg.mrf_dilations = {1};
  REQUIRE(cfg.hop() == 256);

  ParamRegistry reg;
  Rng rng(23);
  Generator gen(&reg, cfg, &rng);
  Rng data(24);
  Tensor z = Tensor::Constant(RandMat(&data, cfg.d_z, 2));
  Tensor g = Tensor::Constant(RandMat(&data, cfg.gin, 1));
  Tensor wav = gen.Forward(z, g);
  CHECK(wav.rows() == 1);
  CHECK(wav.cols() == 512);

  // A kernel narrower than its factor cannot cover the stuffed zeros.
  ModelConfig bad = cfg;
  bad.up_kernels = {4, 16, 4, 4};
  ParamRegistry reg2;
  CHECK(ThrownCode([&] { Generator g2(&reg2, bad, &rng); }) ==
        ErrorCode::kInvalidArgument);
}

TEST_CASE("discriminator set inventory and input contracts") {
  const ModelConfig cfg = Tiny();
  ParamRegistry reg;
  Rng rng(31);
  DiscriminatorSet disc(&reg, cfg, &rng);

  Rng data(32);
  Tensor wav = Tensor::Constant(RandMat(&data, 1, 4096, 0.3));
  DiscOutput out = disc.Forward(wav);
  const size_t want = cfg.mpd_periods.size() + 3;
  REQUIRE(out.logits.size() == want);
  REQUIRE(out.features.size() == want);
  for (size_t i = 0; i < want; ++i) {
    CHECK(out.logits[i].value().allFinite());
    CHECK(out.logits[i].cols() >= 1);
    CHECK(out.features[i].size() >= 2);
  }

  Tensor fake = Tensor::Constant(RandMat(&data, 1, 4096, 0.3));
  auto pair = disc.ForwardPair(wav, fake);
  CHECK(pair.first.logits.size() == want);
  CHECK(pair.second.logits.size() == want);

  Tensor shorter = Tensor::Constant(RandMat(&data, 1, 4000, 0.3));
  CHECK(ThrownCode([&] { disc.ForwardPair(wav, shorter); }) ==
        ErrorCode::kLengthMismatch);
  Tensor stereo = Tensor::Constant(RandMat(&data, 2, 256, 0.3));
  CHECK(ThrownCode([&] { disc.Forward(stereo); }) ==
        ErrorCode::kShapeMismatch);
}

TEST_CASE("speaker encoder embedding contract") {
  ParamRegistry reg;
  Rng rng(41);
  SpeakerEncoder enc(&reg, TinySpk(), &rng);

  Waveform w = MakeWave(1.2, 5);
  Tensor e = enc.Embed(w);
  REQUIRE(e.rows() == 6);
  REQUIRE(e.cols() == 1);
  CHECK(e.value().norm() == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(MaxAbsDiff(enc.Embed(w).value(), e.value()) == 0.0);

  Waveform w2 = MakeWave(1.2, 6);
  CHECK(MaxAbsDiff(enc.Embed(w2).value(), e.value()) > 1e-8);

  Waveform brief = MakeWave(0.8, 7);
  CHECK(ThrownCode([&] { enc.Embed(brief); }) == ErrorCode::kTooShort);

  Tensor logits = enc.CosineLogits(e);
  REQUIRE(logits.rows() == 3);
  REQUIRE(logits.cols() == 1);
  CHECK(logits.value().cwiseAbs().maxCoeff() <= 1.0 + 1e-9);
  Tensor bad = Tensor::Constant(Mat::Zero(7, 1));
  CHECK(ThrownCode([&] { enc.CosineLogits(bad); }) ==
        ErrorCode::kDimensionMismatch);

  SpeakerEncoderConfig back = SpeakerEncoderConfig::FromJson(
      TinySpk().ToJson());
  CHECK(back.d_spk == 6);
  CHECK(back.channels == std::vector<int>{2, 3});
  CHECK(back.num_speakers == 3);
  CHECK(ThrownCode([] { SpeakerEncoderConfig::FromJson("{}"); }) ==
        ErrorCode::kInvalidArgument);
}

TEST_CASE("emotion encoder embedding contract") {
  ParamRegistry reg;
  Rng rng(51);
  EmotionEncoder enc(&reg, TinyEmo(), &rng);

  Waveform w = MakeWave(1.1, 8);
  Tensor e = enc.Embed(w);
  REQUIRE(e.rows() == 5);
  REQUIRE(e.cols() == 1);
  CHECK(e.value().norm() == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(MaxAbsDiff(enc.Embed(w).value(), e.value()) == 0.0);
  CHECK(ThrownCode([&] { enc.Embed(MakeWave(0.5, 9)); }) ==
        ErrorCode::kTooShort);

  Spectrogram mel = MelSpectrogram(w);
  Mat logmel = mel.magnitudes.array().max(1e-5).log().matrix();
  Tensor penult = enc.PenultimateMel(Tensor::Constant(logmel), nullptr);
  REQUIRE(penult.rows() == 5);
  Tensor logits = enc.ClassLogits(penult);
  CHECK(logits.rows() == kNumEmotions);
  CHECK(logits.cols() == 1);
  CHECK(logits.value().allFinite());
  Tensor bad = Tensor::Constant(Mat::Zero(6, 1));
  CHECK(ThrownCode([&] { enc.ClassLogits(bad); }) ==
        ErrorCode::kDimensionMismatch);

  EmotionEncoderConfig back = EmotionEncoderConfig::FromJson(
      TinyEmo().ToJson());
  CHECK(back.d_emo == 5);
  CHECK(back.t_channels == 4);
  CHECK(ThrownCode([] { EmotionEncoderConfig::FromJson("broken"); }) ==
        ErrorCode::kInvalidArgument);
}

TEST_CASE("content encoder determinism and length map") {
  ContentEncoder enc(TinyContent());
  const Eigen::Index min_n = enc.MinSamples();
  CHECK(min_n > 0);
  CHECK(enc.OutputFrames(min_n) == 1);
  CHECK(enc.OutputFrames(min_n - 1) < 1);

  Rng data(61);
  for (Eigen::Index n : {min_n, min_n + 37, min_n + 275}) {
    Tensor x = Tensor::Constant(RandMat(&data, 1, static_cast<int>(n), 0.3));
    Tensor y = enc.Forward(x);
    CHECK(y.rows() == 7);
    CHECK(y.cols() == enc.OutputFrames(n));
    CHECK(y.value().allFinite());
  }

  // Weights come from a pinned seed: two instances agree exactly.
  ContentEncoder twin(TinyContent());
  Tensor x = Tensor::Constant(RandMat(&data, 1, static_cast<int>(min_n)));
  CHECK(MaxAbsDiff(enc.Forward(x).value(), twin.Forward(x).value()) == 0.0);

  Tensor silent = Tensor::Constant(Mat::Zero(1, min_n));
  CHECK(enc.Forward(silent).value().allFinite());

  CHECK(ThrownCode([&] {
          enc.Forward(Tensor::Constant(Mat::Zero(2, min_n)));
        }) == ErrorCode::kShapeMismatch);
  CHECK(ThrownCode([&] {
          enc.Forward(Tensor::Constant(Mat::Zero(1, min_n - 1)));
        }) == ErrorCode::kTooShort);

  ContentEncoderConfig other;
  other.kind = "external-ssl";
  CHECK(ThrownCode([&] { ContentEncoder e(other); }) ==
        ErrorCode::kEncoderUnavailable);
}

TEST_CASE("content encoder gradient reaches the waveform") {
  ContentEncoderConfig cfg;
  cfg.d_content = 4;
  ContentEncoder enc(cfg);
  const int n = static_cast<int>(enc.MinSamples()) + 35;

  Rng data(62);
  Mat x0 = RandMat(&data, 1, n, 0.3);
  auto loss_of = [&](const Tensor& x) { return SumAll(Square(enc.Forward(x))); };

  Tensor x = Tensor::Parameter(x0);
  loss_of(x).Backward();
  Mat ana = x.GradOrZero();
  CHECK(ana.norm() > 0.0);

  const double eps = 1e-5;
  for (int s = 0; s < 25; ++s) {
    const int j = s * (n - 1) / 24;
    Mat up = x0, dn = x0;
    up(0, j) += eps;
    dn(0, j) -= eps;
    const double num = (loss_of(Tensor::Constant(up)).item() -
                        loss_of(Tensor::Constant(dn)).item()) /
                       (2.0 * eps);
    const double denom = 1.0 + std::max(std::abs(num), std::abs(ana(0, j)));
    CHECK_MESSAGE(std::abs(num - ana(0, j)) <= 1e-5 * denom,
                  "sample " << j << ": analytic " << ana(0, j) << " numeric "
                            << num);
  }
}

TEST_CASE("synthesizer end-to-end determinism") {
  const ModelConfig cfg = Tiny();
  Vocab vocab = Vocab::Build({"hello world"});
  Synthesizer synth(cfg, vocab, TinySpk(), TinyEmo(), TinyContent(), 11);

  SynthesisRequest req;
  req.text = "hello";
  req.lang = "en";
  req.speaker_ref = MakeWave(1.2, 5);
  req.emotion_ref = MakeWave(1.1, 6);
  req.seed = 3;

  Waveform a = synth.Synthesize(req);
  CHECK(a.sample_rate == kCanonicalSampleRate);
  REQUIRE(!a.samples.empty());
  CHECK(a.samples.size() % cfg.hop() == 0);
  for (double v : a.samples) REQUIRE(std::abs(v) <= 1.0);

  Waveform b = synth.Synthesize(req);
  CHECK(a.samples == b.samples);

  req.seed = 4;
  Waveform c = synth.Synthesize(req);
  CHECK(a.samples != c.samples);

  req.seed = 3;
  req.speaker_ref = MakeWave(1.3, 15);
  Waveform d = synth.Synthesize(req);
  CHECK(a.samples != d.samples);

  req.speaker_ref = MakeWave(0.4, 5);
  CHECK(ThrownCode([&] { synth.Synthesize(req); }) ==
        ErrorCode::kReferenceTooShort);
}

TEST_CASE("synthesizer checkpoint round trip and corruption") {
  const ModelConfig cfg = Tiny();
  Vocab vocab = Vocab::Build({"hello world"});
  Synthesizer synth(cfg, vocab, TinySpk(), TinyEmo(), TinyContent(), 11);

  SynthesisRequest req;
  req.text = "world";
  req.lang = "en";
  req.speaker_ref = MakeWave(1.2, 5);
  req.emotion_ref = MakeWave(1.1, 6);
  req.seed = 9;
  Waveform want = synth.Synthesize(req);

  Checkpoint ckpt;
  synth.SaveInto(&ckpt, 123);
  CHECK(ckpt.meta.at("step").get<int64_t>() == 123);
  CHECK(ckpt.blobs.count("vocab") == 1);

  Synthesizer loaded = Synthesizer::LoadFrom(ckpt);
  Waveform got = loaded.Synthesize(req);
  CHECK(got.samples == want.samples);

  Checkpoint bad_hash = ckpt;
  bad_hash.meta["vocab_hash"] = 12345;
  CHECK(ThrownCode([&] { Synthesizer::LoadFrom(bad_hash); }) ==
        ErrorCode::kCorruptCheckpoint);

  Checkpoint missing = ckpt;
  missing.tensors.erase(missing.tensors.begin());
  CHECK(ThrownCode([&] { Synthesizer::LoadFrom(missing); }) ==
        ErrorCode::kCorruptCheckpoint);

  Checkpoint no_meta = ckpt;
  no_meta.meta.erase("model_config");
  CHECK(ThrownCode([&] { Synthesizer::LoadFrom(no_meta); }) ==
        ErrorCode::kCorruptCheckpoint);
}

TEST_CASE("synthesizer dimension checks and style routing") {
  const ModelConfig cfg = Tiny();
  Vocab vocab = Vocab::Build({"abc"});

  SpeakerEncoderConfig wide_spk = TinySpk();
  wide_spk.d_spk = 9;
  CHECK(ThrownCode([&] {
          Synthesizer s(cfg, vocab, wide_spk, TinyEmo(), TinyContent(), 1);
        }) == ErrorCode::kIncompatibleDimensions);

  ContentEncoderConfig wide_content = TinyContent();
  wide_content.d_content = 99;
  CHECK(ThrownCode([&] {
          Synthesizer s(cfg, vocab, TinySpk(), TinyEmo(), wide_content, 1);
        }) == ErrorCode::kIncompatibleDimensions);

  Synthesizer synth(cfg, vocab, TinySpk(), TinyEmo(), TinyContent(), 11);
  Rng data(71);
  Tensor spk = Tensor::Constant(RandMat(&data, cfg.d_spk, 1));
  Tensor emo1 = Tensor::Constant(RandMat(&data, cfg.d_emo, 1));
  Tensor emo2 = Tensor::Constant(RandMat(&data, cfg.d_emo, 1));

  Tensor g = synth.StyleVector(spk, emo1);
  REQUIRE(g.rows() == cfg.gin);
  REQUIRE(g.cols() == 1);
  CHECK(MaxAbsDiff(synth.StyleVector(spk, emo2).value(), g.value()) > 1e-10);

  // Default routing feeds emotion to the posterior too.
  CHECK(MaxAbsDiff(synth.PosteriorStyle(spk, emo1).value(),
                   synth.PosteriorStyle(spk, emo2).value()) > 1e-10);

  ModelConfig spk_only = cfg;
  spk_only.posterior_use_emotion = false;
  Synthesizer gated(spk_only, vocab, TinySpk(), TinyEmo(), TinyContent(), 11);
  CHECK(MaxAbsDiff(gated.PosteriorStyle(spk, emo1).value(),
                   gated.PosteriorStyle(spk, emo2).value()) == 0.0);
  // The shared style vector still carries emotion.
  CHECK(MaxAbsDiff(gated.StyleVector(spk, emo1).value(),
                   gated.StyleVector(spk, emo2).value()) > 1e-10);
}

}  // namespace xltts
