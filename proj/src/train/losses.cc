// Copyright (c) 2026 The xltts Authors
// SPDX-License-Identifier: Apache-2.0

#include "train/losses.h"

#include <cmath>
#include <cstddef>

namespace xltts {
namespace {

constexpr double kLogTwoPi = 1.8378770664093453;  // log(2*pi)

void CheckPairCount(std::size_t gen, std::size_t gt, const char* what) {
  if (gen == 0 || gen != gt) {
    throw Error(ErrorCode::kBatchSizeMismatch,
                std::string(what) + ": generated/ground-truth batch sizes " +
                    std::to_string(gen) + " vs " + std::to_string(gt));
  }
}

void CheckFinite(double v, const char* name) {
  if (!std::isfinite(v)) {
    throw Error(ErrorCode::kNonFiniteComponent,
                std::string("non-finite loss component: ") + name);
  }
}

}  // namespace

void LossConfig::Validate() const {
  const double values[] = {alpha_e,    alpha_s,   content_weight,
                           mel_weight, kl_weight, fm_weight};
  const char* names[] = {"alpha_e",    "alpha_s",   "content_weight",
                         "mel_weight", "kl_weight", "fm_weight"};
  for (int i = 0; i < 6; ++i) {
    if (!std::isfinite(values[i]) || values[i] < 0.0) {
      throw Error(ErrorCode::kInvalidArgument,
                  std::string("loss weight must be finite and >= 0: ") +
                      names[i]);
    }
  }
}

Tensor CosineVec(const Tensor& a, const Tensor& b) {
  Tensor dot = SumAll(Mul(a, b));
  Tensor norm_sq = Mul(SumAll(Square(a)), SumAll(Square(b)));
  return Div(dot, Sqrt(ClampMin(norm_sq, 1e-24)));
}

Tensor CosineConsistencyLoss(const std::vector<Tensor>& gen_emb,
                             const std::vector<Tensor>& target_emb,
                             double alpha) {
  CheckPairCount(gen_emb.size(), target_emb.size(), "consistency loss");
  const int n = static_cast<int>(gen_emb.size());
  Tensor acc;
  for (int i = 0; i < n; ++i) {
    Tensor cos = CosineVec(gen_emb[i], Detach(target_emb[i]));
    acc = acc.defined() ? Add(acc, cos) : cos;
  }
  return ScaleByScalar(acc, -alpha / static_cast<double>(n));
}

Tensor EmotionConsistencyLoss(const EmotionEncoder& encoder,
                              const StftBasis& basis,
                              const std::vector<Tensor>& generated,
                              const std::vector<Mat>& ground_truth,
                              double alpha_e) {
  CheckPairCount(generated.size(), ground_truth.size(), "emotion consistency");
  std::vector<Tensor> gen_emb;
  std::vector<Tensor> gt_emb;
  gen_emb.reserve(generated.size());
  gt_emb.reserve(ground_truth.size());
  for (std::size_t i = 0; i < generated.size(); ++i) {
    gen_emb.push_back(
        encoder.EmbedMel(LogMelFromWave(generated[i], basis), nullptr));
    Tensor gt_wave = Tensor::Constant(ground_truth[i]);
    gt_emb.push_back(
        encoder.EmbedMel(LogMelFromWave(gt_wave, basis), nullptr));
  }
  return CosineConsistencyLoss(gen_emb, gt_emb, alpha_e);
}

Tensor SpeakerConsistencyLoss(const SpeakerEncoder& encoder,
                              const StftBasis& basis,
                              const std::vector<Tensor>& generated,
                              const std::vector<Mat>& ground_truth,
                              double alpha_s) {
  CheckPairCount(generated.size(), ground_truth.size(), "speaker consistency");
  std::vector<Tensor> gen_emb;
  std::vector<Tensor> gt_emb;
  gen_emb.reserve(generated.size());
  gt_emb.reserve(ground_truth.size());
  for (std::size_t i = 0; i < generated.size(); ++i) {
    gen_emb.push_back(encoder.EmbedMel(LogMelFromWave(generated[i], basis)));
    Tensor gt_wave = Tensor::Constant(ground_truth[i]);
    gt_emb.push_back(encoder.EmbedMel(LogMelFromWave(gt_wave, basis)));
  }
  return CosineConsistencyLoss(gen_emb, gt_emb, alpha_s);
}

Tensor ContentFrameLoss(const Tensor& gen_seq, const Tensor& target_seq,
                        double weight) {
  if (gen_seq.rows() != target_seq.rows()) {
    throw Error(ErrorCode::kShapeMismatch,
                "content embedding dimensions differ: " +
                    std::to_string(gen_seq.rows()) + " vs " +
                    std::to_string(target_seq.rows()));
  }
  Eigen::Index t = std::min(gen_seq.cols(), target_seq.cols());
  if (t <= 0) {
    throw Error(ErrorCode::kShapeMismatch, "empty content sequence");
  }
  Tensor a = gen_seq.cols() == t ? gen_seq
                                 : SliceCols(gen_seq, 0, static_cast<int>(t));
  Tensor b = target_seq.cols() == t
                 ? target_seq
                 : SliceCols(target_seq, 0, static_cast<int>(t));
  return ScaleByScalar(MeanAll(Square(Sub(a, Detach(b)))), weight);
}

Tensor ContentLoss(const ContentEncoder& encoder,
                   const std::vector<Tensor>& generated,
                   const std::vector<Mat>& ground_truth, double weight) {
  CheckPairCount(generated.size(), ground_truth.size(), "content loss");
  const int n = static_cast<int>(generated.size());
  Tensor acc;
  for (int i = 0; i < n; ++i) {
    Tensor gen_seq = encoder.Forward(generated[i]);
    Tensor gt_seq = encoder.Forward(Tensor::Constant(ground_truth[i]));
    Tensor term = ContentFrameLoss(gen_seq, gt_seq, weight);
    acc = acc.defined() ? Add(acc, term) : term;
  }
  return ScaleByScalar(acc, 1.0 / static_cast<double>(n));
}

Tensor GaussianLogDensity(const Tensor& x, const Tensor& mu,
                          const Tensor& logs) {
  Tensor centered = Sub(x, mu);
  Tensor inv_var = Exp(ScaleByScalar(logs, -2.0));
  Tensor quad = Mul(Square(centered), inv_var);
  Tensor half = ScaleByScalar(Add(AddScalar(quad, kLogTwoPi),
                                  ScaleByScalar(logs, 2.0)),
                              -0.5);
  return half;
}

Tensor KlLoss(const Tensor& z, const Tensor& mu_q, const Tensor& logs_q,
              const Tensor& z_flowed, const Tensor& mu_p,
              const Tensor& logs_p, const Tensor& log_det, double weight) {
  const Eigen::Index d = z.rows();
  const Eigen::Index t = z.cols();
  auto same = [&](const Tensor& m) { return m.rows() == d && m.cols() == t; };
  if (d <= 0 || t <= 0 || !same(mu_q) || !same(logs_q) || !same(z_flowed) ||
      !same(mu_p) || !same(logs_p)) {
    throw Error(ErrorCode::kShapeMismatch,
                "KL inputs must all be [d x T] with matching shapes");
  }
  if (log_det.rows() != 1 || log_det.cols() != 1) {
    throw Error(ErrorCode::kShapeMismatch,
                "flow log-determinant must be a scalar tensor");
  }
  Tensor log_q = GaussianLogDensity(z, mu_q, logs_q);
  Tensor log_p = GaussianLogDensity(z_flowed, mu_p, logs_p);
  Tensor total = Sub(SumAll(Sub(log_q, log_p)), log_det);
  return ScaleByScalar(total, weight / static_cast<double>(d * t));
}

Tensor MelReconstructionLoss(const StftBasis& basis, const Tensor& generated,
                             const Mat& ground_truth, double weight) {
  if (generated.rows() != 1 || ground_truth.rows() != 1) {
    throw Error(ErrorCode::kShapeMismatch,
                "waveform segments must be [1 x N]");
  }
  if (generated.cols() != ground_truth.cols()) {
    throw Error(ErrorCode::kLengthMismatch,
                "mel reconstruction needs equal-length segments: " +
                    std::to_string(generated.cols()) + " vs " +
                    std::to_string(ground_truth.cols()));
  }
  Tensor gen_mel = LogMelFromWave(generated, basis);
  Tensor gt_mel = LogMelFromWave(Tensor::Constant(ground_truth), basis);
  return ScaleByScalar(MeanAll(Square(Sub(gen_mel, Detach(gt_mel)))), weight);
}

Tensor MelReconstructionLossBatch(const StftBasis& basis,
                                  const std::vector<Tensor>& generated,
                                  const std::vector<Mat>& ground_truth,
                                  double weight) {
  CheckPairCount(generated.size(), ground_truth.size(), "mel reconstruction");
  const int n = static_cast<int>(generated.size());
  Tensor acc;
  for (int i = 0; i < n; ++i) {
    Tensor term = MelReconstructionLoss(basis, generated[i], ground_truth[i],
                                        weight);
    acc = acc.defined() ? Add(acc, term) : term;
  }
  return ScaleByScalar(acc, 1.0 / static_cast<double>(n));
}

FinalLossResult FinalLoss(const Tensor& l_ecl, const Tensor& l_scl,
                          const Tensor& l_content, const Tensor& l_mse,
                          const Tensor& l_kl, int n) {
  FinalLossResult out;
  out.breakdown.l_ecl = l_ecl.item();
  out.breakdown.l_scl = l_scl.item();
  out.breakdown.l_content = l_content.item();
  out.breakdown.l_mse = l_mse.item();
  out.breakdown.l_kl = l_kl.item();
  out.breakdown.n = n;
  CheckFinite(out.breakdown.l_ecl, "l_ecl");
  CheckFinite(out.breakdown.l_scl, "l_scl");
  CheckFinite(out.breakdown.l_content, "l_content");
  CheckFinite(out.breakdown.l_mse, "l_mse");
  CheckFinite(out.breakdown.l_kl, "l_kl");
  // Left-to-right over scalars, so the logged parts re-add bit-for-bit.
  out.total = Add(Add(Add(Add(l_ecl, l_scl), l_content), l_mse), l_kl);
  out.breakdown.l_final = out.total.item();
  CheckFinite(out.breakdown.l_final, "l_final");
  return out;
}

Tensor DiscriminatorLoss(const DiscOutput& real, const DiscOutput& fake) {
  if (real.logits.size() != fake.logits.size() || real.logits.empty()) {
    throw Error(ErrorCode::kShapeMismatch,
                "real/fake critic inventories differ");
  }
  Tensor acc;
  for (std::size_t c = 0; c < real.logits.size(); ++c) {
    Tensor real_term = MeanAll(Square(AddScalar(real.logits[c], -1.0)));
    Tensor fake_term = MeanAll(Square(fake.logits[c]));
    Tensor term = Add(real_term, fake_term);
    acc = acc.defined() ? Add(acc, term) : term;
  }
  return acc;
}

Tensor GeneratorAdversarialLoss(const DiscOutput& fake) {
  if (fake.logits.empty()) {
    throw Error(ErrorCode::kShapeMismatch, "no critic logits supplied");
  }
  Tensor acc;
  for (const Tensor& logit : fake.logits) {
    Tensor term = MeanAll(Square(AddScalar(logit, -1.0)));
    acc = acc.defined() ? Add(acc, term) : term;
  }
  return acc;
}

Tensor FeatureMatchingLoss(const DiscOutput& real, const DiscOutput& fake,
                           double weight) {
  if (real.features.size() != fake.features.size() || real.features.empty()) {
    throw Error(ErrorCode::kShapeMismatch,
                "real/fake critic inventories differ");
  }
  Tensor acc;
  for (std::size_t c = 0; c < real.features.size(); ++c) {
    if (real.features[c].size() != fake.features[c].size()) {
      throw Error(ErrorCode::kShapeMismatch,
                  "critic feature depths differ");
    }
    for (std::size_t l = 0; l < real.features[c].size(); ++l) {
      Tensor term =
          MeanAll(Abs(Sub(fake.features[c][l], Detach(real.features[c][l]))));
      acc = acc.defined() ? Add(acc, term) : term;
    }
  }
  return ScaleByScalar(acc, weight);
}

}  // namespace xltts
