// Copyright (c) 2026 The xltts Authors
// SPDX-License-Identifier: Apache-2.0
//
// Training objectives: emotion/speaker consistency, content preservation,
// KL divergence between posterior and flow-mapped prior, mel reconstruction,
// and the adversarial losses for the waveform critics.

#ifndef XLTTS_TRAIN_LOSSES_H_
#define XLTTS_TRAIN_LOSSES_H_

#include <string>
#include <vector>

#include "audio/stft.h"
#include "core/tensor.h"
#include "model/content_encoder.h"
#include "model/discriminator.h"
#include "model/emotion_encoder.h"
#include "model/speaker_encoder.h"
#include "util/error.h"

namespace xltts {

// Weights for the composite generator objective.  Each weight is applied
// inside its component before aggregation, so the final loss is a plain
// unweighted sum of the five component values.
struct LossConfig {
  double alpha_e = 9.0;         // emotion-consistency magnitude
  double alpha_s = 9.0;         // speaker-consistency magnitude
  double content_weight = 1.0;  // content-preservation MSE weight
  double mel_weight = 45.0;     // mel-reconstruction MSE weight
  double kl_weight = 1.0;       // KL term weight
  double fm_weight = 2.0;       // critic feature-matching weight (vocoder side)

  // Throws kInvalidArgument when a weight is negative or non-finite.
  void Validate() const;
};

// Per-step scalar record of the composite objective.  `l_final` is the exact
// left-to-right sum (((l_ecl + l_scl) + l_content) + l_mse) + l_kl, computed
// in that order so logged components re-add bit-for-bit.
struct LossBreakdown {
  double l_ecl = 0.0;
  double l_scl = 0.0;
  double l_content = 0.0;
  double l_mse = 0.0;
  double l_kl = 0.0;
  double l_final = 0.0;
  int n = 0;  // batch size the means were taken over
};

// Cosine similarity between two column vectors, guarded against zero norms.
Tensor CosineVec(const Tensor& a, const Tensor& b);

// -(alpha / n) * sum_i cos(gen[i], target[i]).  The target side is detached,
// so gradients only reach the generated embeddings.  Bounded in
// [-alpha, +alpha].  Throws kBatchSizeMismatch when the lists disagree or are
// empty.
Tensor CosineConsistencyLoss(const std::vector<Tensor>& gen_emb,
                             const std::vector<Tensor>& target_emb,
                             double alpha);

// Emotion-consistency loss over paired waveform segments [1 x N]: embeds both
// sides with the emotion encoder on log-mels and applies
// CosineConsistencyLoss.  Ground-truth segments enter as plain matrices so
// their path carries no gradient.
Tensor EmotionConsistencyLoss(const EmotionEncoder& encoder,
                              const StftBasis& basis,
                              const std::vector<Tensor>& generated,
                              const std::vector<Mat>& ground_truth,
                              double alpha_e);

// Speaker-consistency analogue using the speaker encoder.
Tensor SpeakerConsistencyLoss(const SpeakerEncoder& encoder,
                              const StftBasis& basis,
                              const std::vector<Tensor>& generated,
                              const std::vector<Mat>& ground_truth,
                              double alpha_s);

// Mean squared error between time-aligned content embedding sequences
// [d x Ta] vs [d x Tb]; both are truncated to the shorter length.  The
// target sequence is detached.  Symmetric in value.
Tensor ContentFrameLoss(const Tensor& gen_seq, const Tensor& target_seq,
                        double weight);

// Batch version over waveform segments: runs the content encoder on each
// pair and averages ContentFrameLoss.  Throws kBatchSizeMismatch.
Tensor ContentLoss(const ContentEncoder& encoder,
                   const std::vector<Tensor>& generated,
                   const std::vector<Mat>& ground_truth, double weight);

// Elementwise diagonal-Gaussian log density log N(x; mu, exp(logs)^2).
Tensor GaussianLogDensity(const Tensor& x, const Tensor& mu,
                          const Tensor& logs);

// KL term between the posterior q(z|x) and the flow-mapped prior:
//   ( sum_elements[ log q(z) - log p(f(z)) ] - log_det ) / (T * d)
// where z ~ q are posterior samples [d x T], z_flowed = f(z) are the same
// samples pushed through the flow, and log_det is the summed Jacobian
// log-determinant of f over the sequence (a scalar tensor).  With an
// identity flow and z = mu_q this reduces to the closed-form Gaussian KL.
// Throws kShapeMismatch when the six matrices disagree in shape.
Tensor KlLoss(const Tensor& z, const Tensor& mu_q, const Tensor& logs_q,
              const Tensor& z_flowed, const Tensor& mu_p,
              const Tensor& logs_p, const Tensor& log_det, double weight);

// weight * MSE between 80-band log-mel spectrograms of two equal-length
// waveform segments.  The ground-truth side is detached.  Throws
// kLengthMismatch when segment lengths differ.
Tensor MelReconstructionLoss(const StftBasis& basis, const Tensor& generated,
                             const Mat& ground_truth, double weight);

// Batch mean of MelReconstructionLoss.  Throws kBatchSizeMismatch.
Tensor MelReconstructionLossBatch(const StftBasis& basis,
                                  const std::vector<Tensor>& generated,
                                  const std::vector<Mat>& ground_truth,
                                  double weight);

// Aggregates the five weighted components into the final training loss.
// The sum is formed strictly left to right over the scalar tensors, so the
// recorded l_final equals the same-order double sum of the recorded parts.
// Throws kNonFiniteComponent naming the first non-finite component.
struct FinalLossResult {
  Tensor total;             // differentiable scalar
  LossBreakdown breakdown;  // logged values
};
FinalLossResult FinalLoss(const Tensor& l_ecl, const Tensor& l_scl,
                          const Tensor& l_content, const Tensor& l_mse,
                          const Tensor& l_kl, int n);

// Least-squares GAN objective for the critic set: for each critic,
// mean((real_logit - 1)^2) + mean(fake_logit^2), summed over critics.
// Callers pass critic outputs computed on a detached fake waveform.
Tensor DiscriminatorLoss(const DiscOutput& real, const DiscOutput& fake);

// Least-squares generator adversarial term: sum_c mean((fake_logit - 1)^2).
Tensor GeneratorAdversarialLoss(const DiscOutput& fake);

// weight * sum over critics and layers of mean |real_feat - fake_feat|.
// Real features are detached inside.
Tensor FeatureMatchingLoss(const DiscOutput& real, const DiscOutput& fake,
                           double weight);

}  // namespace xltts

#endif  // XLTTS_TRAIN_LOSSES_H_
