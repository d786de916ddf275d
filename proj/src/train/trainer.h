// Copyright (c) 2026 The xltts Authors
// SPDX-License-Identifier: Apache-2.0
//
// End-to-end training step for the synthesis stack: posterior/flow/alignment
// losses, stochastic duration NLL, vocoder adversarial training, and
// decoupled-Adam updates with resumable state.

#ifndef XLTTS_TRAIN_TRAINER_H_
#define XLTTS_TRAIN_TRAINER_H_

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "model/synthesizer.h"
#include "train/dataset.h"
#include "train/losses.h"
#include "train/optimizer.h"
#include "train/train_config.h"

namespace xltts {

// Scalar record of one completed optimization step.
struct StepRecord {
  int64_t step = 0;  // 1-based index of the completed step
  int64_t epoch = 0;
  double lr = 0.0;
  LossBreakdown losses;
  double l_dur = 0.0;
  double vocoder_adv = 0.0;
  double vocoder_fm = 0.0;
  double disc_loss = 0.0;
  double grad_norm_g = 0.0;
  double grad_norm_d = 0.0;

  std::string ToJsonLine() const;
};

// Counts trainable parameters of the synthesis backbone plus the waveform
// critics (style encoders excluded, matching what the optimizer updates).
int64_t CountTrainableParameters(const ModelConfig& mcfg, const Vocab& vocab,
                                 const SpeakerEncoderConfig& spk_cfg,
                                 const EmotionEncoderConfig& emo_cfg,
                                 const ContentEncoderConfig& content_cfg);

class Trainer {
 public:
  // `out_dir` may be empty to disable the JSONL step log.  The dataset must
  // outlive the trainer.
  Trainer(const TrainConfig& cfg, const ModelConfig& mcfg, const Vocab& vocab,
          const SpeakerEncoderConfig& spk_cfg,
          const EmotionEncoderConfig& emo_cfg,
          const ContentEncoderConfig& content_cfg, const TrainDataset* data,
          const std::string& out_dir);

  // Runs one optimization step (critic and generator groups).  On any
  // non-finite loss component the step is rejected: model, optimizer, data
  // cursor, and RNG state are all left exactly as before the call, an
  // incident line is logged, and kNonFiniteLoss is thrown.
  StepRecord Step();

  int64_t step() const { return step_; }
  int64_t epoch() const { return batcher_.epoch(); }
  double CurrentLr() const { return cfg_.LearningRate(batcher_.epoch()); }
  const TrainConfig& config() const { return cfg_; }

  Synthesizer& synthesizer() { return synth_; }
  const Synthesizer& synthesizer() const { return synth_; }
  ParamRegistry* disc_registry() { return disc_reg_.get(); }

  // TTS backbone + critics; the frozen style encoders are excluded.
  int64_t CountParameters() const;

  // Full training state: model, critics, both optimizers, data cursor, and
  // RNG streams.  Save -> Load -> Save is byte-identical.
  void Save(const std::string& path) const;
  void Load(const std::string& path);

 private:
  StepRecord StepImpl();
  void AppendLog(const std::string& line) const;
  void CacheReferenceEmbeddings();

  TrainConfig cfg_;
  const TrainDataset* data_;
  std::string out_dir_;
  Synthesizer synth_;
  std::unique_ptr<ParamRegistry> disc_reg_;
  DiscriminatorSet disc_;
  AdamW opt_g_;
  AdamW opt_d_;
  Batcher batcher_;
  Rng noise_rng_;
  Rng dropout_rng_;
  Rng segment_rng_;
  int64_t step_ = 0;
  std::vector<Mat> ref_spk_;  // per-item frozen reference embeddings
  std::vector<Mat> ref_emo_;
};

}  // namespace xltts

#endif  // XLTTS_TRAIN_TRAINER_H_
