// Copyright (c) 2026 The xltts Authors
// SPDX-License-Identifier: Apache-2.0
//
// Training hyperparameters and the flat `key = value` config-file format
// used by the command-line trainer.

#ifndef XLTTS_TRAIN_TRAIN_CONFIG_H_
#define XLTTS_TRAIN_TRAIN_CONFIG_H_

#include <cstdint>
#include <string>

#include "train/losses.h"

namespace xltts {

struct TrainConfig {
  std::string scale = "desk";  // model preset: "desk" or "paper"
  int batch_size = 8;
  double beta1 = 0.8;
  double beta2 = 0.99;
  double weight_decay = 0.01;
  double initial_lr = 0.0002;
  double lr_decay = 0.999875;  // multiplicative, applied per epoch
  int64_t max_steps = 50000;
  uint64_t seed = 0;
  int segment_frames = 32;  // latent frames per vocoder training segment
  double grad_clip_norm = 1000.0;
  LossConfig loss;

  // Reference presets.  Desk trains a small model on one workstation;
  // paper matches the full-scale recipe.
  static TrainConfig Desk();
  static TrainConfig Paper();

  // Parses the flat text format: one `key = value` per line, `#` comments
  // and blank lines ignored.  Unknown keys or unparsable values throw
  // kMalformedLine with the line number.
  static TrainConfig Parse(const std::string& text);
  static TrainConfig LoadFile(const std::string& path);  // kMissingFile

  // Serializes every field in the same flat format.
  std::string ToText() const;

  // Learning rate after `epoch` completed epochs: initial_lr * lr_decay^epoch.
  double LearningRate(int64_t epoch) const;

  // Throws kInvalidArgument on out-of-range fields.
  void Validate() const;
};

}  // namespace xltts

#endif  // XLTTS_TRAIN_TRAIN_CONFIG_H_
