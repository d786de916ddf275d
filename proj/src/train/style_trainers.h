// Copyright (c) 2026 The xltts Authors
// SPDX-License-Identifier: Apache-2.0
//
// Supervised training for the two style encoders: a six-way emotion
// classifier (embeddings are its penultimate layer) and an additive-margin
// speaker classifier (embeddings are its pooled trunk output).

#ifndef XLTTS_TRAIN_STYLE_TRAINERS_H_
#define XLTTS_TRAIN_STYLE_TRAINERS_H_

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "core/tensor.h"
#include "model/emotion_encoder.h"
#include "model/speaker_encoder.h"
#include "nn/registry.h"

namespace xltts {

struct StyleTrainOptions {
  int steps = 200;
  int batch_size = 8;
  double lr = 0.001;
  uint64_t seed = 0;
  int eval_every = 20;  // validation cadence for best-checkpoint tracking
};

struct LabeledMel {
  Mat logmel;  // [mel_bands x T]
  int label = 0;
};

struct EmotionClassifierMetrics {
  double macro_f1 = 0.0;
  std::map<std::string, double> per_class_f1;
  std::array<std::array<int64_t, kNumEmotions>, kNumEmotions> confusion{};
  // confusion[true][pred]; row sums equal per-class validation support.
};

struct SpeakerTrainMetrics {
  double val_accuracy = 0.0;
  double mean_within_cosine = 0.0;
  double mean_cross_cosine = 0.0;
};

// Loads (log-mel, emotion-id) pairs for the given manifest rows (all rows
// when empty).  Throws kMissingLabels when any selected utterance lacks an
// emotion label.
std::vector<LabeledMel> EmotionTrainingSet(const std::string& manifest_path,
                                           const std::vector<int>& rows);

// Loads (log-mel, speaker-id) pairs; `speakers` receives the sorted distinct
// speaker names defining the id space.
std::vector<LabeledMel> SpeakerTrainingSet(const std::string& manifest_path,
                                           const std::vector<int>& rows,
                                           std::vector<std::string>* speakers);

// Cross-entropy training of the emotion classifier.  `classes` lists the
// label ids the task covers (default: all six).  Every class in `classes`
// must appear in `train`, otherwise kClassAbsentFromTrain.  The encoder is
// left at its best-validation-macro-F1 state and the returned metrics are
// computed on `val` at that state.
EmotionClassifierMetrics TrainEmotionClassifier(
    EmotionEncoder* encoder, ParamRegistry* reg,
    const std::vector<LabeledMel>& train, const std::vector<LabeledMel>& val,
    const StyleTrainOptions& opts, std::vector<int> classes = {});

// Additive-margin softmax training of the speaker classifier over
// `num_speakers` identities.  The encoder is left at its
// best-validation-accuracy state.
SpeakerTrainMetrics TrainSpeakerClassifier(SpeakerEncoder* encoder,
                                           ParamRegistry* reg,
                                           const std::vector<LabeledMel>& train,
                                           const std::vector<LabeledMel>& val,
                                           const StyleTrainOptions& opts);

// Standalone encoder checkpoints.  The metadata block records an
// architecture tag, the embedding dimension, and the unit-norm flag, and is
// validated on load.
void SaveEmotionEncoderCheckpoint(const std::string& path,
                                  const EmotionEncoderConfig& cfg,
                                  const ParamRegistry& reg);
void SaveSpeakerEncoderCheckpoint(const std::string& path,
                                  const SpeakerEncoderConfig& cfg,
                                  const ParamRegistry& reg);
// Loads into an existing registry whose shapes must match
// (kCorruptCheckpoint / kIncompatibleDimensions per the registry contract);
// returns the stored config.
EmotionEncoderConfig LoadEmotionEncoderCheckpoint(const std::string& path,
                                                  ParamRegistry* reg);
SpeakerEncoderConfig LoadSpeakerEncoderCheckpoint(const std::string& path,
                                                  ParamRegistry* reg);

}  // namespace xltts

#endif  // XLTTS_TRAIN_STYLE_TRAINERS_H_
