// Copyright (c) 2026 The xltts Authors
// SPDX-License-Identifier: Apache-2.0

#include "train/style_trainers.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "audio/stft.h"
#include "audio/wav.h"
#include "core/checkpoint.h"
#include "core/rng.h"
#include "data/manifest.h"
#include "train/optimizer.h"
#include "util/error.h"

namespace xltts {
namespace {

Mat LogMelOfFile(const std::string& path) {
  Waveform w = ReadWavCanonical(path);
  Spectrogram mel = MelSpectrogram(w);
  return mel.magnitudes.array().max(1e-5).log().matrix();
}

std::vector<int> SelectRows(std::size_t total, const std::vector<int>& rows) {
  std::vector<int> wanted = rows;
  if (wanted.empty()) {
    wanted.resize(total);
    std::iota(wanted.begin(), wanted.end(), 0);
  }
  for (int r : wanted) {
    if (r < 0 || r >= static_cast<int>(total)) {
      throw Error(ErrorCode::kInvalidArgument,
                  "row " + std::to_string(r) + " outside the manifest");
    }
  }
  return wanted;
}

// Numerically safe cross-entropy of a [C x 1] logit column against `label`.
Tensor CrossEntropy(const Tensor& logits, int label) {
  const double max_logit = logits.value().maxCoeff();
  Tensor lse = AddScalar(
      Log(SumAll(Exp(AddScalar(logits, -max_logit)))), max_logit);
  Mat onehot = Mat::Zero(logits.rows(), 1);
  onehot(label, 0) = 1.0;
  Tensor picked = SumAll(Mul(logits, Tensor::Constant(onehot)));
  return Sub(lse, picked);
}

std::map<std::string, Mat> SnapshotParams(const ParamRegistry& reg) {
  std::map<std::string, Mat> out;
  for (const auto& [name, tensor] : reg.params()) {
    out[name] = tensor.value();
  }
  return out;
}

void RestoreParams(ParamRegistry* reg, const std::map<std::string, Mat>& snap) {
  for (const auto& [name, tensor] : reg->params()) {
    Tensor handle = tensor;
    handle.mutable_value() = snap.at(name);
  }
}

}  // namespace

std::vector<LabeledMel> EmotionTrainingSet(const std::string& manifest_path,
                                           const std::vector<int>& rows) {
  std::vector<Utterance> utts = LoadManifest(manifest_path);
  std::vector<LabeledMel> out;
  for (int r : SelectRows(utts.size(), rows)) {
    const Utterance& u = utts[r];
    if (!u.emotion) {
      throw Error(ErrorCode::kMissingLabels,
                  "utterance without emotion label: " + u.audio);
    }
    LabeledMel item;
    item.logmel = LogMelOfFile(ResolveAudioPath(manifest_path, u.audio));
    item.label = EmotionId(*u.emotion);
    out.push_back(std::move(item));
  }
  return out;
}

std::vector<LabeledMel> SpeakerTrainingSet(const std::string& manifest_path,
                                           const std::vector<int>& rows,
                                           std::vector<std::string>* speakers) {
  std::vector<Utterance> utts = LoadManifest(manifest_path);
  std::vector<int> wanted = SelectRows(utts.size(), rows);
  std::set<std::string> names;
  for (int r : wanted) names.insert(utts[r].speaker);
  speakers->assign(names.begin(), names.end());
  std::vector<LabeledMel> out;
  for (int r : wanted) {
    const Utterance& u = utts[r];
    LabeledMel item;
    item.logmel = LogMelOfFile(ResolveAudioPath(manifest_path, u.audio));
    item.label = static_cast<int>(
        std::lower_bound(speakers->begin(), speakers->end(), u.speaker) -
        speakers->begin());
    out.push_back(std::move(item));
  }
  return out;
}

EmotionClassifierMetrics TrainEmotionClassifier(
    EmotionEncoder* encoder, ParamRegistry* reg,
    const std::vector<LabeledMel>& train, const std::vector<LabeledMel>& val,
    const StyleTrainOptions& opts, std::vector<int> classes) {
  if (train.empty() || val.empty()) {
    throw Error(ErrorCode::kEmptyCorpus, "empty classifier train/val set");
  }
  if (classes.empty()) {
    classes.resize(kNumEmotions);
    std::iota(classes.begin(), classes.end(), 0);
  }
  std::set<int> seen;
  for (const LabeledMel& it : train) seen.insert(it.label);
  for (int c : classes) {
    if (!seen.count(c)) {
      throw Error(ErrorCode::kClassAbsentFromTrain,
                  std::string("no training examples for emotion: ") +
                      kEmotionLabels[c]);
    }
  }

  auto evaluate = [&](EmotionClassifierMetrics* metrics) {
    for (auto& row : metrics->confusion) row.fill(0);
    for (const LabeledMel& it : val) {
      Tensor pen = encoder->PenultimateMel(Tensor::Constant(it.logmel),
                                           nullptr);
      Mat logits = encoder->ClassLogits(pen).value();
      int pred = 0;
      logits.col(0).maxCoeff(&pred);
      metrics->confusion[it.label][static_cast<std::size_t>(pred)]++;
    }
    metrics->per_class_f1.clear();
    double f1_sum = 0.0;
    for (int c : classes) {
      int64_t row_sum = 0;
      int64_t col_sum = 0;
      for (int k = 0; k < kNumEmotions; ++k) {
        row_sum += metrics->confusion[c][k];
        col_sum += metrics->confusion[k][c];
      }
      const double tp = static_cast<double>(metrics->confusion[c][c]);
      const double precision = col_sum > 0 ? tp / col_sum : 0.0;
      const double recall = row_sum > 0 ? tp / row_sum : 0.0;
      const double f1 = (precision + recall) > 0.0
                            ? 2.0 * precision * recall / (precision + recall)
                            : 0.0;
      metrics->per_class_f1[kEmotionLabels[c]] = f1;
      f1_sum += f1;
    }
    metrics->macro_f1 = f1_sum / static_cast<double>(classes.size());
  };

  AdamWConfig adam;
  AdamW opt(reg, adam);
  Rng batch_rng(opts.seed);
  Rng dropout_rng(opts.seed ^ 0xd20b0a57ULL);

  EmotionClassifierMetrics best_metrics;
  evaluate(&best_metrics);
  std::map<std::string, Mat> best_params = SnapshotParams(*reg);

  const int n = static_cast<int>(train.size());
  for (int step = 1; step <= opts.steps; ++step) {
    Tensor acc;
    const int b = std::min(opts.batch_size, n);
    for (int i = 0; i < b; ++i) {
      const LabeledMel& it = train[batch_rng.UniformInt(n)];
      Tensor pen = encoder->PenultimateMel(Tensor::Constant(it.logmel),
                                           &dropout_rng);
      Tensor ce = CrossEntropy(encoder->ClassLogits(pen), it.label);
      acc = acc.defined() ? Add(acc, ce) : ce;
    }
    Tensor loss = ScaleByScalar(acc, 1.0 / b);
    if (!std::isfinite(loss.item())) {
      throw Error(ErrorCode::kNonFiniteLoss, "emotion classifier loss");
    }
    reg->ZeroGrads();
    loss.Backward();
    opt.Step(opts.lr);
    if (step % opts.eval_every == 0 || step == opts.steps) {
      EmotionClassifierMetrics m;
      evaluate(&m);
      if (m.macro_f1 > best_metrics.macro_f1) {
        best_metrics = m;
        best_params = SnapshotParams(*reg);
      }
    }
  }
  RestoreParams(reg, best_params);
  return best_metrics;
}

SpeakerTrainMetrics TrainSpeakerClassifier(SpeakerEncoder* encoder,
                                           ParamRegistry* reg,
                                           const std::vector<LabeledMel>& train,
                                           const std::vector<LabeledMel>& val,
                                           const StyleTrainOptions& opts) {
  if (train.empty() || val.empty()) {
    throw Error(ErrorCode::kEmptyCorpus, "empty classifier train/val set");
  }
  const SpeakerEncoderConfig& cfg = encoder->config();
  for (const LabeledMel& it : train) {
    if (it.label < 0 || it.label >= cfg.num_speakers) {
      throw Error(ErrorCode::kInvalidArgument,
                  "speaker label outside the configured identity count");
    }
  }

  auto val_stats = [&](SpeakerTrainMetrics* m) {
    int correct = 0;
    std::vector<Mat> embs;
    embs.reserve(val.size());
    for (const LabeledMel& it : val) {
      Tensor emb = encoder->EmbedMel(Tensor::Constant(it.logmel));
      Mat logits = encoder->CosineLogits(emb).value();
      int pred = 0;
      logits.col(0).maxCoeff(&pred);
      if (pred == it.label) ++correct;
      embs.push_back(emb.value());
    }
    m->val_accuracy = static_cast<double>(correct) / val.size();
    double within = 0.0, cross = 0.0;
    int n_within = 0, n_cross = 0;
    for (std::size_t i = 0; i < val.size(); ++i) {
      for (std::size_t j = i + 1; j < val.size(); ++j) {
        const double cos = (embs[i].transpose() * embs[j])(0, 0);
        if (val[i].label == val[j].label) {
          within += cos;
          ++n_within;
        } else {
          cross += cos;
          ++n_cross;
        }
      }
    }
    m->mean_within_cosine = n_within > 0 ? within / n_within : 0.0;
    m->mean_cross_cosine = n_cross > 0 ? cross / n_cross : 0.0;
  };

  AdamWConfig adam;
  AdamW opt(reg, adam);
  Rng batch_rng(opts.seed);

  SpeakerTrainMetrics best;
  val_stats(&best);
  std::map<std::string, Mat> best_params = SnapshotParams(*reg);

  const int n = static_cast<int>(train.size());
  const double ms = cfg.margin * cfg.scale;
  for (int step = 1; step <= opts.steps; ++step) {
    Tensor acc;
    const int b = std::min(opts.batch_size, n);
    for (int i = 0; i < b; ++i) {
      const LabeledMel& it = train[batch_rng.UniformInt(n)];
      Tensor emb = encoder->EmbedMel(Tensor::Constant(it.logmel));
      Tensor cosines = encoder->CosineLogits(emb);
      Mat margin_shift = Mat::Zero(cfg.num_speakers, 1);
      margin_shift(it.label, 0) = ms;
      Tensor adjusted = Sub(ScaleByScalar(cosines, cfg.scale),
                            Tensor::Constant(margin_shift));
      Tensor ce = CrossEntropy(adjusted, it.label);
      acc = acc.defined() ? Add(acc, ce) : ce;
    }
    Tensor loss = ScaleByScalar(acc, 1.0 / b);
    if (!std::isfinite(loss.item())) {
      throw Error(ErrorCode::kNonFiniteLoss, "speaker classifier loss");
    }
    reg->ZeroGrads();
    loss.Backward();
    opt.Step(opts.lr);
    if (step % opts.eval_every == 0 || step == opts.steps) {
      SpeakerTrainMetrics m;
      val_stats(&m);
      if (m.val_accuracy > best.val_accuracy) {
        best = m;
        best_params = SnapshotParams(*reg);
      }
    }
  }
  RestoreParams(reg, best_params);
  return best;
}

namespace {

void SaveEncoderCheckpoint(const std::string& path, const std::string& tag,
                           int dimension, const std::string& config_json,
                           const ParamRegistry& reg) {
  Checkpoint ck;
  ck.meta["architecture"] = tag;
  ck.meta["dimension"] = dimension;
  ck.meta["unit_norm"] = true;
  ck.meta["config"] = nlohmann::json::parse(config_json);
  reg.SaveTensors(&ck.tensors, "enc.");
  ck.Save(path);
}

Checkpoint LoadEncoderCheckpoint(const std::string& path,
                                 const std::string& expected_tag) {
  Checkpoint ck = Checkpoint::Load(path);
  if (!ck.meta.contains("architecture") || !ck.meta.contains("config") ||
      ck.meta["architecture"].get<std::string>() != expected_tag) {
    throw Error(ErrorCode::kCorruptCheckpoint,
                "not a " + expected_tag + " checkpoint: " + path);
  }
  return ck;
}

}  // namespace

void SaveEmotionEncoderCheckpoint(const std::string& path,
                                  const EmotionEncoderConfig& cfg,
                                  const ParamRegistry& reg) {
  SaveEncoderCheckpoint(path, "emotion-cnn-transformer", cfg.d_emo,
                        cfg.ToJson(), reg);
}

void SaveSpeakerEncoderCheckpoint(const std::string& path,
                                  const SpeakerEncoderConfig& cfg,
                                  const ParamRegistry& reg) {
  SaveEncoderCheckpoint(path, "speaker-residual-cnn", cfg.d_spk, cfg.ToJson(),
                        reg);
}

EmotionEncoderConfig LoadEmotionEncoderCheckpoint(const std::string& path,
                                                  ParamRegistry* reg) {
  Checkpoint ck = LoadEncoderCheckpoint(path, "emotion-cnn-transformer");
  EmotionEncoderConfig cfg = EmotionEncoderConfig::FromJson(
      ck.meta["config"].dump());
  reg->LoadTensors(ck.tensors, "enc.");
  return cfg;
}

SpeakerEncoderConfig LoadSpeakerEncoderCheckpoint(const std::string& path,
                                                  ParamRegistry* reg) {
  Checkpoint ck = LoadEncoderCheckpoint(path, "speaker-residual-cnn");
  SpeakerEncoderConfig cfg = SpeakerEncoderConfig::FromJson(
      ck.meta["config"].dump());
  reg->LoadTensors(ck.tensors, "enc.");
  return cfg;
}

}  // namespace xltts
