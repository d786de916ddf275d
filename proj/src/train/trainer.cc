// Copyright (c) 2026 The xltts Authors
// SPDX-License-Identifier: Apache-2.0

#include "train/trainer.h"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>

#include "core/checkpoint.h"
#include "model/mas.h"
#include "util/error.h"
#include "vendor/json.hpp"

namespace xltts {
namespace {

AdamWConfig MakeAdamConfig(const TrainConfig& cfg) {
  AdamWConfig a;
  a.beta1 = cfg.beta1;
  a.beta2 = cfg.beta2;
  a.weight_decay = cfg.weight_decay;
  return a;
}

Waveform RowToWaveform(const Mat& row) {
  Waveform w;
  w.sample_rate = kCanonicalSampleRate;
  w.samples.resize(static_cast<std::size_t>(row.cols()));
  for (Eigen::Index i = 0; i < row.cols(); ++i) {
    w.samples[static_cast<std::size_t>(i)] = row(0, i);
  }
  return w;
}

}  // namespace

std::string StepRecord::ToJsonLine() const {
  nlohmann::json j;
  j["step"] = step;
  j["l_ecl"] = losses.l_ecl;
  j["l_scl"] = losses.l_scl;
  j["l_content"] = losses.l_content;
  j["l_mse"] = losses.l_mse;
  j["l_kl"] = losses.l_kl;
  j["l_final"] = losses.l_final;
  j["vocoder_adv"] = vocoder_adv;
  j["vocoder_fm"] = vocoder_fm;
  j["l_dur"] = l_dur;
  j["disc_loss"] = disc_loss;
  j["epoch"] = epoch;
  j["lr"] = lr;
  j["grad_norm_g"] = grad_norm_g;
  j["grad_norm_d"] = grad_norm_d;
  return j.dump();
}

int64_t CountTrainableParameters(const ModelConfig& mcfg, const Vocab& vocab,
                                 const SpeakerEncoderConfig& spk_cfg,
                                 const EmotionEncoderConfig& emo_cfg,
                                 const ContentEncoderConfig& content_cfg) {
  Synthesizer synth(mcfg, vocab, spk_cfg, emo_cfg, content_cfg, 0);
  ParamRegistry disc_reg;
  Rng rng(1);
  DiscriminatorSet disc(&disc_reg, mcfg, &rng);
  return synth.tts_registry()->ParameterCount() + disc_reg.ParameterCount();
}

Trainer::Trainer(const TrainConfig& cfg, const ModelConfig& mcfg,
                 const Vocab& vocab, const SpeakerEncoderConfig& spk_cfg,
                 const EmotionEncoderConfig& emo_cfg,
                 const ContentEncoderConfig& content_cfg,
                 const TrainDataset* data, const std::string& out_dir)
    : cfg_(cfg),
      data_(data),
      out_dir_(out_dir),
      synth_(mcfg, vocab, spk_cfg, emo_cfg, content_cfg, cfg.seed),
      disc_reg_(std::make_unique<ParamRegistry>()),
      batcher_(data->size(), cfg.batch_size, cfg.seed),
      noise_rng_(cfg.seed ^ 0x6f1e5eedULL),
      dropout_rng_(cfg.seed ^ 0xd20b0a57ULL),
      segment_rng_(cfg.seed ^ 0x5e67a125ULL) {
  cfg_.Validate();
  Rng disc_rng(cfg.seed ^ 0xc217c5e7ULL);
  disc_ = DiscriminatorSet(disc_reg_.get(), mcfg, &disc_rng);
  opt_g_ = AdamW(synth_.tts_registry(), MakeAdamConfig(cfg_));
  opt_d_ = AdamW(disc_reg_.get(), MakeAdamConfig(cfg_));
  if (!out_dir_.empty()) {
    std::filesystem::create_directories(out_dir_);
  }
  CacheReferenceEmbeddings();
}

void Trainer::CacheReferenceEmbeddings() {
  ref_spk_.clear();
  ref_emo_.clear();
  ref_spk_.reserve(data_->size());
  ref_emo_.reserve(data_->size());
  for (std::size_t i = 0; i < data_->size(); ++i) {
    Waveform w = RowToWaveform(data_->item(i).wave_row);
    ref_spk_.push_back(synth_.speaker_encoder().Embed(w).value());
    ref_emo_.push_back(synth_.emotion_encoder().Embed(w).value());
  }
}

void Trainer::AppendLog(const std::string& line) const {
  if (out_dir_.empty()) return;
  std::ofstream out(out_dir_ + "/train_log.jsonl", std::ios::app);
  out << line << "\n";
}

int64_t Trainer::CountParameters() const {
  return const_cast<Synthesizer&>(synth_).tts_registry()->ParameterCount() +
         disc_reg_->ParameterCount();
}

StepRecord Trainer::Step() {
  // Snapshot the cheap mutable state so a rejected step leaves no trace.
  const int64_t epoch_before = batcher_.epoch();
  const std::size_t cursor_before = batcher_.cursor();
  const std::string noise_state = noise_rng_.StateString();
  const std::string dropout_state = dropout_rng_.StateString();
  const std::string segment_state = segment_rng_.StateString();
  try {
    return StepImpl();
  } catch (const Error& e) {
    batcher_.Restore(epoch_before, cursor_before);
    noise_rng_.SetStateString(noise_state);
    dropout_rng_.SetStateString(dropout_state);
    segment_rng_.SetStateString(segment_state);
    if (e.code() == ErrorCode::kNonFiniteComponent ||
        e.code() == ErrorCode::kNonFiniteLoss) {
      nlohmann::json j;
      j["step"] = step_ + 1;
      j["event"] = "non_finite_rejected";
      j["detail"] = e.what();
      AppendLog(j.dump());
      throw Error(ErrorCode::kNonFiniteLoss,
                  std::string("step rejected: ") + e.what());
    }
    throw;
  }
}

StepRecord Trainer::StepImpl() {
  const std::vector<std::size_t> batch = batcher_.NextBatch();
  const double lr = cfg_.LearningRate(batcher_.epoch());
  const int hop = synth_.config().hop();
  const StftBasis& basis = StftBasis::Canonical();

  std::vector<Tensor> fakes;
  std::vector<Mat> reals;
  fakes.reserve(batch.size());
  reals.reserve(batch.size());
  Tensor kl_acc;
  Tensor dur_acc;

  for (std::size_t idx : batch) {
    const TrainItem& it = data_->item(idx);
    // Waveforms with non-finite samples poison every loss; reject early so
    // the incident is reported as a non-finite step.
    if (!it.wave_row.allFinite()) {
      throw Error(ErrorCode::kNonFiniteLoss,
                  "non-finite sample in training waveform");
    }
    Tensor spk = Tensor::Constant(ref_spk_[idx]);
    Tensor emo = Tensor::Constant(ref_emo_[idx]);
    Tensor g = synth_.StyleVector(spk, emo);
    Tensor g_post = synth_.PosteriorStyle(spk, emo);

    PriorStats prior =
        synth_.text_encoder().Forward(it.seq, spk, emo, &dropout_rng_);
    LatentSequence post =
        synth_.posterior().Forward(it.linear, g_post, &noise_rng_, nullptr);
    FlowResult flowed = synth_.flow().Forward(post.z, g);

    Mat ll = GaussianFrameLogLik(prior.mu.value(), prior.log_sigma.value(),
                                 flowed.z.value());
    Alignment align = MasFromLogLik(ll);

    Tensor mu_p = RepeatCols(prior.mu, align.durations);
    Tensor logs_p = RepeatCols(prior.log_sigma, align.durations);
    Tensor kl = KlLoss(post.z, post.mu, post.log_sigma, flowed.z, mu_p,
                       logs_p, flowed.logdet, cfg_.loss.kl_weight);
    kl_acc = kl_acc.defined() ? Add(kl_acc, kl) : kl;

    Tensor nll = synth_.sdp().Nll(prior.hidden, align.durations, g,
                                  &noise_rng_, &dropout_rng_);
    Tensor dur = ScaleByScalar(
        nll, 1.0 / static_cast<double>(align.durations.size()));
    dur_acc = dur_acc.defined() ? Add(dur_acc, dur) : dur;

    // Random fixed-length window of latent frames paired with the matching
    // waveform samples.
    const int t_frames = static_cast<int>(post.z.cols());
    const int n_samples = static_cast<int>(it.wave_row.cols());
    int seg = std::min(cfg_.segment_frames, t_frames);
    seg = std::min(seg, n_samples / hop);
    if (seg < 1) {
      throw Error(ErrorCode::kTooShort,
                  "clip too short for one vocoder segment");
    }
    const int max_start = std::min(t_frames - seg, n_samples / hop - seg);
    const int start =
        max_start > 0 ? segment_rng_.UniformInt(max_start + 1) : 0;
    Tensor z_slice = SliceCols(post.z, start, seg);
    Tensor fake = synth_.generator().Forward(z_slice, g);
    Mat real = it.wave_row.block(0, start * hop, 1, seg * hop);
    fakes.push_back(fake);
    reals.push_back(real);
  }

  const int n = static_cast<int>(batch.size());
  const double inv_n = 1.0 / static_cast<double>(n);
  Tensor l_kl = ScaleByScalar(kl_acc, inv_n);
  Tensor l_dur = ScaleByScalar(dur_acc, inv_n);
  Tensor l_ecl = EmotionConsistencyLoss(synth_.emotion_encoder(), basis,
                                        fakes, reals, cfg_.loss.alpha_e);
  Tensor l_scl = SpeakerConsistencyLoss(synth_.speaker_encoder(), basis,
                                        fakes, reals, cfg_.loss.alpha_s);
  Tensor l_content = ContentLoss(synth_.content_encoder(), fakes, reals,
                                 cfg_.loss.content_weight);
  Tensor l_mse = MelReconstructionLossBatch(basis, fakes, reals,
                                            cfg_.loss.mel_weight);

  Tensor d_acc;
  Tensor adv_acc;
  Tensor fm_acc;
  for (int i = 0; i < n; ++i) {
    DiscOutput real_out = disc_.Forward(Tensor::Constant(reals[i]));
    DiscOutput fake_det = disc_.Forward(Tensor::Constant(fakes[i].value()));
    DiscOutput fake_live = disc_.Forward(fakes[i]);
    Tensor d = DiscriminatorLoss(real_out, fake_det);
    Tensor adv = GeneratorAdversarialLoss(fake_live);
    Tensor fm = FeatureMatchingLoss(real_out, fake_live, cfg_.loss.fm_weight);
    d_acc = d_acc.defined() ? Add(d_acc, d) : d;
    adv_acc = adv_acc.defined() ? Add(adv_acc, adv) : adv;
    fm_acc = fm_acc.defined() ? Add(fm_acc, fm) : fm;
  }
  Tensor d_loss = ScaleByScalar(d_acc, inv_n);
  Tensor adv = ScaleByScalar(adv_acc, inv_n);
  Tensor fm = ScaleByScalar(fm_acc, inv_n);

  FinalLossResult final = FinalLoss(l_ecl, l_scl, l_content, l_mse, l_kl, n);
  StepRecord rec;
  rec.losses = final.breakdown;
  rec.l_dur = l_dur.item();
  rec.vocoder_adv = adv.item();
  rec.vocoder_fm = fm.item();
  rec.disc_loss = d_loss.item();
  for (double v : {rec.l_dur, rec.vocoder_adv, rec.vocoder_fm,
                   rec.disc_loss}) {
    if (!std::isfinite(v)) {
      throw Error(ErrorCode::kNonFiniteLoss, "non-finite vocoder-side loss");
    }
  }
  Tensor total_g = Add(Add(Add(final.total, l_dur), adv), fm);

  // Both objectives are differentiated against the pre-update state, then
  // the two groups are stepped; a rejected step therefore mutates nothing.
  synth_.tts_registry()->ZeroGrads();
  synth_.spk_registry()->ZeroGrads();
  synth_.emo_registry()->ZeroGrads();
  disc_reg_->ZeroGrads();
  d_loss.Backward();
  std::map<std::string, Mat> disc_grads = opt_d_.CaptureGrads();
  total_g.Backward();
  rec.grad_norm_d =
      opt_d_.StepWithGrads(lr, std::move(disc_grads), cfg_.grad_clip_norm);
  rec.grad_norm_g = opt_g_.Step(lr, cfg_.grad_clip_norm);

  ++step_;
  rec.step = step_;
  rec.epoch = batcher_.epoch();
  rec.lr = lr;
  AppendLog(rec.ToJsonLine());
  return rec;
}

void Trainer::Save(const std::string& path) const {
  Checkpoint ck;
  synth_.SaveInto(&ck, step_);
  disc_reg_->SaveTensors(&ck.tensors, "disc.");
  opt_g_.SaveInto(&ck.tensors, "opt_g.");
  opt_d_.SaveInto(&ck.tensors, "opt_d.");
  ck.meta["train_step"] = step_;
  ck.meta["epoch"] = batcher_.epoch();
  ck.meta["cursor"] = static_cast<int64_t>(batcher_.cursor());
  ck.meta["train_config"] = cfg_.ToText();
  ck.blobs["noise_rng"] = noise_rng_.StateString();
  ck.blobs["dropout_rng"] = dropout_rng_.StateString();
  ck.blobs["segment_rng"] = segment_rng_.StateString();
  ck.Save(path);
}

void Trainer::Load(const std::string& path) {
  Checkpoint ck = Checkpoint::Load(path);
  Synthesizer loaded = Synthesizer::LoadFrom(ck);
  if (loaded.config().ToJson() != synth_.config().ToJson()) {
    throw Error(ErrorCode::kIncompatibleDimensions,
                "checkpoint model configuration differs from the trainer's");
  }
  if (loaded.vocab().Hash() != synth_.vocab().Hash()) {
    throw Error(ErrorCode::kVocabMismatch,
                "checkpoint vocabulary differs from the training corpus's");
  }
  synth_ = std::move(loaded);
  disc_reg_->LoadTensors(ck.tensors, "disc.");
  opt_g_ = AdamW(synth_.tts_registry(), MakeAdamConfig(cfg_));
  opt_d_ = AdamW(disc_reg_.get(), MakeAdamConfig(cfg_));
  opt_g_.LoadFrom(ck.tensors, "opt_g.");
  opt_d_.LoadFrom(ck.tensors, "opt_d.");
  if (!ck.meta.contains("train_step") || !ck.meta.contains("epoch") ||
      !ck.meta.contains("cursor")) {
    throw Error(ErrorCode::kCorruptCheckpoint,
                "training metadata missing from checkpoint");
  }
  step_ = ck.meta["train_step"].get<int64_t>();
  batcher_.Restore(ck.meta["epoch"].get<int64_t>(),
                   static_cast<std::size_t>(ck.meta["cursor"].get<int64_t>()));
  auto blob = [&](const char* name) -> const std::string& {
    auto it = ck.blobs.find(name);
    if (it == ck.blobs.end()) {
      throw Error(ErrorCode::kCorruptCheckpoint,
                  std::string("missing RNG state: ") + name);
    }
    return it->second;
  };
  noise_rng_.SetStateString(blob("noise_rng"));
  dropout_rng_.SetStateString(blob("dropout_rng"));
  segment_rng_.SetStateString(blob("segment_rng"));
  CacheReferenceEmbeddings();
}

}  // namespace xltts
