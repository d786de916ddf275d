// Copyright (c) 2026 The xltts Authors
// SPDX-License-Identifier: Apache-2.0

#include "train/dataset.h"

#include <algorithm>
#include <numeric>

#include "util/error.h"

namespace xltts {

TrainDataset::TrainDataset(const std::string& manifest_path,
                           const std::vector<int>& rows, const Vocab& vocab) {
  std::vector<Utterance> utts = LoadManifest(manifest_path);
  std::vector<int> wanted = rows;
  if (wanted.empty()) {
    wanted.resize(utts.size());
    std::iota(wanted.begin(), wanted.end(), 0);
  }
  for (int row : wanted) {
    if (row < 0 || row >= static_cast<int>(utts.size())) {
      throw Error(ErrorCode::kInvalidArgument,
                  "split references manifest row " + std::to_string(row) +
                      " outside 0.." + std::to_string(utts.size()));
    }
    const Utterance& u = utts[row];
    Waveform w = ReadWavCanonical(ResolveAudioPath(manifest_path, u.audio));
    TrainItem item;
    item.wave_row = Mat::Zero(1, static_cast<Eigen::Index>(w.samples.size()));
    for (std::size_t i = 0; i < w.samples.size(); ++i) {
      item.wave_row(0, static_cast<Eigen::Index>(i)) = w.samples[i];
    }
    item.linear = LinearSpectrogram(w);
    item.seq = EncodeText(u.text, u.lang, vocab);
    item.speaker = u.speaker;
    item.emotion_id = u.emotion ? EmotionId(*u.emotion) : -1;
    item.manifest_row = row;
    items_.push_back(std::move(item));
  }
  if (items_.empty()) {
    throw Error(ErrorCode::kEmptyCorpus, "no usable utterances in " +
                                             manifest_path);
  }
}

Batcher::Batcher(std::size_t n, int batch_size, uint64_t seed)
    : n_(n), batch_size_(batch_size), seed_(seed) {
  if (n_ == 0) {
    throw Error(ErrorCode::kEmptyCorpus, "batcher over an empty dataset");
  }
  if (batch_size_ <= 0) {
    throw Error(ErrorCode::kInvalidArgument, "batch size must be positive");
  }
  Reshuffle();
}

void Batcher::Reshuffle() {
  order_.resize(n_);
  std::iota(order_.begin(), order_.end(), std::size_t{0});
  // Fisher-Yates keyed by (seed, epoch) so the permutation is recomputable
  // from the saved cursor alone.
  Rng rng(seed_ ^ (0x9e3779b97f4a7c15ULL * static_cast<uint64_t>(epoch_ + 1)));
  for (std::size_t i = n_; i > 1; --i) {
    std::size_t j = static_cast<std::size_t>(rng.UniformInt(
        static_cast<int>(i)));
    std::swap(order_[i - 1], order_[j]);
  }
}

std::vector<std::size_t> Batcher::NextBatch() {
  if (cursor_ >= n_) {
    ++epoch_;
    cursor_ = 0;
    Reshuffle();
  }
  std::size_t take = std::min<std::size_t>(batch_size_, n_ - cursor_);
  std::vector<std::size_t> batch(order_.begin() + cursor_,
                                 order_.begin() + cursor_ + take);
  cursor_ += take;
  return batch;
}

void Batcher::Restore(int64_t epoch, std::size_t cursor) {
  epoch_ = epoch;
  cursor_ = std::min(cursor, n_);
  Reshuffle();
}

}  // namespace xltts
