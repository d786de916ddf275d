// Copyright (c) 2026 The xltts Authors
// SPDX-License-Identifier: Apache-2.0
//
// In-memory training dataset: loads a manifest subset, featurizes each clip
// once (waveform + linear spectrogram + encoded text), and serves epochs of
// seeded, shuffled batches whose order is reproducible from a saved cursor.

#ifndef XLTTS_TRAIN_DATASET_H_
#define XLTTS_TRAIN_DATASET_H_

#include <cstdint>
#include <string>
#include <vector>

#include "audio/stft.h"
#include "audio/wav.h"
#include "core/rng.h"
#include "core/tensor.h"
#include "data/manifest.h"
#include "text/vocab.h"

namespace xltts {

struct TrainItem {
  Mat wave_row;        // [1 x N] canonical-rate samples
  Spectrogram linear;  // [bins x T] magnitudes
  TextSequence seq;
  std::string speaker;
  int emotion_id = -1;  // -1 when the utterance carries no label
  int manifest_row = 0;
};

class TrainDataset {
 public:
  // Loads the manifest rows listed in `rows` (all rows when empty).
  // Throws kEmptyCorpus when nothing usable remains.
  TrainDataset(const std::string& manifest_path, const std::vector<int>& rows,
               const Vocab& vocab);

  std::size_t size() const { return items_.size(); }
  const TrainItem& item(std::size_t i) const { return items_[i]; }

 private:
  std::vector<TrainItem> items_;
};

// Deterministic epoch shuffler.  The permutation for epoch e is a pure
// function of (seed, e), so the full iteration state is just {epoch, cursor}
// and resumes bit-identically from those two numbers.
class Batcher {
 public:
  Batcher(std::size_t n, int batch_size, uint64_t seed);

  // Returns the next batch of item indices, advancing the cursor and rolling
  // into a freshly shuffled epoch as needed.  Batches never span epochs; a
  // short tail batch ends the epoch.
  std::vector<std::size_t> NextBatch();

  int64_t epoch() const { return epoch_; }
  std::size_t cursor() const { return cursor_; }
  void Restore(int64_t epoch, std::size_t cursor);

 private:
  void Reshuffle();

  std::size_t n_ = 0;
  int batch_size_ = 1;
  uint64_t seed_ = 0;
  int64_t epoch_ = 0;
  std::size_t cursor_ = 0;
  std::vector<std::size_t> order_;
};

}  // namespace xltts

#endif  // XLTTS_TRAIN_DATASET_H_
