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

#ifndef XLTTS_CORE_CHECKPOINT_H_
#define XLTTS_CORE_CHECKPOINT_H_

#include <map>
#include <string>

#include "core/tensor.h"
#include "json.hpp"

namespace xltts {

// On-disk container for model state: named tensors (parameters, optimizer
// moments), named byte blobs (RNG states), and a JSON metadata block (shape
// manifest, vocabulary hash, step counters). The layout is fully ordered, so
// save -> load -> save reproduces the file byte for byte. Integrity is
// guarded by a trailing CRC-32; loading anything damaged reports
// CorruptCheckpoint.
struct Checkpoint {
  nlohmann::json meta;
  std::map<std::string, Mat> tensors;
  std::map<std::string, std::string> blobs;

  // Writes to <path>.tmp then renames, so a crash never leaves a torn file
  // at the destination.
  void Save(const std::string& path) const;
  static Checkpoint Load(const std::string& path);
};

}  // namespace xltts

#endif  // XLTTS_CORE_CHECKPOINT_H_
