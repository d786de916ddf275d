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

#ifndef XLTTS_DATA_SPLIT_H_
#define XLTTS_DATA_SPLIT_H_

#include <cstdint>
#include <string>
#include <vector>

#include "data/manifest.h"

namespace xltts {

// Row indices into the manifest the split was computed from. The three sets
// partition [0, n).
struct SplitAssignment {
  std::vector<int> train;
  std::vector<int> val;
  std::vector<int> test;
};

// 80/10/10 split, stratified by (speaker, language) so every stratum is
// proportionally represented (within one utterance). Deterministic in the
// seed. Strata smaller than 10 utterances cannot be split meaningfully.
SplitAssignment SplitDataset(const std::vector<Utterance>& utts,
                             uint64_t seed);

std::string SplitToJson(const SplitAssignment& split);
SplitAssignment SplitFromJson(const std::string& json_text);
void SaveSplit(const std::string& path, const SplitAssignment& split);
SplitAssignment LoadSplit(const std::string& path);

}  // namespace xltts

#endif  // XLTTS_DATA_SPLIT_H_
