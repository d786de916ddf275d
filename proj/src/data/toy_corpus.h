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

#ifndef XLTTS_DATA_TOY_CORPUS_H_
#define XLTTS_DATA_TOY_CORPUS_H_

#include <cstdint>
#include <string>

namespace xltts {

// Synthetic corpus for smoke tests and desk-scale training. "Speech" is a
// harmonic tone per character: speakers differ by base pitch, emotions by
// speaking rate, tremor and pitch span, languages by script (and therefore
// character inventory). Every clip is at least one second long.
struct ToyCorpusSpec {
  int speakers = 4;        // 1-4, base pitches 120/170/220/280 Hz
  int langs = 4;           // 1-4, subset of en/hi/te/mr
  int per_combo = 2;       // utterances per (speaker, language) pair
  bool with_emotions = true;
  uint64_t seed = 0;
};

// Writes WAVs plus manifest.jsonl under dir; returns the manifest path.
std::string MakeToyCorpus(const std::string& dir, const ToyCorpusSpec& spec);

}  // namespace xltts

#endif  // XLTTS_DATA_TOY_CORPUS_H_
