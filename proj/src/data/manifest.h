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

#ifndef XLTTS_DATA_MANIFEST_H_
#define XLTTS_DATA_MANIFEST_H_

#include <optional>
#include <string>
#include <vector>

namespace xltts {

inline constexpr int kNumEmotions = 6;
inline constexpr const char* kEmotionLabels[kNumEmotions] = {
    "Neutral", "Angry", "Happy", "Sad", "Fear", "Surprise"};

// Label -> id in [0, 5]; throws UnknownEmotionLabel otherwise.
int EmotionId(const std::string& label);

struct Utterance {
  std::string audio;  // path as written in the manifest
  std::string text;
  std::string lang;  // one of en/hi/te/mr
  std::string speaker;
  std::optional<std::string> emotion;  // one of the six labels when present
};

// Reads a JSON-Lines manifest ({audio,text,lang,speaker,emotion?} per line).
// Any invalid line rejects the whole file with its line number; blank lines
// are permitted. An empty file is an empty corpus, not an error.
std::vector<Utterance> LoadManifest(const std::string& path);

void SaveManifest(const std::string& path,
                  const std::vector<Utterance>& utts);

// Manifest audio paths are relative to the manifest's own directory unless
// absolute.
std::string ResolveAudioPath(const std::string& manifest_path,
                             const std::string& audio);

}  // namespace xltts

#endif  // XLTTS_DATA_MANIFEST_H_
