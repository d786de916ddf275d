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

#ifndef XLTTS_TEXT_VOCAB_H_
#define XLTTS_TEXT_VOCAB_H_

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

namespace xltts {

inline constexpr int kPadId = 0;
inline constexpr int kUnkId = 1;
inline constexpr int kNumLanguages = 4;
inline constexpr const char* kLanguageCodes[kNumLanguages] = {"en", "hi",
                                                              "te", "mr"};
// Upper bound on encoded sequence length.
inline constexpr int kMaxTextLength = 500;

// Language code -> id in [0, 3]; throws UnsupportedLanguage otherwise.
int LanguageId(const std::string& code);

struct TextSequence {
  std::vector<int> ids;  // length >= 1, every id < vocab size
  int lang_id = 0;
  int warning_count = 0;  // characters that fell back to UNK
};

// Character inventory shared by training and synthesis. IDs are contiguous:
// PAD=0, UNK=1, then every distinct normalized character sorted by
// codepoint.
class Vocab {
 public:
  // Builds from raw corpus texts (normalized internally).
  static Vocab Build(const std::vector<std::string>& texts);
  static Vocab FromJson(const std::string& json_text);
  static Vocab LoadFile(const std::string& path);

  std::string ToJson() const;
  void SaveFile(const std::string& path) const;

  // Id for a codepoint, or kUnkId if absent.
  int IdOf(uint32_t cp) const;
  // Inverse lookup for ids >= 2.
  uint32_t CharOf(int id) const;
  bool Contains(uint32_t cp) const;
  // Total table size including PAD and UNK.
  int size() const { return static_cast<int>(chars_.size()) + 2; }
  const std::vector<uint32_t>& chars() const { return chars_; }

  // Stable content fingerprint, stored in checkpoints so an encoder and a
  // synthesizer can detect vocabulary drift.
  uint64_t Hash() const;

 private:
  std::vector<uint32_t> chars_;  // sorted by codepoint; id = index + 2
  std::unordered_map<uint32_t, int> to_id_;

  void RebuildIndex();
};

// Normalizes, validates and encodes text; unknown characters map to UNK and
// are tallied in warning_count.
TextSequence EncodeText(const std::string& text, const std::string& lang,
                        const Vocab& vocab);

// Inverse of EncodeText for fully in-vocab sequences (UNK/PAD rejected).
std::string DecodeIds(const std::vector<int>& ids, const Vocab& vocab);

}  // namespace xltts

#endif  // XLTTS_TEXT_VOCAB_H_
