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

#include "text/vocab.h"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "text/normalize.h"
#include "util/error.h"

namespace xltts {

int LanguageId(const std::string& code) {
  for (int i = 0; i < kNumLanguages; ++i) {
    if (code == kLanguageCodes[i]) return i;
  }
  throw Error(ErrorCode::kUnsupportedLanguage, code);
}

Vocab Vocab::Build(const std::vector<std::string>& texts) {
  if (texts.empty()) {
    throw Error(ErrorCode::kEmptyCorpus, "no texts to build a vocabulary");
  }
  std::set<uint32_t> distinct;
  for (const std::string& text : texts) {
    for (uint32_t cp : Utf8Decode(NormalizeText(text))) {
      distinct.insert(cp);
    }
  }
  if (distinct.empty()) {
    throw Error(ErrorCode::kEmptyCorpus,
                "corpus is empty after normalization");
  }
  Vocab v;
  v.chars_.assign(distinct.begin(), distinct.end());  // set is sorted
  v.RebuildIndex();
  return v;
}

void Vocab::RebuildIndex() {
  to_id_.clear();
  to_id_.reserve(chars_.size());
  for (size_t i = 0; i < chars_.size(); ++i) {
    to_id_[chars_[i]] = static_cast<int>(i) + 2;
  }
}

int Vocab::IdOf(uint32_t cp) const {
  auto it = to_id_.find(cp);
  return it == to_id_.end() ? kUnkId : it->second;
}

bool Vocab::Contains(uint32_t cp) const {
  return to_id_.find(cp) != to_id_.end();
}

uint32_t Vocab::CharOf(int id) const {
  if (id < 2 || id >= size()) {
    throw Error(ErrorCode::kInvalidArgument,
                "id has no character: " + std::to_string(id));
  }
  return chars_[static_cast<size_t>(id) - 2];
}

std::string Vocab::ToJson() const {
  nlohmann::json j;
  j["chars"] = nlohmann::json::array();
  for (uint32_t cp : chars_) {
    j["chars"].push_back(Utf8Encode({cp}));
  }
  j["languages"] = nlohmann::json::array();
  for (const char* code : kLanguageCodes) {
    j["languages"].push_back(code);
  }
  return j.dump(2);
}

Vocab Vocab::FromJson(const std::string& json_text) {
  nlohmann::json j = nlohmann::json::parse(json_text, nullptr,
                                           /*allow_exceptions=*/false);
  if (j.is_discarded() || !j.is_object() || !j.contains("chars") ||
      !j.contains("languages") || !j["chars"].is_array() ||
      !j["languages"].is_array()) {
    throw Error(ErrorCode::kInvalidArgument, "malformed vocabulary JSON");
  }
  if (j["languages"].size() != kNumLanguages) {
    throw Error(ErrorCode::kInvalidArgument,
                "vocabulary must list exactly 4 languages");
  }
  for (int i = 0; i < kNumLanguages; ++i) {
    if (!j["languages"][i].is_string() ||
        j["languages"][i].get<std::string>() != kLanguageCodes[i]) {
      throw Error(ErrorCode::kUnsupportedLanguage,
                  "unexpected language list in vocabulary");
    }
  }
  Vocab v;
  uint32_t prev = 0;
  bool first = true;
  for (const auto& item : j["chars"]) {
    if (!item.is_string()) {
      throw Error(ErrorCode::kInvalidArgument, "vocabulary char not a string");
    }
    std::vector<uint32_t> cps = Utf8Decode(item.get<std::string>());
    if (cps.size() != 1) {
      throw Error(ErrorCode::kInvalidArgument,
                  "vocabulary entry is not a single character");
    }
    if (!first && cps[0] <= prev) {
      throw Error(ErrorCode::kInvalidArgument,
                  "vocabulary characters must be strictly sorted");
    }
    v.chars_.push_back(cps[0]);
    prev = cps[0];
    first = false;
  }
  v.RebuildIndex();
  return v;
}

Vocab Vocab::LoadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in.good()) {
    throw Error(ErrorCode::kMissingFile, path);
  }
  std::stringstream ss;
  ss << in.rdbuf();
  return FromJson(ss.str());
}

void Vocab::SaveFile(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out.good()) {
    throw Error(ErrorCode::kUnwritablePath, path);
  }
  out << ToJson() << "\n";
  if (!out.good()) {
    throw Error(ErrorCode::kUnwritablePath, path);
  }
}

uint64_t Vocab::Hash() const {
  // FNV-1a over codepoints then language codes.
  uint64_t h = 1469598103934665603ull;
  auto mix = [&h](uint8_t byte) {
    h ^= byte;
    h *= 1099511628211ull;
  };
  for (uint32_t cp : chars_) {
    for (int s = 0; s < 32; s += 8) mix(static_cast<uint8_t>(cp >> s));
  }
  for (const char* code : kLanguageCodes) {
    for (const char* p = code; *p != '\0'; ++p) {
      mix(static_cast<uint8_t>(*p));
    }
    mix(0);
  }
  return h;
}

TextSequence EncodeText(const std::string& text, const std::string& lang,
                        const Vocab& vocab) {
  TextSequence seq;
  seq.lang_id = LanguageId(lang);
  std::vector<uint32_t> cps = Utf8Decode(NormalizeText(text));
  if (cps.empty()) {
    throw Error(ErrorCode::kEmptyText, "nothing to encode after cleanup");
  }
  if (cps.size() > static_cast<size_t>(kMaxTextLength)) {
    throw Error(ErrorCode::kInvalidArgument,
                "text exceeds " + std::to_string(kMaxTextLength) +
                    " characters after normalization");
  }
  seq.ids.reserve(cps.size());
  for (uint32_t cp : cps) {
    int id = vocab.IdOf(cp);
    if (id == kUnkId) ++seq.warning_count;
    seq.ids.push_back(id);
  }
  return seq;
}

std::string DecodeIds(const std::vector<int>& ids, const Vocab& vocab) {
  std::vector<uint32_t> cps;
  cps.reserve(ids.size());
  for (int id : ids) {
    cps.push_back(vocab.CharOf(id));
  }
  return Utf8Encode(cps);
}

}  // namespace xltts
