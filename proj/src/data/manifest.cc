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

#include "data/manifest.h"

#include <filesystem>
#include <fstream>

#include "json.hpp"
#include "text/normalize.h"
#include "text/vocab.h"
#include "util/error.h"

namespace xltts {

namespace {

std::string LinePrefix(int line_no) {
  return "line " + std::to_string(line_no) + ": ";
}

bool BlankLine(const std::string& line) {
  for (char c : line) {
    if (c != ' ' && c != '\t' && c != '\r') return false;
  }
  return true;
}

Utterance ParseLine(const std::string& line, int line_no) {
  nlohmann::json j = nlohmann::json::parse(line, nullptr,
                                           /*allow_exceptions=*/false);
  if (j.is_discarded() || !j.is_object()) {
    throw Error(ErrorCode::kMalformedLine, LinePrefix(line_no) + "not a JSON object");
  }
  for (const char* field : {"audio", "text", "lang", "speaker"}) {
    if (!j.contains(field) || !j[field].is_string()) {
      throw Error(ErrorCode::kMalformedLine,
                  LinePrefix(line_no) + "missing string field '" + field + "'");
    }
  }
  Utterance u;
  u.audio = j["audio"].get<std::string>();
  u.text = j["text"].get<std::string>();
  u.lang = j["lang"].get<std::string>();
  u.speaker = j["speaker"].get<std::string>();
  if (u.audio.empty()) {
    throw Error(ErrorCode::kMalformedLine, LinePrefix(line_no) + "empty audio path");
  }
  if (u.speaker.empty()) {
    throw Error(ErrorCode::kMalformedLine, LinePrefix(line_no) + "empty speaker id");
  }
  try {
    if (NormalizeText(u.text).empty()) {
      throw Error(ErrorCode::kMalformedLine,
                  LinePrefix(line_no) + "text empty after normalization");
    }
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kMalformedLine) throw;
    throw Error(ErrorCode::kMalformedLine,
                LinePrefix(line_no) + "text is not valid UTF-8");
  }
  // Validates the code; the id itself is looked up again downstream.
  try {
    LanguageId(u.lang);
  } catch (const Error&) {
    throw Error(ErrorCode::kUnsupportedLanguage,
                LinePrefix(line_no) + "'" + u.lang + "'");
  }
  if (j.contains("emotion") && !j["emotion"].is_null()) {
    if (!j["emotion"].is_string()) {
      throw Error(ErrorCode::kMalformedLine,
                  LinePrefix(line_no) + "emotion must be a string");
    }
    std::string label = j["emotion"].get<std::string>();
    try {
      EmotionId(label);
    } catch (const Error&) {
      throw Error(ErrorCode::kUnknownEmotionLabel,
                  LinePrefix(line_no) + "'" + label + "'");
    }
    u.emotion = label;
  }
  return u;
}

}  // namespace

int EmotionId(const std::string& label) {
  for (int i = 0; i < kNumEmotions; ++i) {
    if (label == kEmotionLabels[i]) return i;
  }
  throw Error(ErrorCode::kUnknownEmotionLabel, label);
}

std::vector<Utterance> LoadManifest(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in.good()) {
    throw Error(ErrorCode::kMissingFile, path);
  }
  std::vector<Utterance> utts;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (BlankLine(line)) continue;
    utts.push_back(ParseLine(line, line_no));
  }
  return utts;
}

void SaveManifest(const std::string& path,
                  const std::vector<Utterance>& utts) {
  std::ofstream out(path, std::ios::binary);
  if (!out.good()) {
    throw Error(ErrorCode::kUnwritablePath, path);
  }
  for (const Utterance& u : utts) {
    nlohmann::json j;
    j["audio"] = u.audio;
    j["text"] = u.text;
    j["lang"] = u.lang;
    j["speaker"] = u.speaker;
    if (u.emotion.has_value()) j["emotion"] = *u.emotion;
    out << j.dump() << "\n";
  }
  if (!out.good()) {
    throw Error(ErrorCode::kUnwritablePath, path);
  }
}

std::string ResolveAudioPath(const std::string& manifest_path,
                             const std::string& audio) {
  std::filesystem::path p(audio);
  if (p.is_absolute()) return audio;
  return (std::filesystem::path(manifest_path).parent_path() / p).string();
}

}  // namespace xltts
