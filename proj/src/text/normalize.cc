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

#include "text/normalize.h"

#include <algorithm>

#include "text/nfc_data.h"
#include "util/error.h"

namespace xltts {

namespace {

// Hangul syllable decomposition/composition constants (algorithmic block).
constexpr uint32_t kSBase = 0xAC00;
constexpr uint32_t kLBase = 0x1100;
constexpr uint32_t kVBase = 0x1161;
constexpr uint32_t kTBase = 0x11A7;
constexpr uint32_t kLCount = 19;
constexpr uint32_t kVCount = 21;
constexpr uint32_t kTCount = 28;
constexpr uint32_t kNCount = kVCount * kTCount;
constexpr uint32_t kSCount = kLCount * kNCount;

int CombiningClass(uint32_t cp) {
  const nfc::CccEntry* begin = nfc::kCcc;
  const nfc::CccEntry* end = nfc::kCcc + std::size(nfc::kCcc);
  auto it = std::lower_bound(
      begin, end, cp,
      [](const nfc::CccEntry& e, uint32_t v) { return e.cp < v; });
  return (it != end && it->cp == cp) ? it->ccc : 0;
}

void DecomposeInto(uint32_t cp, std::vector<uint32_t>* out) {
  if (cp >= kSBase && cp < kSBase + kSCount) {
    uint32_t s = cp - kSBase;
    out->push_back(kLBase + s / kNCount);
    out->push_back(kVBase + (s % kNCount) / kTCount);
    if (s % kTCount != 0) out->push_back(kTBase + s % kTCount);
    return;
  }
  const nfc::DecompEntry* begin = nfc::kDecomp;
  const nfc::DecompEntry* end = nfc::kDecomp + std::size(nfc::kDecomp);
  auto it = std::lower_bound(
      begin, end, cp,
      [](const nfc::DecompEntry& e, uint32_t v) { return e.cp < v; });
  if (it != end && it->cp == cp) {
    for (uint32_t i = 0; i < it->length; ++i) {
      out->push_back(nfc::kDecompData[it->offset + i]);
    }
    return;
  }
  out->push_back(cp);
}

// Looks up a primary composite, Hangul included. Returns 0 when the pair
// does not compose (U+0000 never composes).
uint32_t ComposePair(uint32_t a, uint32_t b) {
  if (a >= kLBase && a < kLBase + kLCount && b >= kVBase &&
      b < kVBase + kVCount) {
    return kSBase + ((a - kLBase) * kVCount + (b - kVBase)) * kTCount;
  }
  if (a >= kSBase && a < kSBase + kSCount && (a - kSBase) % kTCount == 0 &&
      b > kTBase && b < kTBase + kTCount) {
    return a + (b - kTBase);
  }
  uint64_t key = (static_cast<uint64_t>(a) << 21) | b;
  const nfc::ComposeEntry* begin = nfc::kCompose;
  const nfc::ComposeEntry* end = nfc::kCompose + std::size(nfc::kCompose);
  auto it = std::lower_bound(
      begin, end, key,
      [](const nfc::ComposeEntry& e, uint64_t v) { return e.key < v; });
  return (it != end && it->key == key) ? it->composed : 0;
}

bool IsWhitespace(uint32_t cp) {
  switch (cp) {
    case 0x09: case 0x0A: case 0x0B: case 0x0C: case 0x0D:
    case 0x20: case 0x85: case 0xA0: case 0x1680:
    case 0x2028: case 0x2029: case 0x202F: case 0x205F: case 0x3000:
      return true;
    default:
      return cp >= 0x2000 && cp <= 0x200A;
  }
}

}  // namespace

std::vector<uint32_t> Utf8Decode(const std::string& text) {
  std::vector<uint32_t> out;
  out.reserve(text.size());
  size_t i = 0;
  while (i < text.size()) {
    uint8_t b0 = static_cast<uint8_t>(text[i]);
    uint32_t cp = 0;
    int extra = 0;
    if (b0 < 0x80) {
      cp = b0;
    } else if ((b0 & 0xE0) == 0xC0) {
      cp = b0 & 0x1F;
      extra = 1;
    } else if ((b0 & 0xF0) == 0xE0) {
      cp = b0 & 0x0F;
      extra = 2;
    } else if ((b0 & 0xF8) == 0xF0) {
      cp = b0 & 0x07;
      extra = 3;
    } else {
      throw Error(ErrorCode::kInvalidArgument, "invalid UTF-8 lead byte");
    }
    if (i + extra >= text.size()) {
      throw Error(ErrorCode::kInvalidArgument, "truncated UTF-8 sequence");
    }
    for (int k = 1; k <= extra; ++k) {
      uint8_t b = static_cast<uint8_t>(text[i + k]);
      if ((b & 0xC0) != 0x80) {
        throw Error(ErrorCode::kInvalidArgument,
                    "invalid UTF-8 continuation byte");
      }
      cp = (cp << 6) | (b & 0x3F);
    }
    static constexpr uint32_t kMinForExtra[4] = {0, 0x80, 0x800, 0x10000};
    if (cp < kMinForExtra[extra] || cp > 0x10FFFF ||
        (cp >= 0xD800 && cp <= 0xDFFF)) {
      throw Error(ErrorCode::kInvalidArgument, "invalid UTF-8 codepoint");
    }
    out.push_back(cp);
    i += 1 + extra;
  }
  return out;
}

std::string Utf8Encode(const std::vector<uint32_t>& cps) {
  std::string out;
  out.reserve(cps.size());
  for (uint32_t cp : cps) {
    if (cp <= 0x7F) {
      out.push_back(static_cast<char>(cp));
    } else if (cp <= 0x7FF) {
      out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
      out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp <= 0xFFFF) {
      out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
      out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
      out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else {
      out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
      out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
      out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
      out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
  }
  return out;
}

std::vector<uint32_t> NormalizeNfc(const std::vector<uint32_t>& cps) {
  // 1. Full canonical decomposition.
  std::vector<uint32_t> d;
  d.reserve(cps.size());
  for (uint32_t cp : cps) DecomposeInto(cp, &d);

  // 2. Canonical ordering: stable-sort runs of nonzero-class marks.
  for (size_t i = 1; i < d.size(); ++i) {
    int cc = CombiningClass(d[i]);
    if (cc == 0) continue;
    size_t j = i;
    while (j > 0) {
      int prev = CombiningClass(d[j - 1]);
      if (prev == 0 || prev <= cc) break;
      std::swap(d[j - 1], d[j]);
      --j;
    }
  }

  // 3. Recomposition against the last starter, skipping blocked marks.
  if (d.empty()) return d;
  std::vector<uint32_t> out;
  out.reserve(d.size());
  out.push_back(d[0]);
  size_t starter = CombiningClass(d[0]) == 0 ? 0 : static_cast<size_t>(-1);
  for (size_t i = 1; i < d.size(); ++i) {
    uint32_t c = d[i];
    int cc = CombiningClass(c);
    if (starter != static_cast<size_t>(-1)) {
      bool adjacent = starter + 1 == out.size();
      bool unblocked = adjacent || CombiningClass(out.back()) < cc;
      uint32_t composed = unblocked ? ComposePair(out[starter], c) : 0;
      if (composed != 0) {
        out[starter] = composed;
        continue;
      }
    }
    out.push_back(c);
    if (cc == 0) starter = out.size() - 1;
  }
  return out;
}

std::string NormalizeText(const std::string& text) {
  std::vector<uint32_t> cps = NormalizeNfc(Utf8Decode(text));
  std::vector<uint32_t> out;
  out.reserve(cps.size());
  bool pending_space = false;
  for (uint32_t cp : cps) {
    if (IsWhitespace(cp)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) {
      out.push_back(0x20);
      pending_space = false;
    }
    out.push_back(cp);
  }
  return Utf8Encode(out);
}

}  // namespace xltts
