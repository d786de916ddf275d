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

#ifndef XLTTS_TEXT_NORMALIZE_H_
#define XLTTS_TEXT_NORMALIZE_H_

#include <cstdint>
#include <string>
#include <vector>

namespace xltts {

// Decodes UTF-8 into codepoints; rejects malformed sequences, surrogates and
// overlong encodings.
std::vector<uint32_t> Utf8Decode(const std::string& text);

std::string Utf8Encode(const std::vector<uint32_t>& cps);

// Canonical composition (NFC): full canonical decomposition, canonical
// reordering of combining marks, then recomposition. Hangul is handled
// algorithmically, everything else by generated tables.
std::vector<uint32_t> NormalizeNfc(const std::vector<uint32_t>& cps);

// NFC plus whitespace cleanup: runs of Unicode whitespace collapse to a
// single space and the ends are trimmed.
std::string NormalizeText(const std::string& text);

}  // namespace xltts

#endif  // XLTTS_TEXT_NORMALIZE_H_
