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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <string>
#include <vector>

#include "text/normalize.h"
#include "text/vocab.h"
#include "util/error.h"

namespace xltts {
namespace {

template <typename Fn>
ErrorCode ThrownCode(Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an Error to be thrown");
  return ErrorCode::kIoError;
}

using U32 = std::vector<uint32_t>;

}  // namespace

TEST_CASE("utf-8 decode/encode round trip") {
  std::string text = "hello नमस्ते నమస్కారం 한국어 Ωé";
  U32 cps = Utf8Decode(text);
  CHECK(Utf8Encode(cps) == text);
}

TEST_CASE("utf-8 rejects malformed input") {
  CHECK(ThrownCode([] { Utf8Decode("\xFF"); }) == ErrorCode::kInvalidArgument);
  CHECK(ThrownCode([] { Utf8Decode("\xC3"); }) == ErrorCode::kInvalidArgument);
  CHECK(ThrownCode([] { Utf8Decode("\xC3\x28"); }) ==
        ErrorCode::kInvalidArgument);
  // Overlong '/' and an encoded surrogate.
  CHECK(ThrownCode([] { Utf8Decode("\xC0\xAF"); }) ==
        ErrorCode::kInvalidArgument);
  CHECK(ThrownCode([] { Utf8Decode("\xED\xA0\x80"); }) ==
        ErrorCode::kInvalidArgument);
  // Bare continuation byte.
  CHECK(ThrownCode([] { Utf8Decode("\x80"); }) == ErrorCode::kInvalidArgument);
}

TEST_CASE("canonical composition matches reference vectors") {
  // Frozen from a reference Unicode normalizer.
  CHECK(NormalizeNfc({0x65, 0x301}) == U32{0xE9});            // e + acute
  CHECK(NormalizeNfc({0x65, 0x302, 0x323}) == U32{0x1EC7});   // reorder
  CHECK(NormalizeNfc({0x65, 0x323, 0x302}) == U32{0x1EC7});
  CHECK(NormalizeNfc({0x2126}) == U32{0x3A9});                // ohm sign
  // Devanagari QA is composition-excluded: stays decomposed.
  CHECK(NormalizeNfc({0x958}) == U32{0x915, 0x93C});
  // Hangul jamo compose algorithmically.
  CHECK(NormalizeNfc({0x1112, 0x1161, 0x11AB}) == U32{0xD55C});
  CHECK(NormalizeNfc({0xD55C}) == U32{0xD55C});
  // A second dot-below is blocked; circumflex still reaches the starter.
  CHECK(NormalizeNfc({0x65, 0x323, 0x323, 0x302}) == U32{0x1EC7, 0x323});
  // Chained composition through an intermediate composite.
  CHECK(NormalizeNfc({0x3B1, 0x313, 0x301}) == U32{0x1F04});
  // Already-composed Devanagari is untouched.
  U32 namaste = Utf8Decode("नमस्ते");
  REQUIRE(namaste.size() == 6);
  CHECK(NormalizeNfc(namaste) == namaste);
  // Telugu cluster is NFC-stable.
  U32 ksha = Utf8Decode("క్ష");
  CHECK(NormalizeNfc(ksha) == ksha);
}

TEST_CASE("normalization is idempotent") {
  std::vector<U32> inputs = {
      {0x65, 0x302, 0x323},
      {0x958, 0x28, 0x1112, 0x1161, 0x11AB},
      Utf8Decode("mixed ascii नमस्ते and 한국"),
      {0x3B1, 0x313, 0x301, 0x345},
  };
  for (const U32& in : inputs) {
    U32 once = NormalizeNfc(in);
    CHECK(NormalizeNfc(once) == once);
  }
}

TEST_CASE("whitespace collapses and trims") {
  CHECK(NormalizeText("  hello   world \t\n") == "hello world");
  CHECK(NormalizeText("a b") == "a b");          // NBSP
  CHECK(NormalizeText("a  b") == "a b");    // em/thin space run
  CHECK(NormalizeText("   \t  ") == "");
  CHECK(NormalizeText("clean") == "clean");
}

TEST_CASE("vocabulary ids are stable and sorted by codepoint") {
  Vocab v = Vocab::Build({"ab", "ba"});
  CHECK(v.size() == 4);  // PAD, UNK, a, b
  CHECK(v.IdOf('a') == 2);
  CHECK(v.IdOf('b') == 3);
  CHECK(v.CharOf(2) == 'a');
  CHECK(v.IdOf('z') == kUnkId);
  CHECK_FALSE(v.Contains('z'));

  Vocab dev = Vocab::Build({"नमस्ते"});
  CHECK(dev.size() == 2 + 6);  // six distinct codepoints
  // Space enters the vocab when texts contain separated words.
  Vocab spaced = Vocab::Build({"a b"});
  CHECK(spaced.Contains(0x20));
  CHECK(spaced.IdOf(0x20) == 2);  // space sorts below letters
}

TEST_CASE("vocabulary build failures") {
  CHECK(ThrownCode([] { Vocab::Build({}); }) == ErrorCode::kEmptyCorpus);
  CHECK(ThrownCode([] { Vocab::Build({"  ", "\t"}); }) ==
        ErrorCode::kEmptyCorpus);
}

TEST_CASE("encode_text maps characters and counts unknowns") {
  Vocab v = Vocab::Build({"ab"});
  TextSequence seq = EncodeText("ab", "en", v);
  CHECK(seq.ids == std::vector<int>{2, 3});
  CHECK(seq.lang_id == 0);
  CHECK(seq.warning_count == 0);

  TextSequence unk = EncodeText("axb", "te", v);
  CHECK(unk.ids == std::vector<int>{2, kUnkId, 3});
  CHECK(unk.lang_id == 2);
  CHECK(unk.warning_count == 1);

  CHECK(ThrownCode([&] { EncodeText("", "hi", v); }) == ErrorCode::kEmptyText);
  CHECK(ThrownCode([&] { EncodeText("  \t ", "hi", v); }) ==
        ErrorCode::kEmptyText);
  CHECK(ThrownCode([&] { EncodeText("ab", "fr", v); }) ==
        ErrorCode::kUnsupportedLanguage);
  std::string longtext(501, 'a');
  CHECK(ThrownCode([&] { EncodeText(longtext, "en", v); }) ==
        ErrorCode::kInvalidArgument);
  std::string maxtext(500, 'a');
  CHECK(EncodeText(maxtext, "en", v).ids.size() == 500);
}

TEST_CASE("encoding length matches normalized character count") {
  Vocab v = Vocab::Build({"abc नमस्ते"});
  std::string text = "  a  नमस्ते b ";
  TextSequence seq = EncodeText(text, "hi", v);
  CHECK(seq.ids.size() == Utf8Decode(NormalizeText(text)).size());
}

TEST_CASE("decoding inverts encoding for in-vocab text") {
  Vocab v = Vocab::Build({"the quick fox", "नमस्ते दुनिया"});
  for (const std::string text : {"the quick fox", "नमस्ते", "quick नमस्ते"}) {
    TextSequence seq = EncodeText(text, "en", v);
    REQUIRE(seq.warning_count == 0);
    CHECK(DecodeIds(seq.ids, v) == NormalizeText(text));
  }
  CHECK(ThrownCode([&] { DecodeIds({kPadId}, v); }) ==
        ErrorCode::kInvalidArgument);
  CHECK(ThrownCode([&] { DecodeIds({kUnkId}, v); }) ==
        ErrorCode::kInvalidArgument);
}

TEST_CASE("vocabulary serialization round-trips exactly") {
  Vocab v = Vocab::Build({"a b", "नमस्ते", "నమస్కారం"});
  std::string json = v.ToJson();
  Vocab back = Vocab::FromJson(json);
  CHECK(back.chars() == v.chars());
  CHECK(back.Hash() == v.Hash());
  CHECK(back.ToJson() == json);

  Vocab other = Vocab::Build({"xyz"});
  CHECK(other.Hash() != v.Hash());
}

TEST_CASE("vocabulary json validation") {
  CHECK(ThrownCode([] { Vocab::FromJson("not json"); }) ==
        ErrorCode::kInvalidArgument);
  CHECK(ThrownCode([] { Vocab::FromJson("{\"chars\": []}"); }) ==
        ErrorCode::kInvalidArgument);
  CHECK(ThrownCode([] {
          Vocab::FromJson(
              R"({"chars":["a"],"languages":["en","hi","te","fr"]})");
        }) == ErrorCode::kUnsupportedLanguage);
  CHECK(ThrownCode([] {
          Vocab::FromJson(
              R"({"chars":["b","a"],"languages":["en","hi","te","mr"]})");
        }) == ErrorCode::kInvalidArgument);
  CHECK(ThrownCode([] {
          Vocab::FromJson(
              R"({"chars":["ab"],"languages":["en","hi","te","mr"]})");
        }) == ErrorCode::kInvalidArgument);
}

TEST_CASE("language ids are fixed") {
  CHECK(LanguageId("en") == 0);
  CHECK(LanguageId("hi") == 1);
  CHECK(LanguageId("te") == 2);
  CHECK(LanguageId("mr") == 3);
  CHECK(ThrownCode([] { LanguageId("de"); }) ==
        ErrorCode::kUnsupportedLanguage);
}

}  // namespace xltts
