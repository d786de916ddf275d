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

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "audio/wav.h"
#include "data/manifest.h"
#include "data/split.h"
#include "data/toy_corpus.h"
#include "util/error.h"

namespace fs = std::filesystem;

namespace xltts {
namespace {

fs::path TempDir() {
  fs::path dir = fs::temp_directory_path() / "xltts_data_test";
  fs::create_directories(dir);
  return dir;
}

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

std::string WriteTempFile(const std::string& name, const std::string& body) {
  fs::path path = TempDir() / name;
  std::ofstream out(path, std::ios::binary);
  out << body;
  out.close();
  return path.string();
}

std::string SlurpFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// n utterances spread across (speakers x langs) strata, sizes as given.
std::vector<Utterance> MakeStrata(
    const std::vector<std::pair<std::pair<std::string, std::string>, int>>&
        sizes) {
  std::vector<Utterance> utts;
  for (const auto& [key, n] : sizes) {
    for (int i = 0; i < n; ++i) {
      Utterance u;
      u.audio = key.first + "_" + key.second + "_" + std::to_string(i) +
                ".wav";
      u.text = "text";
      u.lang = key.second;
      u.speaker = key.first;
      utts.push_back(u);
    }
  }
  return utts;
}

std::vector<int> SortedUnion(const SplitAssignment& s) {
  std::vector<int> all;
  all.insert(all.end(), s.train.begin(), s.train.end());
  all.insert(all.end(), s.val.begin(), s.val.end());
  all.insert(all.end(), s.test.begin(), s.test.end());
  std::sort(all.begin(), all.end());
  return all;
}

}  // namespace

TEST_CASE("emotion labels map to fixed ids") {
  CHECK(EmotionId("Neutral") == 0);
  CHECK(EmotionId("Angry") == 1);
  CHECK(EmotionId("Happy") == 2);
  CHECK(EmotionId("Sad") == 3);
  CHECK(EmotionId("Fear") == 4);
  CHECK(EmotionId("Surprise") == 5);
  CHECK(ThrownCode([] { EmotionId("Joyful"); }) ==
        ErrorCode::kUnknownEmotionLabel);
  CHECK(ThrownCode([] { EmotionId("angry"); }) ==
        ErrorCode::kUnknownEmotionLabel);
}

TEST_CASE("manifest loads well-formed lines") {
  std::string path = WriteTempFile(
      "good.jsonl",
      R"({"audio":"a.wav","text":"hello","lang":"en","speaker":"s1"})"
      "\n"
      "\n"  // blank lines are fine
      R"({"audio":"b.wav","text":"नमस्ते","lang":"hi","speaker":"s2",)"
      R"("emotion":"Happy"})"
      "\n");
  std::vector<Utterance> utts = LoadManifest(path);
  REQUIRE(utts.size() == 2);
  CHECK(utts[0].audio == "a.wav");
  CHECK(utts[0].text == "hello");
  CHECK(utts[0].lang == "en");
  CHECK(utts[0].speaker == "s1");
  CHECK_FALSE(utts[0].emotion.has_value());
  CHECK(utts[1].lang == "hi");
  REQUIRE(utts[1].emotion.has_value());
  CHECK(*utts[1].emotion == "Happy");
}

TEST_CASE("manifest rejects the whole file on any bad line") {
  std::string good =
      R"({"audio":"a.wav","text":"hi","lang":"en","speaker":"s1"})";

  SUBCASE("malformed json carries its line number") {
    std::string path =
        WriteTempFile("bad_json.jsonl", good + "\nnot json at all\n");
    try {
      LoadManifest(path);
      FAIL("expected error");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::kMalformedLine);
      CHECK(std::string(e.what()).find("line 2") != std::string::npos);
    }
  }
  SUBCASE("missing required field") {
    std::string path = WriteTempFile(
        "missing_field.jsonl",
        good + "\n" + R"({"audio":"b.wav","lang":"en","speaker":"s1"})" +
            "\n");
    CHECK(ThrownCode([&] { LoadManifest(path); }) ==
          ErrorCode::kMalformedLine);
  }
  SUBCASE("unsupported language") {
    std::string path = WriteTempFile(
        "bad_lang.jsonl",
        R"({"audio":"a.wav","text":"hi","lang":"fr","speaker":"s1"})" "\n");
    CHECK(ThrownCode([&] { LoadManifest(path); }) ==
          ErrorCode::kUnsupportedLanguage);
  }
  SUBCASE("unknown emotion label") {
    std::string path = WriteTempFile(
        "bad_emotion.jsonl",
        R"({"audio":"a.wav","text":"hi","lang":"en","speaker":"s1",)"
        R"("emotion":"Bored"})" "\n");
    CHECK(ThrownCode([&] { LoadManifest(path); }) ==
          ErrorCode::kUnknownEmotionLabel);
  }
  SUBCASE("missing file") {
    CHECK(ThrownCode([&] { LoadManifest("/nonexistent/m.jsonl"); }) ==
          ErrorCode::kMissingFile);
  }
}

TEST_CASE("empty manifest is an empty corpus") {
  std::string path = WriteTempFile("empty.jsonl", "");
  CHECK(LoadManifest(path).empty());
  std::string blank = WriteTempFile("blank.jsonl", "\n\n\n");
  CHECK(LoadManifest(blank).empty());
}

TEST_CASE("manifest save/load round trip") {
  std::vector<Utterance> utts;
  Utterance a{"x/a.wav", "hello there", "en", "s1", std::nullopt};
  Utterance b{"/abs/b.wav", "నమస్కారం", "te", "s2", "Sad"};
  utts.push_back(a);
  utts.push_back(b);
  fs::path path = TempDir() / "roundtrip.jsonl";
  SaveManifest(path.string(), utts);
  std::vector<Utterance> back = LoadManifest(path.string());
  REQUIRE(back.size() == 2);
  CHECK(back[0].audio == a.audio);
  CHECK(back[0].text == a.text);
  CHECK_FALSE(back[0].emotion.has_value());
  CHECK(back[1].lang == "te");
  CHECK(back[1].speaker == "s2");
  REQUIRE(back[1].emotion.has_value());
  CHECK(*back[1].emotion == "Sad");
}

TEST_CASE("audio paths resolve relative to the manifest") {
  CHECK(ResolveAudioPath("/data/corpus/manifest.jsonl", "wavs/a.wav") ==
        "/data/corpus/wavs/a.wav");
  CHECK(ResolveAudioPath("/data/corpus/manifest.jsonl", "/abs/a.wav") ==
        "/abs/a.wav");
  CHECK(ResolveAudioPath("manifest.jsonl", "a.wav") == "a.wav");
}

TEST_CASE("single-stratum split is exactly 80/10/10") {
  std::vector<Utterance> utts = MakeStrata({{{"s1", "en"}, 100}});
  SplitAssignment s = SplitDataset(utts, 7);
  CHECK(s.train.size() == 80);
  CHECK(s.val.size() == 10);
  CHECK(s.test.size() == 10);
  std::vector<int> expect(100);
  std::iota(expect.begin(), expect.end(), 0);
  CHECK(SortedUnion(s) == expect);
}

TEST_CASE("split is deterministic in the seed") {
  std::vector<Utterance> utts =
      MakeStrata({{{"s1", "en"}, 40}, {{"s2", "hi"}, 60}});
  SplitAssignment a = SplitDataset(utts, 123);
  SplitAssignment b = SplitDataset(utts, 123);
  CHECK(a.train == b.train);
  CHECK(a.val == b.val);
  CHECK(a.test == b.test);
  SplitAssignment c = SplitDataset(utts, 124);
  CHECK(a.train != c.train);
}

TEST_CASE("split proportions hold within one per stratum") {
  std::vector<Utterance> utts = MakeStrata({{{"s1", "en"}, 10},
                                            {{"s1", "hi"}, 15},
                                            {{"s2", "en"}, 23},
                                            {{"s2", "te"}, 100}});
  SplitAssignment s = SplitDataset(utts, 9);
  std::vector<int> expect(static_cast<int>(utts.size()));
  std::iota(expect.begin(), expect.end(), 0);
  CHECK(SortedUnion(s) == expect);

  // Count per-stratum membership.
  std::map<std::pair<std::string, std::string>, std::array<int, 3>> counts;
  auto tally = [&](const std::vector<int>& rows, int slot) {
    for (int r : rows) {
      auto key = std::make_pair(utts[r].speaker, utts[r].lang);
      counts[key][slot]++;
    }
  };
  tally(s.train, 0);
  tally(s.val, 1);
  tally(s.test, 2);
  for (const auto& [key, c] : counts) {
    int n = c[0] + c[1] + c[2];
    long expect_val = std::llround(0.1 * n);
    CHECK(std::abs(c[1] - expect_val) <= 1);
    CHECK(std::abs(c[2] - expect_val) <= 1);
    CHECK(c[0] >= c[1] + c[2]);  // train dominates
  }
}

TEST_CASE("strata below ten utterances are rejected") {
  std::vector<Utterance> utts =
      MakeStrata({{{"s1", "en"}, 9}, {{"s2", "en"}, 50}});
  CHECK(ThrownCode([&] { SplitDataset(utts, 0); }) ==
        ErrorCode::kStratumTooSmall);
  CHECK(ThrownCode([&] { SplitDataset({}, 0); }) == ErrorCode::kEmptyCorpus);
}

TEST_CASE("split serialization round-trips") {
  std::vector<Utterance> utts = MakeStrata({{{"s1", "en"}, 30}});
  SplitAssignment s = SplitDataset(utts, 5);
  std::string json = SplitToJson(s);
  SplitAssignment back = SplitFromJson(json);
  CHECK(back.train == s.train);
  CHECK(back.val == s.val);
  CHECK(back.test == s.test);

  fs::path path = TempDir() / "split.json";
  SaveSplit(path.string(), s);
  SplitAssignment loaded = LoadSplit(path.string());
  CHECK(loaded.train == s.train);
  CHECK(ThrownCode([] { LoadSplit("/nonexistent/split.json"); }) ==
        ErrorCode::kMissingFile);
  CHECK(ThrownCode([] { SplitFromJson("[1,2,3]"); }) ==
        ErrorCode::kInvalidArgument);
}

TEST_CASE("toy corpus writes a loadable, audible dataset") {
  fs::path dir = TempDir() / "toy_small";
  fs::remove_all(dir);
  ToyCorpusSpec spec;
  spec.speakers = 2;
  spec.langs = 2;
  spec.per_combo = 2;
  spec.seed = 42;
  std::string manifest_path = MakeToyCorpus(dir.string(), spec);
  std::vector<Utterance> utts = LoadManifest(manifest_path);
  CHECK(utts.size() == 2 * 2 * 2);

  std::set<std::string> speakers, langs;
  for (const Utterance& u : utts) {
    speakers.insert(u.speaker);
    langs.insert(u.lang);
    REQUIRE(u.emotion.has_value());
    EmotionId(*u.emotion);  // label must be valid
    Waveform w = ReadWav(ResolveAudioPath(manifest_path, u.audio));
    CHECK(w.sample_rate == kCanonicalSampleRate);
    CHECK(w.DurationSeconds() >= 1.0);
    double peak = 0.0;
    for (double v : w.samples) peak = std::max(peak, std::abs(v));
    CHECK(peak > 0.05);  // actually contains signal
    CHECK(peak <= 1.0);
    CHECK(u.text.size() >= 25);
  }
  CHECK(speakers.size() == 2);
  CHECK(langs == std::set<std::string>{"en", "hi"});
}

TEST_CASE("toy corpus is reproducible from the seed") {
  ToyCorpusSpec spec;
  spec.speakers = 1;
  spec.langs = 1;
  spec.per_combo = 2;
  spec.seed = 11;

  fs::path dir_a = TempDir() / "toy_a";
  fs::path dir_b = TempDir() / "toy_b";
  fs::path dir_c = TempDir() / "toy_c";
  fs::remove_all(dir_a);
  fs::remove_all(dir_b);
  fs::remove_all(dir_c);
  std::string ma = MakeToyCorpus(dir_a.string(), spec);
  std::string mb = MakeToyCorpus(dir_b.string(), spec);
  spec.seed = 12;
  std::string mc = MakeToyCorpus(dir_c.string(), spec);

  std::vector<Utterance> ua = LoadManifest(ma);
  std::vector<Utterance> ub = LoadManifest(mb);
  std::vector<Utterance> uc = LoadManifest(mc);
  REQUIRE(ua.size() == ub.size());
  REQUIRE(ua.size() == uc.size());
  bool any_differs = false;
  for (size_t i = 0; i < ua.size(); ++i) {
    CHECK(ua[i].audio == ub[i].audio);
    CHECK(SlurpFile(ResolveAudioPath(ma, ua[i].audio)) ==
          SlurpFile(ResolveAudioPath(mb, ub[i].audio)));
    if (SlurpFile(ResolveAudioPath(ma, ua[i].audio)) !=
        SlurpFile(ResolveAudioPath(mc, uc[i].audio))) {
      any_differs = true;
    }
  }
  CHECK(any_differs);
}

TEST_CASE("toy corpus covers all four languages and speakers") {
  fs::path dir = TempDir() / "toy_full";
  fs::remove_all(dir);
  ToyCorpusSpec spec;  // defaults: 4 speakers x 4 langs x 2
  std::string manifest_path = MakeToyCorpus(dir.string(), spec);
  std::vector<Utterance> utts = LoadManifest(manifest_path);
  CHECK(utts.size() == 4 * 4 * 2);
  std::set<std::string> langs, speakers, emotions;
  for (const Utterance& u : utts) {
    langs.insert(u.lang);
    speakers.insert(u.speaker);
    if (u.emotion) emotions.insert(*u.emotion);
  }
  CHECK(langs == std::set<std::string>{"en", "hi", "te", "mr"});
  CHECK(speakers.size() == 4);
  CHECK(emotions.size() >= 4);  // cycling covers most of the label set

  // The full corpus splits cleanly after bumping per-combo counts; with only
  // 2 per stratum a split must refuse.
  CHECK(ThrownCode([&] { SplitDataset(utts, 0); }) ==
        ErrorCode::kStratumTooSmall);
}

TEST_CASE("toy corpus rejects out-of-range shapes") {
  ToyCorpusSpec spec;
  spec.speakers = 5;
  CHECK(ThrownCode([&] { MakeToyCorpus((TempDir() / "x").string(), spec); }) ==
        ErrorCode::kInvalidArgument);
  spec.speakers = 0;
  CHECK(ThrownCode([&] { MakeToyCorpus((TempDir() / "x").string(), spec); }) ==
        ErrorCode::kInvalidArgument);
  spec.speakers = 1;
  spec.langs = 9;
  CHECK(ThrownCode([&] { MakeToyCorpus((TempDir() / "x").string(), spec); }) ==
        ErrorCode::kInvalidArgument);
}

}  // namespace xltts
