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

#include "data/toy_corpus.h"

#include <cmath>
#include <filesystem>
#include <vector>

#include "audio/wav.h"
#include "core/rng.h"
#include "data/manifest.h"
#include "text/normalize.h"
#include "text/vocab.h"
#include "util/error.h"

namespace xltts {

namespace {

constexpr double kSpeakerPitchHz[4] = {120.0, 170.0, 220.0, 280.0};
constexpr double kCharSeconds = 0.070;

struct EmotionVoice {
  double rate;    // character duration multiplier
  double tremor_hz;
  double tremor_depth;
  double pitch;   // pitch multiplier
};

// Indexed like kEmotionLabels: Neutral, Angry, Happy, Sad, Fear, Surprise.
constexpr EmotionVoice kEmotionVoices[kNumEmotions] = {
    {1.00, 0.0, 0.00, 1.00}, {0.90, 8.0, 0.40, 1.10},
    {0.75, 5.0, 0.25, 1.15}, {1.30, 2.0, 0.30, 0.85},
    {0.85, 12.0, 0.35, 1.20}, {0.80, 6.0, 0.20, 1.25}};

const std::vector<std::string>& SentencesFor(const std::string& lang) {
  static const std::vector<std::string> kEn = {
      "the quick brown fox jumps over a lazy dog",
      "speech synthesis turns plain text into sound",
      "a calm voice carries across the great hall",
      "many small rivers flow into the silver sea",
      "bright paper lanterns drift over the water",
  };
  static const std::vector<std::string> kHi = {
      "नमस्ते दुनिया यह एक परीक्षण वाक्य है",
      "आज का मौसम बहुत ही सुहावना लगता है",
      "पानी में चाँद का प्रतिबिंब चमकता रहता है",
      "हर सुबह सूरज एक नई आशा लेकर आता है",
  };
  static const std::vector<std::string> kTe = {
      "నమస్కారం ఇది ఒక చిన్న పరీక్ష వాక్యం",
      "ఈ రోజు వాతావరణం చాలా బాగుంది కదా",
      "చెరువులో చంద్రుడు ప్రతిఫలిస్తూ ఉన్నాడు",
      "ప్రతి ఉదయం సూర్యుడు కొత్త ఆశ తెస్తాడు",
  };
  static const std::vector<std::string> kMr = {
      "नमस्कार हे एक छोटे चाचणी वाक्य आहे",
      "आज हवामान खूपच छान आणि प्रसन्न आहे",
      "तळ्याच्या पाण्यात चंद्राचे प्रतिबिंब चमकते",
      "रोज सकाळी सूर्य एक नवी आशा आणतो",
  };
  if (lang == "en") return kEn;
  if (lang == "hi") return kHi;
  if (lang == "te") return kTe;
  return kMr;
}

// Deterministic small pitch offset per character, under a semitone, so
// different texts sound different without masking speaker identity.
double CharPitchFactor(uint32_t cp) {
  uint32_t h = cp * 2654435761u;
  int off = static_cast<int>((h >> 16) % 7) - 3;
  return std::pow(2.0, off / 36.0);
}

Waveform RenderUtterance(const std::string& text, int speaker_idx,
                         int emotion_idx, Rng* rng) {
  const EmotionVoice& voice = kEmotionVoices[emotion_idx];
  double base_hz = kSpeakerPitchHz[speaker_idx] * voice.pitch;
  int sr = kCanonicalSampleRate;
  double amp = 0.22 + 0.05 * rng->Uniform();

  Waveform w;
  w.sample_rate = sr;
  std::vector<uint32_t> cps = Utf8Decode(NormalizeText(text));
  for (uint32_t cp : cps) {
    if (cp == 0x20) {
      size_t gap = static_cast<size_t>(0.5 * kCharSeconds * voice.rate * sr);
      w.samples.insert(w.samples.end(), gap, 0.0);
      continue;
    }
    double hz = base_hz * CharPitchFactor(cp);
    size_t len = static_cast<size_t>(kCharSeconds * voice.rate * sr);
    size_t ramp = static_cast<size_t>(0.005 * sr);
    size_t start = w.samples.size();
    for (size_t i = 0; i < len; ++i) {
      double t = static_cast<double>(i) / sr;
      double t_global = static_cast<double>(start + i) / sr;
      double s = std::sin(2.0 * M_PI * hz * t) +
                 0.5 * std::sin(2.0 * M_PI * 2.0 * hz * t) +
                 0.25 * std::sin(2.0 * M_PI * 3.0 * hz * t);
      double env = 1.0;
      if (i < ramp) env = static_cast<double>(i) / ramp;
      if (len - i <= ramp) {
        env = std::min(env, static_cast<double>(len - i) / ramp);
      }
      double tremor =
          1.0 - 0.5 * voice.tremor_depth +
          0.5 * voice.tremor_depth *
              std::sin(2.0 * M_PI * voice.tremor_hz * t_global);
      double v = amp * env * tremor * s / 1.75 + 0.002 * rng->Normal();
      w.samples.push_back(std::clamp(v, -1.0, 1.0));
    }
  }
  return w;
}

}  // namespace

std::string MakeToyCorpus(const std::string& dir, const ToyCorpusSpec& spec) {
  if (spec.speakers < 1 || spec.speakers > 4 || spec.langs < 1 ||
      spec.langs > 4 || spec.per_combo < 1) {
    throw Error(ErrorCode::kInvalidArgument, "bad toy corpus shape");
  }
  std::filesystem::create_directories(dir);
  Rng rng(spec.seed);

  std::vector<Utterance> utts;
  int emotion_cursor = 0;
  for (int s = 0; s < spec.speakers; ++s) {
    for (int l = 0; l < spec.langs; ++l) {
      const std::string lang = kLanguageCodes[l];
      const std::vector<std::string>& sentences = SentencesFor(lang);
      for (int k = 0; k < spec.per_combo; ++k) {
        Utterance u;
        u.text = sentences[static_cast<size_t>(k) % sentences.size()];
        u.lang = lang;
        u.speaker = "s" + std::to_string(s + 1);
        int emotion_idx = 0;
        if (spec.with_emotions) {
          emotion_idx = emotion_cursor++ % kNumEmotions;
          u.emotion = kEmotionLabels[emotion_idx];
        }
        char name[64];
        std::snprintf(name, sizeof(name), "%s_%s_%03d.wav",
                      u.speaker.c_str(), lang.c_str(), k);
        u.audio = name;

        Waveform w = RenderUtterance(u.text, s, emotion_idx, &rng);
        WriteWav((std::filesystem::path(dir) / name).string(), w);
        utts.push_back(std::move(u));
      }
    }
  }
  std::string manifest_path =
      (std::filesystem::path(dir) / "manifest.jsonl").string();
  SaveManifest(manifest_path, utts);
  return manifest_path;
}

}  // namespace xltts
