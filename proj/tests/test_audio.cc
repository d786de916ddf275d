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

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "audio/loudness.h"
#include "audio/pitch.h"
#include "audio/stft.h"
#include "audio/vad.h"
#include "audio/wav.h"
#include "core/checkpoint.h"
#include "core/rng.h"
#include "util/error.h"

namespace xltts {
namespace {

namespace fs = std::filesystem;

fs::path TempDir() {
  fs::path dir = fs::temp_directory_path() / "xltts_audio_test";
  fs::create_directories(dir);
  return dir;
}

Waveform Sine(double hz, double seconds, double amp,
              int sr = kCanonicalSampleRate) {
  Waveform w;
  w.sample_rate = sr;
  size_t n = static_cast<size_t>(seconds * sr);
  w.samples.resize(n);
  for (size_t i = 0; i < n; ++i) {
    w.samples[i] = amp * std::sin(2.0 * M_PI * hz * i / sr);
  }
  return w;
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

void AppendU16(std::string* s, uint16_t v) {
  s->push_back(static_cast<char>(v & 0xff));
  s->push_back(static_cast<char>((v >> 8) & 0xff));
}

void AppendU32(std::string* s, uint32_t v) {
  for (int i = 0; i < 4; ++i) {
    s->push_back(static_cast<char>((v >> (8 * i)) & 0xff));
  }
}

// Hand-built RIFF container so the reader is tested against raw bytes,
// not against our own writer.
std::string WavHeader(uint16_t format, uint16_t channels, uint32_t rate,
                      uint16_t bits, uint32_t data_bytes) {
  std::string s;
  s += "RIFF";
  AppendU32(&s, 36 + data_bytes);
  s += "WAVEfmt ";
  AppendU32(&s, 16);
  AppendU16(&s, format);
  AppendU16(&s, channels);
  AppendU32(&s, rate);
  uint32_t block = channels * bits / 8;
  AppendU32(&s, rate * block);
  AppendU16(&s, static_cast<uint16_t>(block));
  AppendU16(&s, bits);
  s += "data";
  AppendU32(&s, data_bytes);
  return s;
}

std::string SlurpFile(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  return std::string(std::istreambuf_iterator<char>(in),
                     std::istreambuf_iterator<char>());
}

void DumpFile(const fs::path& p, const std::string& bytes) {
  std::ofstream out(p, std::ios::binary);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  REQUIRE(out.good());
}

}  // namespace

TEST_CASE("wav pcm16 write/read round trip") {
  fs::path p = TempDir() / "rt16.wav";
  Waveform w = Sine(440.0, 0.25, 0.8);
  WriteWav(p.string(), w);
  Waveform r = ReadWav(p.string());
  REQUIRE(r.sample_rate == w.sample_rate);
  REQUIRE(r.samples.size() == w.samples.size());
  double max_err = 0.0;
  for (size_t i = 0; i < r.samples.size(); ++i) {
    max_err = std::max(max_err, std::fabs(r.samples[i] - w.samples[i]));
  }
  CHECK(max_err <= 0.5 / 32768.0 + 1e-9);
}

TEST_CASE("wav stereo channels are averaged") {
  fs::path p = TempDir() / "stereo.wav";
  // Two frames of stereo PCM16: (0.25, 0.75) -> 0.5, (0.5, -0.5) -> 0.
  std::string bytes = WavHeader(1, 2, 22050, 16, 8);
  AppendU16(&bytes, 8192);    // 0.25
  AppendU16(&bytes, 24576);   // 0.75
  AppendU16(&bytes, 16384);   // 0.5
  AppendU16(&bytes, static_cast<uint16_t>(-16384));  // -0.5
  DumpFile(p, bytes);
  Waveform r = ReadWav(p.string());
  REQUIRE(r.samples.size() == 2);
  CHECK(r.samples[0] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(r.samples[1] == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("wav pcm24 and float32 decoding") {
  fs::path p24 = TempDir() / "p24.wav";
  std::string b24 = WavHeader(1, 1, 22050, 24, 6);
  // 0x400000 = 0.5, 0xC00000 (sign-extended) = -0.5.
  b24 += '\x00'; b24 += '\x00'; b24 += '\x40';
  b24 += '\x00'; b24 += '\x00'; b24 += '\xC0';
  DumpFile(p24, b24);
  Waveform r24 = ReadWav(p24.string());
  REQUIRE(r24.samples.size() == 2);
  CHECK(r24.samples[0] == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(r24.samples[1] == doctest::Approx(-0.5).epsilon(1e-9));

  fs::path pf = TempDir() / "f32.wav";
  std::string bf = WavHeader(3, 1, 22050, 32, 8);
  float vals[2] = {0.5f, -0.25f};
  bf.append(reinterpret_cast<const char*>(vals), 8);
  DumpFile(pf, bf);
  Waveform rf = ReadWav(pf.string());
  REQUIRE(rf.samples.size() == 2);
  CHECK(rf.samples[0] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(rf.samples[1] == doctest::Approx(-0.25).epsilon(1e-12));
}

TEST_CASE("wav tolerates short final data chunk") {
  fs::path p = TempDir() / "short.wav";
  std::string bytes = WavHeader(1, 1, 22050, 16, 1000);  // declares 500 samples
  AppendU16(&bytes, 8192);
  AppendU16(&bytes, 8192);
  DumpFile(p, bytes);
  Waveform r = ReadWav(p.string());
  CHECK(r.samples.size() == 2);
}

TEST_CASE("wav error cases") {
  CHECK(ThrownCode([] { ReadWav("/no/such/file.wav"); }) ==
        ErrorCode::kMissingFile);
  fs::path p = TempDir() / "empty.wav";
  DumpFile(p, WavHeader(1, 1, 22050, 16, 0));
  CHECK(ThrownCode([&] { ReadWav(p.string()); }) == ErrorCode::kEmptyWaveform);
  fs::path junk = TempDir() / "junk.wav";
  DumpFile(junk, "not a riff file at all, just text");
  CHECK(ThrownCode([&] { ReadWav(junk.string()); }) == ErrorCode::kIoError);
}

TEST_CASE("resample preserves dc exactly away from the edges") {
  Waveform w;
  w.sample_rate = 44100;
  w.samples.assign(4410, 0.5);
  Waveform r = Resample(w, 22050);
  REQUIRE(r.sample_rate == 22050);
  REQUIRE(r.samples.size() == 2205);
  for (size_t i = 60; i + 60 < r.samples.size(); ++i) {
    CHECK(std::fabs(r.samples[i] - 0.5) <= 1e-15);
  }

  Waveform u;
  u.sample_rate = 8000;
  u.samples.assign(800, 0.25);
  Waveform ru = Resample(u, 22050);
  for (size_t i = 100; i + 100 < ru.samples.size(); ++i) {
    CHECK(std::fabs(ru.samples[i] - 0.25) <= 1e-15);
  }
}

TEST_CASE("resample tracks a sine analytically") {
  Waveform w = Sine(440.0, 0.5, 0.6, 44100);
  Waveform r = Resample(w, 22050);
  double max_err = 0.0;
  for (size_t i = 120; i + 120 < r.samples.size(); ++i) {
    double expect = 0.6 * std::sin(2.0 * M_PI * 440.0 * i / 22050.0);
    max_err = std::max(max_err, std::fabs(r.samples[i] - expect));
  }
  CHECK(max_err < 2e-3);
}

TEST_CASE("resample identity and canonical load") {
  Waveform w = Sine(100.0, 0.1, 0.3);
  Waveform same = Resample(w, w.sample_rate);
  CHECK(same.samples == w.samples);

  fs::path p = TempDir() / "hi_rate.wav";
  WriteWav(p.string(), Sine(440.0, 0.2, 0.5, 44100));
  Waveform c = ReadWavCanonical(p.string());
  CHECK(c.sample_rate == kCanonicalSampleRate);
  CHECK(c.samples.size() == 4410);
}

TEST_CASE("vad frame classification uses energy and zero crossings") {
  int sr = kCanonicalSampleRate;
  size_t frame = static_cast<size_t>(sr / 100);
  Waveform w;
  w.sample_rate = sr;
  // 10 silent frames, 5 loud frames, 3 silent frames (frame-aligned).
  w.samples.assign(10 * frame, 0.0);
  Waveform tone = Sine(220.0, 0.0501, 0.3);  // >= 5 frames worth
  w.samples.insert(w.samples.end(), tone.samples.begin(),
                   tone.samples.begin() + 5 * frame);
  w.samples.insert(w.samples.end(), 3 * frame, 0.0);
  std::vector<bool> speech = DetectSpeechFrames(w, 2);
  REQUIRE(speech.size() == 18);
  for (size_t f = 0; f < 18; ++f) {
    CHECK(speech[f] == (f >= 10 && f < 15));
  }

  // Mid-energy but sign-alternating (noise-like): rejected by the
  // zero-crossing gate at level 2.
  Waveform buzz;
  buzz.sample_rate = sr;
  buzz.samples.resize(4 * frame);
  for (size_t i = 0; i < buzz.samples.size(); ++i) {
    buzz.samples[i] = (i % 2 == 0) ? 0.012 : -0.012;
  }
  std::vector<bool> b = DetectSpeechFrames(buzz, 2);
  for (bool v : b) CHECK_FALSE(v);

  // Same energy as a low-frequency tone passes (frame-aligned length so no
  // quiet partial tail frame).
  Waveform soft;
  soft.sample_rate = sr;
  soft.samples.resize(4 * frame);
  for (size_t i = 0; i < soft.samples.size(); ++i) {
    soft.samples[i] = 0.017 * std::sin(2.0 * M_PI * 100.0 * i / sr);
  }
  std::vector<bool> s = DetectSpeechFrames(soft, 2);
  for (bool v : s) CHECK(v);
}

TEST_CASE("trim keeps the voiced span within one frame") {
  int sr = kCanonicalSampleRate;
  Waveform w;
  w.sample_rate = sr;
  w.samples.assign(static_cast<size_t>(0.5 * sr), 0.0);
  Waveform tone = Sine(220.0, 1.0, 0.3);
  w.samples.insert(w.samples.end(), tone.samples.begin(), tone.samples.end());
  w.samples.insert(w.samples.end(), static_cast<size_t>(0.5 * sr), 0.0);

  Waveform t = TrimSilence(w, 2);
  double frame_seconds = 0.01;
  CHECK(std::fabs(t.DurationSeconds() - 1.0) <= frame_seconds + 1e-9);

  // Idempotence: a second pass is a no-op.
  Waveform t2 = TrimSilence(t, 2);
  CHECK(t2.samples == t.samples);
}

TEST_CASE("trim leaves continuous speech untouched") {
  Waveform w = Sine(220.0, 1.0, 0.3);
  Waveform t = TrimSilence(w, 2);
  CHECK(t.samples == w.samples);
}

TEST_CASE("trim compresses long internal silences to 300 ms") {
  int sr = kCanonicalSampleRate;
  size_t frame = static_cast<size_t>(sr / 100);
  Waveform tone = Sine(220.0, 1.0, 0.3);
  Waveform w;
  w.sample_rate = sr;
  // 50 speech frames + 60 silent frames + 50 speech frames, frame-aligned.
  w.samples.assign(tone.samples.begin(), tone.samples.begin() + 50 * frame);
  w.samples.insert(w.samples.end(), 60 * frame, 0.0);
  w.samples.insert(w.samples.end(), tone.samples.begin(),
                   tone.samples.begin() + 50 * frame);

  Waveform t = TrimSilence(w, 2);
  CHECK(t.samples.size() == (50 + 30 + 50) * frame);
  // Leading speech comes through verbatim.
  for (size_t i = 0; i < 50 * frame; ++i) {
    REQUIRE(t.samples[i] == w.samples[i]);
  }
  // Second pass: the kept 300 ms gap is exactly at the cap, nothing changes.
  Waveform t2 = TrimSilence(t, 2);
  CHECK(t2.samples == t.samples);
}

TEST_CASE("trim rejects silence and bad levels") {
  Waveform z;
  z.sample_rate = kCanonicalSampleRate;
  z.samples.assign(22050, 0.0);
  CHECK(ThrownCode([&] { TrimSilence(z, 2); }) == ErrorCode::kAllSilence);
  Waveform w = Sine(220.0, 0.5, 0.3);
  CHECK(ThrownCode([&] { TrimSilence(w, 4); }) == ErrorCode::kInvalidArgument);
  CHECK(ThrownCode([&] { TrimSilence(w, -1); }) == ErrorCode::kInvalidArgument);
}

TEST_CASE("k-weighting filter response matches the reference design") {
  auto filters = KWeightingFilters(22050.0);
  auto db = [](double mag) { return 20.0 * std::log10(mag); };
  // Reference magnitudes from an independent filter-design implementation.
  CHECK(db(filters[0].MagnitudeAt(1000.0, 22050.0)) ==
        doctest::Approx(0.43509829242838705).epsilon(1e-9));
  CHECK(db(filters[0].MagnitudeAt(10000.0, 22050.0)) ==
        doctest::Approx(3.999837952481917).epsilon(1e-9));
  CHECK(db(filters[1].MagnitudeAt(1000.0, 22050.0)) ==
        doctest::Approx(-0.012420248422758583).epsilon(1e-7));
  CHECK(db(filters[1].MagnitudeAt(50.0, 22050.0)) ==
        doctest::Approx(-3.9772960254006726).epsilon(1e-9));

  // Time-domain steady-state gain agrees with the frequency response.
  Waveform tone = Sine(1000.0, 1.0, 0.5);
  std::vector<double> filtered = filters[0].Filter(tone.samples);
  double in_sq = 0.0, out_sq = 0.0;
  for (size_t i = 2000; i < tone.samples.size(); ++i) {
    in_sq += tone.samples[i] * tone.samples[i];
    out_sq += filtered[i] * filtered[i];
  }
  double gain = std::sqrt(out_sq / in_sq);
  CHECK(gain == doctest::Approx(filters[0].MagnitudeAt(1000.0, 22050.0))
                    .epsilon(5e-3));
}

TEST_CASE("integrated loudness anchors") {
  // Full-scale 1 kHz sine: value frozen from an independent meter.
  Waveform full = Sine(1000.0, 3.0, 1.0);
  CHECK(MeasureLoudnessLufs(full) ==
        doctest::Approx(-3.27862980312804).epsilon(1e-7));

  // Amplitude solved by the independent meter to read -30 LUFS.
  Waveform quiet = Sine(1000.0, 3.0, 0.04612448075704545);
  CHECK(MeasureLoudnessLufs(quiet) == doctest::Approx(-30.0).epsilon(1e-4));
}

TEST_CASE("loudness normalization hits the target") {
  Waveform quiet = Sine(1000.0, 3.0, 0.04612448075704545);  // -30 LUFS
  Waveform out = NormalizeLoudness(quiet, -23.0);
  double measured = MeasureLoudnessLufs(out);
  CHECK(std::fabs(measured - (-23.0)) < 0.01);  // spec allows 0.5 LU

  // Already at target: applied gain is unity to within measurement noise.
  Waveform again = NormalizeLoudness(out, -23.0);
  double max_dev = 0.0;
  for (size_t i = 0; i < out.samples.size(); ++i) {
    max_dev = std::max(max_dev, std::fabs(again.samples[i] - out.samples[i]));
  }
  CHECK(max_dev < 1e-6);
}

TEST_CASE("loudness normalization reports clipping") {
  // Quiet sine with one large spike: the gain to -23 LUFS pushes the spike
  // past full scale.
  Waveform w = Sine(1000.0, 3.0, 0.04612448075704545);
  w.samples[22050] = 0.5;
  int clips = -1;
  Waveform out = NormalizeLoudness(w, -23.0, &clips);
  CHECK(clips == 1);
  double peak = 0.0;
  for (double v : out.samples) peak = std::max(peak, std::fabs(v));
  CHECK(peak <= 1.0);
}

TEST_CASE("loudness error cases") {
  Waveform tiny = Sine(1000.0, 0.005, 0.5);
  CHECK(ThrownCode([&] { MeasureLoudnessLufs(tiny); }) ==
        ErrorCode::kImmeasurableLoudness);
  Waveform zeros;
  zeros.sample_rate = kCanonicalSampleRate;
  zeros.samples.assign(22050, 0.0);
  CHECK(ThrownCode([&] { MeasureLoudnessLufs(zeros); }) ==
        ErrorCode::kImmeasurableLoudness);
  Waveform w = Sine(1000.0, 3.0, 0.1);
  CHECK(ThrownCode([&] { NormalizeLoudness(w, -5.0); }) ==
        ErrorCode::kInvalidArgument);
  CHECK(ThrownCode([&] { NormalizeLoudness(w, -45.0); }) ==
        ErrorCode::kInvalidArgument);
}

TEST_CASE("spectrogram frame count and shapes") {
  Waveform w = Sine(440.0, 1.0, 0.5);
  REQUIRE(w.samples.size() == 22050);
  Spectrogram s = LinearSpectrogram(w);
  CHECK(s.frames() == 87);  // 1 + 22050/256
  CHECK(s.bins() == 513);
  CHECK(s.kind == Spectrogram::Kind::kLinear);
  CHECK(NumFrames(22050, StftConfig{}) == 87);
  CHECK(NumFrames(1, StftConfig{}) == 1);

  Spectrogram m = MelSpectrogram(w);
  CHECK(m.bins() == 80);
  CHECK(m.frames() == 87);
  CHECK(m.magnitudes.minCoeff() >= 0.0);

  Waveform empty;
  CHECK(ThrownCode([&] { LinearSpectrogram(empty); }) ==
        ErrorCode::kEmptyWaveform);
}

TEST_CASE("all-zero waveform maps to exactly zero magnitudes") {
  Waveform z;
  z.sample_rate = kCanonicalSampleRate;
  z.samples.assign(8000, 0.0);
  Spectrogram s = LinearSpectrogram(z);
  CHECK(s.magnitudes.maxCoeff() == 0.0);
  CHECK(s.magnitudes.minCoeff() == 0.0);
}

TEST_CASE("440 Hz sine peaks at the analytically derived bin") {
  Waveform w = Sine(440.0, 1.0, 0.8);
  Spectrogram s = LinearSpectrogram(w);
  // round(440 * 1024 / 22050) = 20. The outermost frame on each side sees
  // the reflect-padding discontinuity and is excluded.
  for (Eigen::Index f = 1; f + 1 < s.frames(); ++f) {
    Eigen::Index argmax = 0;
    s.magnitudes.col(f).maxCoeff(&argmax);
    CHECK(argmax == 20);
  }
}

TEST_CASE("spectrogram magnitudes match an fft reference") {
  // x[n] = sin(0.01 n) + 0.3 sin(0.13 n + 1); anchors frozen from an FFT
  // implementation independent of the matrix-product transform used here.
  Waveform w;
  w.sample_rate = kCanonicalSampleRate;
  w.samples.resize(22050);
  for (size_t i = 0; i < w.samples.size(); ++i) {
    double n = static_cast<double>(i);
    w.samples[i] = std::sin(0.01 * n) + 0.3 * std::sin(0.13 * n + 1.0);
  }
  Spectrogram s = LinearSpectrogram(w);
  CHECK(s.magnitudes(0, 0) ==
        doctest::Approx(286.812329290881).epsilon(1e-9));
  CHECK(s.magnitudes(1, 3) ==
        doctest::Approx(192.355979004945).epsilon(1e-9));
  CHECK(s.magnitudes(20, 40) ==
        doctest::Approx(27.932284822165).epsilon(1e-9));
  CHECK(s.magnitudes(512, 86) ==
        doctest::Approx(0.007808812924).epsilon(1e-6));
  CHECK(s.magnitudes(100, 10) ==
        doctest::Approx(0.000159465113).epsilon(1e-4));
  CHECK(s.magnitudes.sum() ==
        doctest::Approx(61802.875223605).epsilon(1e-9));

  Spectrogram mel = MelSpectrogram(w);
  CHECK(mel.magnitudes(0, 0) ==
        doctest::Approx(194.560060375856).epsilon(1e-9));
  CHECK(mel.magnitudes(10, 40) ==
        doctest::Approx(0.074438242576).epsilon(1e-6));
  CHECK(mel.magnitudes(79, 86) ==
        doctest::Approx(0.119843354978).epsilon(1e-6));
}

TEST_CASE("appending zeros preserves the shared frame prefix") {
  Waveform w = Sine(330.0, 0.7, 0.4);
  Waveform longer = w;
  longer.samples.insert(longer.samples.end(), 4096, 0.0);
  Spectrogram a = LinearSpectrogram(w);
  Spectrogram b = LinearSpectrogram(longer);
  // Frames whose window never touches the end padding are bit-identical.
  Eigen::Index shared = a.frames() - 2;
  double max_diff = (a.magnitudes.leftCols(shared) -
                     b.magnitudes.leftCols(shared))
                        .cwiseAbs()
                        .maxCoeff();
  CHECK(max_diff == 0.0);
}

TEST_CASE("mel filterbank matches the reference construction") {
  Mat fb = MelFilterbank(StftConfig{});
  REQUIRE(fb.rows() == 80);
  REQUIRE(fb.cols() == 513);
  CHECK(fb.minCoeff() >= 0.0);
  // Frozen from an independent HTK-scale construction.
  CHECK(fb.row(0).sum() == doctest::Approx(1.055537508472).epsilon(1e-9));
  CHECK(fb.row(79).sum() == doctest::Approx(12.191871724408).epsilon(1e-9));
  CHECK(fb(0, 1) == doctest::Approx(0.973469219795).epsilon(1e-9));
  CHECK(fb.sum() == doctest::Approx(364.809771412).epsilon(1e-9));
  Eigen::Index peak_col = 0;
  fb.row(40).maxCoeff(&peak_col);
  CHECK(peak_col == 84);
  CHECK(fb.row(40).maxCoeff() ==
        doctest::Approx(0.970853519625).epsilon(1e-9));
  // Every band covers at least one bin.
  for (int m = 0; m < 80; ++m) {
    CHECK(fb.row(m).sum() > 0.0);
  }
}

TEST_CASE("differentiable log-mel equals the fast path") {
  Waveform w = Sine(440.0, 0.5, 0.5);
  const StftBasis& basis = StftBasis::Canonical();

  Mat wave_row(1, static_cast<Eigen::Index>(w.samples.size()));
  for (size_t i = 0; i < w.samples.size(); ++i) {
    wave_row(0, static_cast<Eigen::Index>(i)) = w.samples[i];
  }
  Tensor y = LogMelFromWave(Tensor::Constant(wave_row), basis);

  Spectrogram lin = LinearSpectrogram(w);
  Mat floored = lin.magnitudes.cwiseMax(1e-5);
  Mat expect = (basis.mel * floored).cwiseMax(1e-5).array().log();
  REQUIRE(y.rows() == expect.rows());
  REQUIRE(y.cols() == expect.cols());
  CHECK((y.value() - expect).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("log-mel gradients match finite differences") {
  StftConfig cfg;
  cfg.n_fft = 16;
  cfg.hop = 4;
  cfg.win = 16;
  cfg.mel_bands = 4;
  cfg.fmax = 40.0;
  cfg.sample_rate = 100;
  StftBasis basis(cfg);

  const Eigen::Index len = 20;
  Mat x0(1, len);
  for (Eigen::Index i = 0; i < len; ++i) {
    double n = static_cast<double>(i);
    x0(0, i) = 0.8 * std::sin(2.0 * M_PI * 7.0 * n / 100.0) + 0.1 +
               0.3 * std::sin(2.0 * M_PI * 15.0 * n / 100.0 + 0.5);
  }
  Rng rng(11);
  Mat proj(4, 6);
  for (Eigen::Index i = 0; i < proj.size(); ++i) {
    proj.data()[i] = rng.Normal();
  }

  auto eval = [&](const Mat& x) {
    Tensor y = LogMelFromWave(Tensor::Constant(x), basis);
    return (y.value().array() * proj.array()).sum();
  };

  Tensor wave = Tensor::Parameter(x0);
  Tensor y = LogMelFromWave(wave, basis);
  // No cell may sit on a clamp floor, or the finite differences would
  // straddle a kink.
  CHECK(y.value().minCoeff() > -9.0);
  Tensor loss = SumAll(Mul(y, Tensor::Constant(proj)));
  loss.Backward();
  Mat grad = wave.GradOrZero();

  const double eps = 1e-5;
  for (Eigen::Index i = 0; i < len; ++i) {
    Mat xp = x0, xm = x0;
    xp(0, i) += eps;
    xm(0, i) -= eps;
    double numeric = (eval(xp) - eval(xm)) / (2.0 * eps);
    double analytic = grad(0, i);
    CHECK(std::fabs(numeric - analytic) <=
          1e-5 * (1.0 + std::max(std::fabs(numeric), std::fabs(analytic))));
  }
}

TEST_CASE("pitch tracker recovers pure tone frequencies") {
  for (double hz : {80.0, 120.0, 220.0, 280.0}) {
    PitchContour c = ExtractPitch(Sine(hz, 1.0, 0.5));
    REQUIRE(!c.f0.empty());
    int voiced = 0;
    for (double v : c.f0) {
      if (v > 0.0) {
        ++voiced;
        CHECK(std::fabs(v - hz) < 1.0);
      }
    }
    CHECK(voiced == static_cast<int>(c.f0.size()));
    CHECK(std::fabs(MeanPitchHz(c) - hz) < 1.0);
  }
  // Near the top of the search range the lag grid is coarse; parabolic
  // refinement still lands within a few hertz.
  PitchContour hi = ExtractPitch(Sine(500.0, 1.0, 0.5));
  CHECK(std::fabs(MeanPitchHz(hi) - 500.0) < 5.0);
}

TEST_CASE("pitch tracker handles harmonic-rich tones") {
  Waveform w;
  w.sample_rate = kCanonicalSampleRate;
  w.samples.resize(22050);
  for (size_t i = 0; i < w.samples.size(); ++i) {
    double t = static_cast<double>(i) / w.sample_rate;
    double env = 0.8 + 0.2 * std::sin(2.0 * M_PI * 3.0 * t);
    w.samples[i] = env * (std::sin(2.0 * M_PI * 220.0 * t) +
                          0.5 * std::sin(2.0 * M_PI * 440.0 * t) +
                          0.25 * std::sin(2.0 * M_PI * 660.0 * t));
  }
  PitchContour c = ExtractPitch(w);
  CHECK(std::fabs(MeanPitchHz(c) - 220.0) < 1.0);
}

TEST_CASE("pitch tracker leaves noise and silence unvoiced") {
  Rng rng(3);
  Waveform noise;
  noise.sample_rate = kCanonicalSampleRate;
  noise.samples.resize(22050);
  for (double& v : noise.samples) v = 0.1 * rng.Normal();
  PitchContour c = ExtractPitch(noise);
  int voiced = 0;
  for (double v : c.f0) voiced += v > 0.0 ? 1 : 0;
  CHECK(voiced <= static_cast<int>(c.f0.size()) / 10);

  Waveform z;
  z.sample_rate = kCanonicalSampleRate;
  z.samples.assign(22050, 0.0);
  PitchContour zc = ExtractPitch(z);
  for (double v : zc.f0) CHECK(v == 0.0);
  CHECK(MeanPitchHz(zc) == 0.0);

  Waveform tiny = Sine(220.0, 0.02, 0.5);  // shorter than one 40 ms frame
  CHECK(ExtractPitch(tiny).f0.empty());
  Waveform empty;
  CHECK(ThrownCode([&] { ExtractPitch(empty); }) == ErrorCode::kEmptyWaveform);
}

TEST_CASE("checkpoint round trip is byte-identical") {
  fs::path dir = TempDir();
  Checkpoint ck;
  ck.meta["step"] = 1234;
  ck.meta["note"] = "round trip";
  Rng rng(5);
  Mat a(3, 4), b(1, 1);
  for (Eigen::Index i = 0; i < a.size(); ++i) a.data()[i] = rng.Normal();
  b(0, 0) = -0.125;
  ck.tensors["enc.weight"] = a;
  ck.tensors["bias"] = b;
  ck.blobs["rng_state"] = std::string("17 42\x00 99", 9);

  fs::path p1 = dir / "ck1.bin";
  fs::path p2 = dir / "ck2.bin";
  ck.Save(p1.string());
  Checkpoint loaded = Checkpoint::Load(p1.string());
  CHECK(loaded.meta == ck.meta);
  REQUIRE(loaded.tensors.size() == 2);
  CHECK(loaded.tensors.at("enc.weight") == a);
  CHECK(loaded.tensors.at("bias") == b);
  CHECK(loaded.blobs.at("rng_state") == ck.blobs.at("rng_state"));

  loaded.Save(p2.string());
  CHECK(SlurpFile(p1) == SlurpFile(p2));
}

TEST_CASE("checkpoint corruption is detected") {
  fs::path dir = TempDir();
  Checkpoint ck;
  ck.meta["step"] = 7;
  Mat a(2, 2);
  a << 1.0, 2.0, 3.0, 4.0;
  ck.tensors["w"] = a;
  fs::path p = dir / "corrupt.bin";
  ck.Save(p.string());
  std::string good = SlurpFile(p);

  CHECK(ThrownCode([&] { Checkpoint::Load((dir / "nope.bin").string()); }) ==
        ErrorCode::kMissingFile);

  std::string flipped = good;
  flipped[good.size() / 2] ^= 0x5a;
  DumpFile(p, flipped);
  CHECK(ThrownCode([&] { Checkpoint::Load(p.string()); }) ==
        ErrorCode::kCorruptCheckpoint);

  std::string truncated = good.substr(0, good.size() - 3);
  DumpFile(p, truncated);
  CHECK(ThrownCode([&] { Checkpoint::Load(p.string()); }) ==
        ErrorCode::kCorruptCheckpoint);

  std::string bad_magic = good;
  bad_magic[0] = 'Z';
  DumpFile(p, bad_magic);
  CHECK(ThrownCode([&] { Checkpoint::Load(p.string()); }) ==
        ErrorCode::kCorruptCheckpoint);

  CHECK(ThrownCode([&] {
          ck.Save("/no_such_dir_xltts/x.bin");
        }) == ErrorCode::kUnwritablePath);
}

}  // namespace xltts
