// Copyright 2026 The EchoMark Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <cstdio>
#include <fstream>

#include "echomark/fft.hpp"
#include "echomark/rng.hpp"
#include "echomark/signal_ops.hpp"
#include "echomark/stft.hpp"
#include "echomark/wav_io.hpp"

using namespace echomark;

namespace {

Waveform random_wave(size_t len, uint64_t seed, double amp = 1.0) {
  Waveform w;
  CounterRng rng(seed, 7);
  w.samples.resize(len);
  for (size_t i = 0; i < len; ++i) w.samples[i] = amp * rng.gauss_at(i);
  return w;
}

// Direct O(N^2) convolution, the independent reference for the FFT path.
std::vector<double> conv_direct(const std::vector<double>& x,
                                const std::vector<double>& h) {
  std::vector<double> out(x.size() + h.size() - 1, 0.0);
  for (size_t i = 0; i < x.size(); ++i)
    for (size_t j = 0; j < h.size(); ++j) out[i + j] += x[i] * h[j];
  return out;
}

}  // namespace

TEST_CASE("stft: zero input gives zero spectrogram") {
  Waveform x;
  x.samples.assign(3000, 0.0);
  Spectrogram s = stft(x, {512, 128, 512});
  for (const auto& v : s.values) CHECK(std::abs(v) == 0.0);
  CHECK(s.num_bins == 257);
  CHECK(s.num_frames == (3000 + 127) / 128 + 1);
}

TEST_CASE("stft: linear in the input") {
  Waveform x = random_wave(2000, 11);
  Waveform x3 = x;
  for (double& v : x3.samples) v *= 3.0;
  Spectrogram a = stft(x, {512, 128, 512});
  Spectrogram b = stft(x3, {512, 128, 512});
  for (size_t i = 0; i < a.values.size(); ++i)
    CHECK(std::abs(b.values[i] - 3.0 * a.values[i]) < 1e-9);
}

TEST_CASE("stft: bin-centered sinusoid concentrates in the Hann main lobe") {
  // Periodic Hann is a 3-bin kernel, so away from k0 +/- 1 an interior
  // frame of a bin-centered tone leaks only rounding noise.
  const int k0 = 40;
  Waveform x;
  x.samples.resize(4096);
  for (size_t n = 0; n < x.samples.size(); ++n)
    x.samples[n] = std::sin(2.0 * M_PI * k0 * n / 512.0);
  Spectrogram s = stft(x, {512, 128, 512});

  const size_t t = s.num_frames / 2;  // interior frame, fully covered
  double peak = 0.0;
  for (size_t f = 0; f < s.num_bins; ++f)
    peak = std::max(peak, std::abs(s.at(t, f)));
  REQUIRE(peak > 0.0);
  for (size_t f = 0; f < s.num_bins; ++f) {
    if (std::abs(static_cast<int>(f) - k0) <= 1) continue;
    double leak_db = 20.0 * std::log10(std::abs(s.at(t, f)) / peak + 1e-300);
    CHECK(leak_db < -60.0);
  }
}

TEST_CASE("stft/istft: round trip within 1e-6 relative") {
  Waveform x = random_wave(10000, 3);
  Spectrogram s = stft(x, {512, 128, 512});
  Waveform y = istft(s);
  REQUIRE(y.size() == x.size());
  double num = 0.0, den = 0.0;
  for (size_t i = 0; i < x.size(); ++i) {
    num += (y.samples[i] - x.samples[i]) * (y.samples[i] - x.samples[i]);
    den += x.samples[i] * x.samples[i];
  }
  CHECK(std::sqrt(num / den) < 1e-6);
}

TEST_CASE("istft: zero spectrogram gives zero waveform") {
  Waveform x = random_wave(3000, 5);
  Spectrogram s = stft(x, {512, 128, 512});
  std::fill(s.values.begin(), s.values.end(), std::complex<double>(0, 0));
  Waveform y = istft(s);
  for (double v : y.samples) CHECK(v == 0.0);
}

TEST_CASE("istft: single frame matches direct overlap-add evaluation") {
  StftConfig cfg{64, 16, 64};
  Spectrogram s;
  s.config = cfg;
  s.num_frames = 1;
  s.num_bins = 33;
  s.source_len = 16;
  s.values.resize(33);
  CounterRng rng(21, 0);
  for (auto& v : s.values)
    v = std::complex<double>(rng.next_gauss(), rng.next_gauss());

  Waveform y = istft(s);

  // Oracle: inverse FFT of the frame, windowed, normalized by the window
  // square (floored), cut at the pad offset.
  std::vector<double> frame = fft::irfft(s.values, 64);
  std::vector<double> w = cfg.make_window();
  const size_t pad = 32;
  for (size_t i = 0; i < y.size(); ++i) {
    size_t n = pad + i;
    double expect = frame[n] * w[n] / std::max(w[n] * w[n], 1e-12);
    CHECK(y.samples[i] == doctest::Approx(expect).epsilon(1e-9));
  }
}

TEST_CASE("istft: non-invertible window/hop is a configuration error") {
  Waveform x = random_wave(2000, 9);
  // Hann at hop == window has zero-sum gaps in the squared-window OLA.
  Spectrogram s = stft(x, {512, 512, 512});
  CHECK_THROWS_AS(istft(s), ConfigError);
}

TEST_CASE("stft: invalid configs are rejected") {
  Waveform x = random_wave(100, 1);
  CHECK_THROWS_AS(stft(x, {512, 0, 512}), ConfigError);
  CHECK_THROWS_AS(stft(x, {512, 600, 512}), ConfigError);
  CHECK_THROWS_AS(stft(x, {512, 128, 256}), ConfigError);
}

TEST_CASE("stft: Parseval with window compensation") {
  Waveform x = random_wave(4000, 13);
  StftConfig cfg{512, 128, 512};
  Spectrogram s = stft(x, cfg);

  // One-sided bins double except DC/Nyquist; per-frame DFT Parseval then
  // ties spectral energy to the window-weighted time energy.
  double lhs = 0.0;
  for (size_t t = 0; t < s.num_frames; ++t)
    for (size_t f = 0; f < s.num_bins; ++f) {
      double wgt = (f == 0 || f + 1 == s.num_bins) ? 1.0 : 2.0;
      lhs += wgt * std::norm(s.at(t, f));
    }
  lhs /= cfg.fft_len;

  std::vector<double> w = cfg.make_window();
  const size_t pad = 256;
  double rhs = 0.0;
  for (size_t i = 0; i < x.size(); ++i) {
    size_t pos = i + pad;
    double g = 0.0;
    for (size_t t = 0; t < s.num_frames; ++t) {
      if (pos >= t * 128 && pos - t * 128 < 512) g += w[pos - t * 128] * w[pos - t * 128];
    }
    rhs += x.samples[i] * x.samples[i] * g;
  }
  CHECK(lhs == doctest::Approx(rhs).epsilon(1e-6));
}

TEST_CASE("convolve: delta is the identity") {
  Waveform h = random_wave(300, 17);
  Waveform d;
  d.samples.assign(1, 1.0);
  Waveform out = convolve(d, h);
  REQUIRE(out.size() == h.size());
  for (size_t i = 0; i < h.size(); ++i)
    CHECK(out.samples[i] == doctest::Approx(h.samples[i]).epsilon(1e-12));
}

TEST_CASE("convolve: hand-computed example") {
  Waveform x, h;
  x.samples = {1.0, 1.0};
  h.samples = {1.0, -1.0};
  Waveform out = convolve(x, h);
  REQUIRE(out.size() == 3);
  CHECK(out.samples[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(out.samples[1] == doctest::Approx(0.0).scale(1).epsilon(1e-12));
  CHECK(out.samples[2] == doctest::Approx(-1.0).epsilon(1e-12));
}

TEST_CASE("convolve: FFT path matches the direct sum") {
  CounterRng rng(99, 0);
  for (int trial = 0; trial < 50; ++trial) {
    size_t nx = 1 + (rng.next_bits() % 512);
    size_t nh = 1 + (rng.next_bits() % 512);
    Waveform x = random_wave(nx, 1000 + trial);
    Waveform h = random_wave(nh, 2000 + trial);
    Waveform out = convolve(x, h);
    std::vector<double> ref = conv_direct(x.samples, h.samples);
    REQUIRE(out.size() == ref.size());
    for (size_t i = 0; i < ref.size(); ++i)
      CHECK(std::abs(out.samples[i] - ref[i]) < 1e-9);
  }
}

TEST_CASE("convolve: linearity") {
  Waveform x = random_wave(400, 31);
  Waveform z = random_wave(400, 32);
  Waveform h = random_wave(100, 33);
  Waveform mix;
  mix.samples.resize(400);
  for (size_t i = 0; i < 400; ++i)
    mix.samples[i] = 2.0 * x.samples[i] - 0.5 * z.samples[i];
  Waveform lhs = convolve(mix, h);
  Waveform cx = convolve(x, h);
  Waveform cz = convolve(z, h);
  for (size_t i = 0; i < lhs.size(); ++i)
    CHECK(std::abs(lhs.samples[i] -
                   (2.0 * cx.samples[i] - 0.5 * cz.samples[i])) < 1e-9);
}

TEST_CASE("convolve: commutative and rate-checked") {
  Waveform x = random_wave(128, 41);
  Waveform h = random_wave(64, 42);
  Waveform a = convolve(x, h);
  Waveform b = convolve(h, x);
  for (size_t i = 0; i < a.size(); ++i)
    CHECK(a.samples[i] == doctest::Approx(b.samples[i]).epsilon(1e-12));

  Waveform bad = h;
  bad.sample_rate_hz = 8000;
  CHECK_THROWS_AS(convolve(x, bad), InputError);
}

TEST_CASE("generate_noise: deterministic per seed, decorrelated across seeds") {
  Waveform a = generate_noise(NoiseKind::kWhite, 100000, 77);
  Waveform b = generate_noise(NoiseKind::kWhite, 100000, 77);
  CHECK(a.samples == b.samples);

  Waveform c = generate_noise(NoiseKind::kWhite, 100000, 78);
  double dot = 0.0, ea = 0.0, ec = 0.0;
  for (size_t i = 0; i < a.size(); ++i) {
    dot += a.samples[i] * c.samples[i];
    ea += a.samples[i] * a.samples[i];
    ec += c.samples[i] * c.samples[i];
  }
  CHECK(std::abs(dot / std::sqrt(ea * ec)) < 0.05);

  // Unit sample variance within 2% at this length.
  CHECK(power(a) == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("generate_noise: pink slope is -3 dB/octave") {
  const size_t len = 1 << 17;
  Waveform p = generate_noise(NoiseKind::kPink, len, 123);
  CHECK(power(p) == doctest::Approx(1.0).epsilon(1e-9));

  auto spec = fft::rfft(p.samples);
  // Mean power per octave band, 100 Hz .. 4 kHz.
  const double bin_hz = 16000.0 / static_cast<double>(len);
  std::vector<double> octave_db;
  for (double lo = 100.0; lo < 4000.0; lo *= 2.0) {
    size_t k0 = static_cast<size_t>(lo / bin_hz);
    size_t k1 = static_cast<size_t>(2.0 * lo / bin_hz);
    double acc = 0.0;
    for (size_t k = k0; k < k1; ++k) acc += std::norm(spec[k]);
    octave_db.push_back(10.0 * std::log10(acc / (k1 - k0)));
  }
  // Least-squares slope against octave index.
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (size_t i = 0; i < octave_db.size(); ++i) {
    sx += i;
    sy += octave_db[i];
    sxx += static_cast<double>(i) * i;
    sxy += i * octave_db[i];
  }
  double n = static_cast<double>(octave_db.size());
  double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  CHECK(slope == doctest::Approx(-3.0).epsilon(0.17));  // within 0.5 dB
}

TEST_CASE("mix_at_snr: exact gain law") {
  Waveform s = random_wave(50000, 51);
  Waveform n = random_wave(50000, 52);

  SUBCASE("0 dB equalizes powers") {
    Waveform y = mix_at_snr(s, n, 0.0);
    double pn = 0.0;
    for (size_t i = 0; i < y.size(); ++i) {
      double d = y.samples[i] - s.samples[i];
      pn += d * d;
    }
    pn /= y.size();
    CHECK(pn == doctest::Approx(power(s)).epsilon(1e-9));
  }

  SUBCASE("100 dB is effectively the clean signal") {
    Waveform y = mix_at_snr(s, n, 100.0);
    double acc = 0.0;
    for (size_t i = 0; i < y.size(); ++i) {
      double d = y.samples[i] - s.samples[i];
      acc += d * d;
    }
    CHECK(std::sqrt(acc / y.size()) < 1e-4);
  }

  SUBCASE("20 dB with unit-power inputs uses g = 0.1") {
    Waveform su = s, nu = n;
    double gs = 1.0 / std::sqrt(power(s)), gn = 1.0 / std::sqrt(power(n));
    for (double& v : su.samples) v *= gs;
    for (double& v : nu.samples) v *= gn;
    Waveform y = mix_at_snr(su, nu, 20.0);
    for (size_t i = 0; i < 100; ++i)
      CHECK(y.samples[i] ==
            doctest::Approx(su.samples[i] + 0.1 * nu.samples[i])
                .epsilon(1e-9));
  }

  SUBCASE("measured SNR equals requested within 1e-6 dB") {
    for (double snr : {-7.5, 3.0, 12.25}) {
      Waveform y = mix_at_snr(s, n, snr);
      double pn = 0.0;
      for (size_t i = 0; i < y.size(); ++i) {
        double d = y.samples[i] - s.samples[i];
        pn += d * d;
      }
      pn /= y.size();
      double measured = 10.0 * std::log10(power(s) / pn);
      CHECK(measured == doctest::Approx(snr).epsilon(1e-9));
    }
  }

  SUBCASE("zero-power inputs are rejected") {
    Waveform z;
    z.samples.assign(50000, 0.0);
    CHECK_THROWS_AS(mix_at_snr(z, n, 0.0), InputError);
    CHECK_THROWS_AS(mix_at_snr(s, z, 0.0), InputError);
  }
}

TEST_CASE("wav: float round trip is exact") {
  Waveform x;
  x.samples.resize(777);
  CounterRng rng(61, 0);
  for (double& v : x.samples)
    v = static_cast<double>(static_cast<float>(rng.next_gauss() * 0.3));
  const char* path = "test_float.wav";
  write_wav(path, x, WavEncoding::kFloat32);
  Waveform y = read_wav(path);
  REQUIRE(y.size() == x.size());
  CHECK(y.sample_rate_hz == 16000);
  for (size_t i = 0; i < x.size(); ++i) CHECK(y.samples[i] == x.samples[i]);
  std::remove(path);
}

TEST_CASE("wav: 16-bit round trip within one quantization step") {
  Waveform x;
  x.samples.resize(555);
  CounterRng rng(62, 0);
  for (double& v : x.samples) v = 0.9 * (2.0 * rng.next_u01() - 1.0);
  const char* path = "test_pcm.wav";
  write_wav(path, x, WavEncoding::kPcm16);
  Waveform y = read_wav(path);
  REQUIRE(y.size() == x.size());
  for (size_t i = 0; i < x.size(); ++i)
    CHECK(std::abs(y.samples[i] - x.samples[i]) < std::pow(2.0, -15.0));
  std::remove(path);
}

TEST_CASE("wav: malformed input is a format error with no partial result") {
  const char* path = "test_bad.wav";
  {
    std::ofstream f(path, std::ios::binary);
    f << "RIFF\x10\x00\x00\x00WAV";  // truncated header
  }
  CHECK_THROWS_AS(read_wav(path), FormatError);
  std::remove(path);

  // Stereo is unsupported.
  Waveform x;
  x.samples.assign(100, 0.25);
  write_wav(path, x, WavEncoding::kPcm16);
  {
    std::fstream f(path, std::ios::binary | std::ios::in | std::ios::out);
    f.seekp(22);
    char two[2] = {2, 0};
    f.write(two, 2);
  }
  CHECK_THROWS_AS(read_wav(path), FormatError);
  std::remove(path);
}
