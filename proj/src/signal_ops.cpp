// Copyright 2026 The EchoMark Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "echomark/signal_ops.hpp"

#include <algorithm>
#include <cmath>
#include <complex>

#include "echomark/fft.hpp"
#include "echomark/rng.hpp"

namespace echomark {

void convolve_into(const double* x, size_t nx, const double* h, size_t nh,
                   double* out) {
  const size_t out_len = nx + nh - 1;
  const size_t nfft = fft::next_pow2(out_len);

  std::vector<double> buf(nfft, 0.0);
  std::copy(x, x + nx, buf.begin());
  std::vector<std::complex<double>> xf(nfft / 2 + 1);
  fft::rfft(buf.data(), nfft, xf.data());

  std::fill(buf.begin(), buf.end(), 0.0);
  std::copy(h, h + nh, buf.begin());
  std::vector<std::complex<double>> hf(nfft / 2 + 1);
  fft::rfft(buf.data(), nfft, hf.data());

  for (size_t i = 0; i < xf.size(); ++i) xf[i] *= hf[i];
  fft::irfft(xf.data(), nfft, buf.data());
  std::copy(buf.begin(), buf.begin() + out_len, out);
}

Waveform convolve(const Waveform& x, const Waveform& h) {
  x.validate("convolve: x");
  h.validate("convolve: h");
  if (x.sample_rate_hz != h.sample_rate_hz)
    throw InputError("convolve: sample rate mismatch");
  Waveform out;
  out.sample_rate_hz = x.sample_rate_hz;
  out.samples.resize(x.size() + h.size() - 1);
  convolve_into(x.samples.data(), x.size(), h.samples.data(), h.size(),
                out.samples.data());
  return out;
}

Waveform generate_noise(NoiseKind kind, size_t len, uint64_t seed,
                        int sample_rate_hz) {
  if (len == 0) throw InputError("generate_noise: len must be > 0");
  Waveform out;
  out.sample_rate_hz = sample_rate_hz;
  out.samples.resize(len);

  CounterRng rng(seed, kind == NoiseKind::kWhite ? 0x57484954u : 0x50494e4bu);
  for (size_t i = 0; i < len; ++i) out.samples[i] = rng.gauss_at(i);
  if (kind == NoiseKind::kWhite) return out;

  // Pink: shape the white spectrum by 1/sqrt(f), so power falls exactly
  // 3 dB per octave; DC is zeroed.
  const size_t nfft = fft::next_pow2(len);
  std::vector<double> buf(nfft, 0.0);
  std::copy(out.samples.begin(), out.samples.end(), buf.begin());
  std::vector<std::complex<double>> spec(nfft / 2 + 1);
  fft::rfft(buf.data(), nfft, spec.data());
  spec[0] = 0.0;
  for (size_t k = 1; k < spec.size(); ++k)
    spec[k] /= std::sqrt(static_cast<double>(k));
  fft::irfft(spec.data(), nfft, buf.data());

  out.samples.assign(buf.begin(), buf.begin() + len);
  double p = power(out);
  if (p > 0.0) {
    const double g = 1.0 / std::sqrt(p);
    for (double& v : out.samples) v *= g;
  }
  return out;
}

Waveform mix_at_snr(const Waveform& signal, const Waveform& noise,
                    double snr_db) {
  signal.validate("mix_at_snr: signal");
  noise.validate("mix_at_snr: noise");
  if (signal.sample_rate_hz != noise.sample_rate_hz)
    throw InputError("mix_at_snr: sample rate mismatch");
  if (signal.size() != noise.size())
    throw InputError("mix_at_snr: length mismatch");
  const double ps = power(signal);
  const double pn = power(noise);
  if (ps <= 0.0) throw InputError("mix_at_snr: zero-power signal");
  if (pn <= 0.0) throw InputError("mix_at_snr: zero-power noise");

  const double g = std::sqrt(ps / (pn * std::pow(10.0, snr_db / 10.0)));
  Waveform out = signal;
  for (size_t i = 0; i < out.size(); ++i) out.samples[i] += g * noise.samples[i];
  return out;
}

}  // namespace echomark
