// Copyright 2026 The EchoMark Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "echomark/stft.hpp"

#include <algorithm>
#include <cmath>

#include "echomark/fft.hpp"

namespace echomark {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

void StftConfig::validate() const {
  if (hop_len <= 0 || window_len <= 0 || fft_len <= 0)
    throw ConfigError("stft: window/hop/fft lengths must be positive");
  if (hop_len > window_len)
    throw ConfigError("stft: hop_len must not exceed window_len");
  if (window_len > fft_len)
    throw ConfigError("stft: window_len must not exceed fft_len");
}

std::vector<double> StftConfig::make_window() const {
  std::vector<double> w(window_len, 1.0);
  if (window_kind == WindowKind::kHann) {
    for (int n = 0; n < window_len; ++n)
      w[n] = 0.5 - 0.5 * std::cos(2.0 * kPi * n / window_len);
  }
  return w;
}

Spectrogram stft(const Waveform& x, const StftConfig& cfg) {
  cfg.validate();
  x.validate("stft");

  const size_t n = x.size();
  const size_t win = static_cast<size_t>(cfg.window_len);
  const size_t hop = static_cast<size_t>(cfg.hop_len);
  const size_t nfft = static_cast<size_t>(cfg.fft_len);
  const size_t pad = win / 2;
  const size_t num_frames = (n + hop - 1) / hop + 1;  // ceil(n/hop) + 1
  const size_t padded_len = (num_frames - 1) * hop + win;

  std::vector<double> padded(padded_len, 0.0);
  std::copy(x.samples.begin(), x.samples.end(), padded.begin() + pad);

  const std::vector<double> w = cfg.make_window();

  Spectrogram out;
  out.config = cfg;
  out.source_len = n;
  out.num_frames = num_frames;
  out.num_bins = nfft / 2 + 1;
  out.values.resize(num_frames * out.num_bins);

  std::vector<double> frame(nfft, 0.0);
  for (size_t t = 0; t < num_frames; ++t) {
    const double* src = padded.data() + t * hop;
    for (size_t i = 0; i < win; ++i) frame[i] = src[i] * w[i];
    std::fill(frame.begin() + win, frame.end(), 0.0);
    fft::rfft(frame.data(), nfft, &out.values[t * out.num_bins]);
  }
  return out;
}

Waveform istft(const Spectrogram& s) {
  s.config.validate();
  if (s.num_frames == 0 || s.values.size() != s.num_frames * s.num_bins)
    throw ConfigError("istft: inconsistent spectrogram shape");
  if (s.num_bins != static_cast<size_t>(s.config.fft_len) / 2 + 1)
    throw ConfigError("istft: bin count does not match fft_len");

  const size_t win = static_cast<size_t>(s.config.window_len);
  const size_t hop = static_cast<size_t>(s.config.hop_len);
  const size_t nfft = static_cast<size_t>(s.config.fft_len);
  const size_t pad = win / 2;
  const std::vector<double> w = s.config.make_window();

  // Nonzero overlap-add: the periodic window-squared sum must not vanish
  // anywhere in the interior, or frames cannot be renormalized.
  {
    std::vector<double> ola(hop, 0.0);
    for (size_t i = 0; i < win; ++i) ola[i % hop] += w[i] * w[i];
    double lo = *std::min_element(ola.begin(), ola.end());
    double hi = *std::max_element(ola.begin(), ola.end());
    if (!(lo > 1e-8 * std::max(hi, 1e-30)))
      throw ConfigError("istft: window/hop fails the overlap-add condition");
  }

  const size_t padded_len = (s.num_frames - 1) * hop + win;
  std::vector<double> num(padded_len, 0.0);
  std::vector<double> den(padded_len, 0.0);

  std::vector<double> frame(nfft);
  for (size_t t = 0; t < s.num_frames; ++t) {
    fft::irfft(&s.values[t * s.num_bins], nfft, frame.data());
    double* nu = num.data() + t * hop;
    double* de = den.data() + t * hop;
    for (size_t i = 0; i < win; ++i) {
      nu[i] += frame[i] * w[i];
      de[i] += w[i] * w[i];
    }
  }

  size_t out_len = s.source_len;
  if (out_len == 0 || pad + out_len > padded_len)
    throw ConfigError("istft: source_len inconsistent with frame count");

  Waveform out;
  out.samples.resize(out_len);
  for (size_t i = 0; i < out_len; ++i) {
    double d = den[pad + i];
    out.samples[i] = num[pad + i] / std::max(d, 1e-12);
  }
  return out;
}

void stft_adjoint(const Spectrogram& g, double* grad_x) {
  const size_t win = static_cast<size_t>(g.config.window_len);
  const size_t hop = static_cast<size_t>(g.config.hop_len);
  const size_t nfft = static_cast<size_t>(g.config.fft_len);
  const size_t pad = win / 2;
  const size_t F = g.num_bins;
  const std::vector<double> w = g.config.make_window();

  // r_t(n) = sum_f [Re(G) cos(w_f n) - Im(G) sin(w_f n)] realized through
  // one inverse FFT per frame: halve interior bins (the Hermitian extension
  // doubles them) and drop the irrelevant DC/Nyquist imaginary parts.
  std::vector<std::complex<double>> z(F);
  std::vector<double> r(nfft);
  for (size_t t = 0; t < g.num_frames; ++t) {
    const std::complex<double>* gt = &g.values[t * F];
    z[0] = gt[0].real();
    for (size_t f = 1; f + 1 < F; ++f) z[f] = 0.5 * gt[f];
    z[F - 1] = (nfft % 2 == 0) ? std::complex<double>(gt[F - 1].real(), 0.0)
                               : 0.5 * gt[F - 1];
    fft::irfft(z.data(), nfft, r.data());

    const size_t base = t * hop;  // offset into the padded signal
    for (size_t n = 0; n < win; ++n) {
      size_t s = base + n;
      if (s < pad) continue;
      size_t i = s - pad;
      if (i >= g.source_len) break;
      grad_x[i] += w[n] * r[n] * static_cast<double>(nfft);
    }
  }
}

}  // namespace echomark
