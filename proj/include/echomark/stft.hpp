// Copyright 2026 The EchoMark Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef ECHOMARK_STFT_HPP
#define ECHOMARK_STFT_HPP

#include <complex>
#include <cstddef>
#include <vector>

#include "echomark/waveform.hpp"

namespace echomark {

enum class WindowKind { kHann, kRect };

struct StftConfig {
  int window_len = 512;
  int hop_len = 128;
  int fft_len = 512;
  WindowKind window_kind = WindowKind::kHann;

  void validate() const;

  // Periodic (DFT-even) analysis window of window_len samples.
  std::vector<double> make_window() const;
};

// Complex T x F grid, row-major (frame-major). F = fft_len/2 + 1.
struct Spectrogram {
  std::vector<std::complex<double>> values;
  size_t num_frames = 0;
  size_t num_bins = 0;
  StftConfig config;
  size_t source_len = 0;

  std::complex<double>& at(size_t t, size_t f) {
    return values[t * num_bins + f];
  }
  const std::complex<double>& at(size_t t, size_t f) const {
    return values[t * num_bins + f];
  }
};

// Centered analysis: the signal is zero-padded by window_len/2 on each side
// plus a tail pad to a whole number of hops, so T = ceil(len/hop) + 1.
Spectrogram stft(const Waveform& x, const StftConfig& cfg);

// Overlap-add inverse with window-squared normalization. Requires the
// window/hop pair to satisfy the nonzero overlap-add condition.
Waveform istft(const Spectrogram& s);

// Adjoint of the analysis map for gradient backpropagation: given
// dL/d(frames) as complex values (dL/dRe + i dL/dIm), accumulates dL/dx.
// grad_x must have source_len entries and is added to, not overwritten.
void stft_adjoint(const Spectrogram& grad_frames, double* grad_x);

}  // namespace echomark

#endif  // ECHOMARK_STFT_HPP
