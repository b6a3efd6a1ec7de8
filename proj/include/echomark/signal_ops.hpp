// Copyright 2026 The EchoMark Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef ECHOMARK_SIGNAL_OPS_HPP
#define ECHOMARK_SIGNAL_OPS_HPP

#include <cstdint>
#include <vector>

#include "echomark/waveform.hpp"

namespace echomark {

enum class NoiseKind { kWhite, kPink };

// Full linear convolution, FFT-accelerated: length = |x| + |h| - 1.
// Rejects mismatched sample rates.
Waveform convolve(const Waveform& x, const Waveform& h);

// Raw-buffer variant used by hot loops; out must hold nx + nh - 1 samples.
void convolve_into(const double* x, size_t nx, const double* h, size_t nh,
                   double* out);

// Deterministic seeded noise. White: i.i.d. standard normal (unit
// variance). Pink: -3 dB/octave spectral slope, normalized to unit sample
// variance.
Waveform generate_noise(NoiseKind kind, size_t len, uint64_t seed,
                        int sample_rate_hz = kCanonicalRateHz);

// signal + g * noise with g chosen so the resulting SNR is exactly snr_db.
Waveform mix_at_snr(const Waveform& signal, const Waveform& noise,
                    double snr_db);

}  // namespace echomark

#endif  // ECHOMARK_SIGNAL_OPS_HPP
