// Copyright 2026 The EchoMark Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef ECHOMARK_RIR_MODEL_HPP
#define ECHOMARK_RIR_MODEL_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "echomark/waveform.hpp"

namespace echomark {

// M-bit message (bits are 0/1, M in [1,5]) plus the embedding key and level.
// Carried by a ParametricRir so rendering reproduces the watermarked RIR.
struct WatermarkPayload {
  std::vector<uint8_t> bits;
  uint64_t key = 0;
  double gain_db = -20.0;
};

// Free tap vector covering [0, 50 ms) at the canonical rate.
struct EarlyRir {
  std::vector<double> taps = std::vector<double>(kEarlyLenSamples, 0.0);
};

// Late reverberation: sum over (band m, decay n) of
// A[m][n] * exp(-lambda_n t) * w_m(t), with w_m octave-filtered noise.
// Decays are parameterized by logits: T60_n = tau_s * sigmoid(theta_n),
// lambda_n = 3 ln(10) / T60_n, so every decay stays below the preset
// maximum reverberation time.
struct LateParams {
  int num_bands = 6;   // octave bands, centers 125 Hz * 2^m
  int num_decays = 6;
  std::vector<double> amplitudes;    // num_bands x num_decays, row-major, >= 0
  std::vector<double> decay_logits;  // num_decays
  double tau_s = 3.0;
  uint64_t noise_seed = 0;
  double length_s = 2.0;

  double& amp(int m, int n) { return amplitudes[m * num_decays + n]; }
  double amp(int m, int n) const { return amplitudes[m * num_decays + n]; }
  size_t length_samples() const;
  void validate() const;
};

struct ParametricRir {
  EarlyRir early;
  LateParams late;
  std::optional<WatermarkPayload> payload;
};

double sigmoid(double x);
double t60_of_logit(double theta, double tau_s);
double lambda_of_logit(double theta, double tau_s);

// Octave band edges [fc/sqrt(2), fc*sqrt(2)] for band m.
void octave_band_edges(int band_index, double* f_lo, double* f_hi);

// Band-filtered unit-variance noise, deterministic in (seed, band, index).
Waveform subband_noise(int band_index, size_t len, uint64_t seed);

// All bands at once (the per-fit cache for repeated synthesis).
std::vector<std::vector<double>> make_band_noise(const LateParams& p);

// Late field alone (no 50 ms offset; render adds it).
Waveform synth_late(const LateParams& p);
void synth_late_into(const LateParams& p,
                     const std::vector<std::vector<double>>& band_noise,
                     double* out);

// Full RIR: early taps on [0, 50 ms), late field from 50 ms on. When a
// payload is present the keyed watermark carrier is added to the late field.
Waveform render(const ParametricRir& r);

// Seeded defaults: unit impulse early, uniform small amplitudes, logits
// drawn from a standard normal.
ParametricRir init_params(uint64_t seed, double tau_s = 3.0);

// Versioned JSON round-trip for portable fits and watermarked RIRs.
std::string rir_to_json(const ParametricRir& r, int indent = 2);
ParametricRir rir_from_json(const std::string& text);
void save_rir(const std::string& path, const ParametricRir& r);
ParametricRir load_rir(const std::string& path);

}  // namespace echomark

#endif  // ECHOMARK_RIR_MODEL_HPP
