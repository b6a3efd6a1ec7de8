// Copyright 2026 The EchoMark Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef ECHOMARK_WAVEFORM_HPP
#define ECHOMARK_WAVEFORM_HPP

#include <cmath>
#include <cstddef>
#include <vector>

#include "echomark/common.hpp"

namespace echomark {

// Mono time-domain signal. Samples are dimensionless amplitudes, nominally
// in [-1, 1] but not clamped.
struct Waveform {
  std::vector<double> samples;
  int sample_rate_hz = kCanonicalRateHz;

  Waveform() = default;
  Waveform(std::vector<double> s, int rate)
      : samples(std::move(s)), sample_rate_hz(rate) {}

  size_t size() const { return samples.size(); }
  double duration_s() const {
    return static_cast<double>(samples.size()) / sample_rate_hz;
  }

  // Enforces the type invariants: non-empty, finite, positive rate.
  void validate(const char* what = "waveform") const {
    if (sample_rate_hz <= 0)
      throw InputError(std::string(what) + ": sample rate must be positive");
    if (samples.empty())
      throw InputError(std::string(what) + ": empty signal");
    for (double v : samples)
      if (!std::isfinite(v))
        throw InputError(std::string(what) + ": non-finite sample");
  }
};

inline double energy(const Waveform& w) {
  double e = 0.0;
  for (double v : w.samples) e += v * v;
  return e;
}

inline double power(const Waveform& w) {
  return w.samples.empty() ? 0.0 : energy(w) / static_cast<double>(w.size());
}

inline double rms(const Waveform& w) { return std::sqrt(power(w)); }

}  // namespace echomark

#endif  // ECHOMARK_WAVEFORM_HPP
