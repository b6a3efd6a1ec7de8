// Copyright 2026 The EchoMark Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef ECHOMARK_ACOUSTICS_HPP
#define ECHOMARK_ACOUSTICS_HPP

#include <optional>
#include <vector>

#include "echomark/waveform.hpp"

namespace echomark {

// Normalized backward-integrated energy (Schroeder curve): values[0] = 1,
// non-increasing.
struct EnergyDecayCurve {
  std::vector<double> values;
  int sample_rate_hz = kCanonicalRateHz;
};

struct AcousticReport {
  double t60_s = 0.0;
  double drr_db = 0.0;
  bool drr_clamped = false;
  EnergyDecayCurve edc;
};

// Bias / RMSE / Pearson rho between estimates and ground truth. rho is
// absent when the truths are constant.
struct ComparisonStats {
  double bias = 0.0;
  double rmse = 0.0;
  std::optional<double> pearson_rho;
};

EnergyDecayCurve edc(const Waveform& h);

// Least-squares line over the [-5, -25] dB span of the log-EDC,
// extrapolated to the -60 dB crossing. Throws InputError ("insufficient
// decay") when the curve never reaches -25 dB.
double t60(const EnergyDecayCurve& curve);

struct DrrResult {
  double drr_db = 0.0;
  bool clamped = false;
};

// Direct window is argmax |h| +/- direct_half_window_ms; the reverberant
// region is everything after it. Clamped to +/-60 dB.
DrrResult drr(const Waveform& h, double direct_half_window_ms = 2.5);

ComparisonStats compare(const std::vector<double>& estimates,
                        const std::vector<double>& truths);

// T60 and DRR in one pass.
AcousticReport analyze_rir(const Waveform& h);

}  // namespace echomark

#endif  // ECHOMARK_ACOUSTICS_HPP
