// Copyright 2026 The EchoMark Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "echomark/acoustics.hpp"

#include <algorithm>
#include <cmath>

namespace echomark {

EnergyDecayCurve edc(const Waveform& h) {
  h.validate("edc");
  const size_t n = h.size();
  EnergyDecayCurve out;
  out.sample_rate_hz = h.sample_rate_hz;
  out.values.resize(n);

  double acc = 0.0;
  for (size_t i = n; i-- > 0;) {
    acc += h.samples[i] * h.samples[i];
    out.values[i] = acc;
  }
  if (acc <= 0.0) throw InputError("edc: zero-energy input");
  const double inv = 1.0 / acc;
  for (double& v : out.values) v *= inv;
  return out;
}

double t60(const EnergyDecayCurve& curve) {
  const auto& v = curve.values;
  if (v.empty()) throw InputError("t60: empty EDC");
  const double fs = curve.sample_rate_hz;

  // First crossings of -5 and -25 dB.
  const double hi = std::pow(10.0, -5.0 / 10.0);
  const double lo = std::pow(10.0, -25.0 / 10.0);
  size_t i5 = v.size(), i25 = v.size();
  for (size_t i = 0; i < v.size(); ++i) {
    if (i5 == v.size() && v[i] <= hi) i5 = i;
    if (v[i] <= lo) {
      i25 = i;
      break;
    }
  }
  if (i25 == v.size())
    throw InputError("t60: insufficient decay (EDC never reaches -25 dB)");
  if (i5 >= i25) i5 = (i25 > 0) ? i25 - 1 : 0;

  // Least-squares line through 10*log10(EDC) on [i5, i25].
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  size_t cnt = 0;
  for (size_t i = i5; i <= i25; ++i) {
    if (v[i] <= 0.0) break;
    double x = static_cast<double>(i) / fs;
    double y = 10.0 * std::log10(v[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++cnt;
  }
  if (cnt < 2) throw InputError("t60: too few points in the fit span");
  const double denom = cnt * sxx - sx * sx;
  if (std::abs(denom) < 1e-30) throw InputError("t60: degenerate fit span");
  const double slope = (cnt * sxy - sx * sy) / denom;
  const double intercept = (sy - slope * sx) / cnt;
  if (slope >= 0.0)
    throw InputError("t60: insufficient decay (non-decreasing fit)");
  return (-60.0 - intercept) / slope;
}

DrrResult drr(const Waveform& h, double direct_half_window_ms) {
  h.validate("drr");
  const size_t n = h.size();
  size_t peak = 0;
  double best = -1.0;
  for (size_t i = 0; i < n; ++i) {
    double a = std::abs(h.samples[i]);
    if (a > best) {
      best = a;
      peak = i;
    }
  }
  if (best <= 0.0) throw InputError("drr: zero input");

  const long half =
      std::lround(direct_half_window_ms * 1e-3 * h.sample_rate_hz);
  const size_t d0 = peak >= static_cast<size_t>(half) ? peak - half : 0;
  const size_t d1 = std::min(n - 1, peak + static_cast<size_t>(half));

  double direct = 0.0, reverb = 0.0;
  for (size_t i = d0; i <= d1; ++i) direct += h.samples[i] * h.samples[i];
  for (size_t i = d1 + 1; i < n; ++i) reverb += h.samples[i] * h.samples[i];

  DrrResult out;
  if (reverb <= 0.0) {
    out.drr_db = 60.0;
    out.clamped = true;
    return out;
  }
  out.drr_db = 10.0 * std::log10(direct / reverb);
  if (out.drr_db > 60.0) {
    out.drr_db = 60.0;
    out.clamped = true;
  } else if (out.drr_db < -60.0) {
    out.drr_db = -60.0;
    out.clamped = true;
  }
  return out;
}

ComparisonStats compare(const std::vector<double>& estimates,
                        const std::vector<double>& truths) {
  if (estimates.empty() || estimates.size() != truths.size())
    throw InputError("compare: sequences must be non-empty and equal length");
  const double n = static_cast<double>(estimates.size());

  ComparisonStats out;
  double se = 0.0, se2 = 0.0;
  for (size_t i = 0; i < estimates.size(); ++i) {
    double d = estimates[i] - truths[i];
    se += d;
    se2 += d * d;
  }
  out.bias = se / n;
  out.rmse = std::sqrt(se2 / n);

  double me = 0.0, mt = 0.0;
  for (size_t i = 0; i < estimates.size(); ++i) {
    me += estimates[i];
    mt += truths[i];
  }
  me /= n;
  mt /= n;
  double cov = 0.0, ve = 0.0, vt = 0.0;
  for (size_t i = 0; i < estimates.size(); ++i) {
    double a = estimates[i] - me, b = truths[i] - mt;
    cov += a * b;
    ve += a * a;
    vt += b * b;
  }
  if (vt > 0.0 && ve > 0.0)
    out.pearson_rho = cov / std::sqrt(ve * vt);
  return out;
}

AcousticReport analyze_rir(const Waveform& h) {
  AcousticReport rep;
  rep.edc = edc(h);
  rep.t60_s = t60(rep.edc);
  DrrResult d = drr(h);
  rep.drr_db = d.drr_db;
  rep.drr_clamped = d.clamped;
  return rep;
}

}  // namespace echomark
