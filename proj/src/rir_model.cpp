// Copyright 2026 The EchoMark Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "echomark/rir_model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "echomark/rng.hpp"
#include "echomark/signal_ops.hpp"
#include "echomark/watermark.hpp"

namespace echomark {

namespace {
constexpr double kPi = 3.14159265358979323846;
constexpr double kLn10x3 = 6.907755278982137;  // 3 ln(10)
constexpr int kFirTaps = 4097;
constexpr double kBaseCenterHz = 125.0;
}  // namespace

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

double t60_of_logit(double theta, double tau_s) {
  return tau_s * sigmoid(theta);
}

double lambda_of_logit(double theta, double tau_s) {
  return kLn10x3 / t60_of_logit(theta, tau_s);
}

void octave_band_edges(int band_index, double* f_lo, double* f_hi) {
  const double fc = kBaseCenterHz * std::pow(2.0, band_index);
  *f_lo = fc / std::sqrt(2.0);
  *f_hi = fc * std::sqrt(2.0);
}

size_t LateParams::length_samples() const {
  return static_cast<size_t>(std::lround(length_s * kCanonicalRateHz));
}

void LateParams::validate() const {
  if (num_bands < 1 || num_decays < 1)
    throw InputError("late params: need at least one band and one decay");
  if (amplitudes.size() != static_cast<size_t>(num_bands) * num_decays)
    throw InputError("late params: amplitude grid shape mismatch");
  if (decay_logits.size() != static_cast<size_t>(num_decays))
    throw InputError("late params: decay logit count mismatch");
  if (!(tau_s > 0.0)) throw InputError("late params: tau_s must be positive");
  if (!(length_s > 0.0))
    throw InputError("late params: length_s must be positive");
  for (double a : amplitudes)
    if (!std::isfinite(a) || a < 0.0)
      throw InputError("late params: amplitudes must be finite and >= 0");
  for (double t : decay_logits)
    if (!std::isfinite(t))
      throw InputError("late params: non-finite decay logit");
  double lo, hi;
  octave_band_edges(num_bands - 1, &lo, &hi);
  if (hi >= kCanonicalRateHz / 2.0)
    throw InputError("late params: top octave band exceeds Nyquist");
}

namespace {

// Hann-windowed ideal bandpass, unit energy so filtered unit-variance noise
// stays unit variance.
std::vector<double> bandpass_fir(double f_lo, double f_hi) {
  const int c = kFirTaps / 2;
  const double w1 = 2.0 * f_lo / kCanonicalRateHz;
  const double w2 = 2.0 * f_hi / kCanonicalRateHz;
  std::vector<double> f(kFirTaps);
  for (int k = 0; k < kFirTaps; ++k) {
    int d = k - c;
    double ideal;
    if (d == 0) {
      ideal = w2 - w1;
    } else {
      ideal = (std::sin(kPi * w2 * d) - std::sin(kPi * w1 * d)) / (kPi * d);
    }
    double win = 0.5 - 0.5 * std::cos(2.0 * kPi * k / (kFirTaps - 1));
    f[k] = ideal * win;
  }
  double e = 0.0;
  for (double v : f) e += v * v;
  const double g = 1.0 / std::sqrt(e);
  for (double& v : f) v *= g;
  return f;
}

const std::vector<double>& cached_fir(int band_index) {
  static std::vector<std::vector<double>> cache;
  static std::mutex m;
  std::lock_guard<std::mutex> lock(m);
  if (band_index >= static_cast<int>(cache.size()))
    cache.resize(band_index + 1);
  if (cache[band_index].empty()) {
    double lo, hi;
    octave_band_edges(band_index, &lo, &hi);
    cache[band_index] = bandpass_fir(lo, hi);
  }
  return cache[band_index];
}

}  // namespace

Waveform subband_noise(int band_index, size_t len, uint64_t seed) {
  if (band_index < 0) throw InputError("subband_noise: negative band index");
  if (len == 0) throw InputError("subband_noise: len must be > 0");
  const std::vector<double>& fir = cached_fir(band_index);

  CounterRng rng(seed, 0x42414e44u + static_cast<uint64_t>(band_index));
  std::vector<double> white(len + kFirTaps - 1);
  for (size_t i = 0; i < white.size(); ++i) white[i] = rng.gauss_at(i);

  std::vector<double> full(white.size() + kFirTaps - 1);
  convolve_into(white.data(), white.size(), fir.data(), kFirTaps, full.data());

  Waveform out;
  out.samples.assign(full.begin() + (kFirTaps - 1),
                     full.begin() + (kFirTaps - 1) + len);
  return out;
}

std::vector<std::vector<double>> make_band_noise(const LateParams& p) {
  p.validate();
  const size_t len = p.length_samples();
  std::vector<std::vector<double>> bands(p.num_bands);
  for (int m = 0; m < p.num_bands; ++m)
    bands[m] = std::move(subband_noise(m, len, p.noise_seed).samples);
  return bands;
}

void synth_late_into(const LateParams& p,
                     const std::vector<std::vector<double>>& band_noise,
                     double* out) {
  const size_t len = p.length_samples();
  std::fill(out, out + len, 0.0);

  std::vector<double> decay(len);
  for (int n = 0; n < p.num_decays; ++n) {
    const double lambda = lambda_of_logit(p.decay_logits[n], p.tau_s);
    for (size_t t = 0; t < len; ++t)
      decay[t] = std::exp(-lambda * static_cast<double>(t) / kCanonicalRateHz);
    for (int m = 0; m < p.num_bands; ++m) {
      const double a = p.amp(m, n);
      if (a == 0.0) continue;
      const double* w = band_noise[m].data();
      for (size_t t = 0; t < len; ++t) out[t] += a * decay[t] * w[t];
    }
  }
}

Waveform synth_late(const LateParams& p) {
  p.validate();
  Waveform out;
  out.samples.resize(p.length_samples());
  synth_late_into(p, make_band_noise(p), out.samples.data());
  return out;
}

Waveform render(const ParametricRir& r) {
  r.late.validate();
  if (r.early.taps.size() != kEarlyLenSamples)
    throw InputError("render: early taps must span exactly 50 ms");

  const size_t late_len = r.late.length_samples();
  Waveform out;
  out.samples.assign(kEarlyLenSamples + late_len, 0.0);
  std::copy(r.early.taps.begin(), r.early.taps.end(), out.samples.begin());

  std::vector<double> late(late_len);
  synth_late_into(r.late, make_band_noise(r.late), late.data());

  if (r.payload) {
    std::vector<double> carrier = watermark_carrier(late, *r.payload);
    for (size_t t = 0; t < late_len; ++t) late[t] += carrier[t];
  }
  for (size_t t = 0; t < late_len; ++t)
    out.samples[kEarlyLenSamples + t] += late[t];
  return out;
}

ParametricRir init_params(uint64_t seed, double tau_s) {
  if (!(tau_s > 0.0)) throw InputError("init_params: tau_s must be positive");
  ParametricRir r;
  r.early.taps.assign(kEarlyLenSamples, 0.0);
  r.early.taps[0] = 1.0;

  r.late.tau_s = tau_s;
  r.late.noise_seed = derive_seed(seed, 0x4e4f4953u, 0);
  r.late.amplitudes.assign(
      static_cast<size_t>(r.late.num_bands) * r.late.num_decays, 0.01);
  r.late.decay_logits.resize(r.late.num_decays);
  CounterRng rng(seed, 0x494e4954u);
  for (int n = 0; n < r.late.num_decays; ++n)
    r.late.decay_logits[n] = rng.gauss_at(n);
  return r;
}

namespace {

std::string key_to_hex(uint64_t key) {
  std::ostringstream os;
  os << std::hex;
  os.width(16);
  os.fill('0');
  os << key;
  return os.str();
}

uint64_t key_from_hex(const std::string& s) {
  if (s.size() != 16 || s.find_first_not_of("0123456789abcdefABCDEF") !=
                            std::string::npos)
    throw FormatError("key must be a 16-hex-digit string");
  return std::stoull(s, nullptr, 16);
}

}  // namespace

std::string rir_to_json(const ParametricRir& r, int indent) {
  nlohmann::json j;
  j["format"] = "echomark-rir";
  j["version"] = 1;
  j["sample_rate_hz"] = kCanonicalRateHz;
  j["early"]["taps"] = r.early.taps;
  nlohmann::json& l = j["late"];
  l["num_bands"] = r.late.num_bands;
  l["num_decays"] = r.late.num_decays;
  l["amplitudes"] = r.late.amplitudes;
  l["decay_logits"] = r.late.decay_logits;
  l["tau_s"] = r.late.tau_s;
  l["noise_seed"] = key_to_hex(r.late.noise_seed);
  l["length_s"] = r.late.length_s;
  if (r.payload) {
    std::string bits;
    for (uint8_t b : r.payload->bits) bits.push_back(b ? '1' : '0');
    j["payload"]["bits"] = bits;
    j["payload"]["key"] = key_to_hex(r.payload->key);
    j["payload"]["gain_db"] = r.payload->gain_db;
  }
  return j.dump(indent);
}

ParametricRir rir_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("rir json: parse error: ") + e.what());
  }
  try {
    if (j.at("format").get<std::string>() != "echomark-rir")
      throw FormatError("rir json: unexpected format tag");
    if (j.at("version").get<int>() != 1)
      throw FormatError("rir json: unsupported version");
    ParametricRir r;
    r.early.taps = j.at("early").at("taps").get<std::vector<double>>();
    const nlohmann::json& l = j.at("late");
    r.late.num_bands = l.at("num_bands").get<int>();
    r.late.num_decays = l.at("num_decays").get<int>();
    r.late.amplitudes = l.at("amplitudes").get<std::vector<double>>();
    r.late.decay_logits = l.at("decay_logits").get<std::vector<double>>();
    r.late.tau_s = l.at("tau_s").get<double>();
    r.late.noise_seed = key_from_hex(l.at("noise_seed").get<std::string>());
    r.late.length_s = l.at("length_s").get<double>();
    if (j.contains("payload")) {
      WatermarkPayload p;
      for (char c : j.at("payload").at("bits").get<std::string>()) {
        if (c != '0' && c != '1')
          throw FormatError("rir json: payload bits must be 0/1");
        p.bits.push_back(c == '1' ? 1 : 0);
      }
      p.key = key_from_hex(j.at("payload").at("key").get<std::string>());
      p.gain_db = j.at("payload").at("gain_db").get<double>();
      r.payload = std::move(p);
    }
    r.late.validate();
    if (r.early.taps.size() != kEarlyLenSamples)
      throw FormatError("rir json: early tap count mismatch");
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("rir json: missing/invalid field: ") +
                      e.what());
  }
}

void save_rir(const std::string& path, const ParametricRir& r) {
  std::ofstream f(path, std::ios::trunc);
  if (!f) throw FormatError("save_rir: cannot open " + path);
  f << rir_to_json(r) << "\n";
}

ParametricRir load_rir(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw FormatError("load_rir: cannot open " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return rir_from_json(ss.str());
}

}  // namespace echomark
