// Copyright 2026 The EchoMark Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "echomark/acoustics.hpp"
#include "echomark/rng.hpp"

using namespace echomark;

namespace {

Waveform exp_decay(double lambda, size_t len, double amp = 1.0) {
  Waveform h;
  h.samples.resize(len);
  for (size_t n = 0; n < len; ++n)
    h.samples[n] = amp * std::exp(-lambda * static_cast<double>(n) / 16000.0);
  return h;
}

// Exact geometric-series EDC of a sampled exponential.
double edc_exact(double lambda, size_t len, size_t t) {
  const double r = std::exp(-2.0 * lambda / 16000.0);
  const double num = std::pow(r, static_cast<double>(t)) *
                     (1.0 - std::pow(r, static_cast<double>(len - t)));
  const double den = 1.0 - std::pow(r, static_cast<double>(len));
  return num / den;
}

}  // namespace

TEST_CASE("edc: single impulse") {
  Waveform h;
  h.samples.assign(10, 0.0);
  h.samples[0] = 0.7;
  EnergyDecayCurve c = edc(h);
  CHECK(c.values[0] == 1.0);
  CHECK(c.values[1] == 0.0);
}

TEST_CASE("edc: exponential matches the geometric-series oracle") {
  const double lambda = 6.9078;  // T60 = 1 s
  Waveform h = exp_decay(lambda, 48000);
  EnergyDecayCurve c = edc(h);
  for (size_t t = 0; t < c.values.size(); t += 997)
    CHECK(c.values[t] ==
          doctest::Approx(edc_exact(lambda, 48000, t)).epsilon(1e-9));
  // And the continuous form exp(-2 lambda t) early in the decay.
  for (size_t t = 0; t < 16000; t += 1600)
    CHECK(c.values[t] ==
          doctest::Approx(std::exp(-2.0 * lambda * t / 16000.0))
              .epsilon(1e-6));
}

TEST_CASE("edc: amplitude scale invariance, monotone, normalized") {
  CounterRng rng(5, 0);
  Waveform h;
  h.samples.resize(4000);
  for (size_t i = 0; i < h.size(); ++i)
    h.samples[i] = rng.gauss_at(i) * std::exp(-3.0 * i / 16000.0);
  EnergyDecayCurve a = edc(h);
  Waveform h2 = h;
  for (double& v : h2.samples) v *= 2.0;
  EnergyDecayCurve b = edc(h2);
  CHECK(a.values[0] == 1.0);
  for (size_t t = 0; t < a.values.size(); ++t) {
    CHECK(a.values[t] == doctest::Approx(b.values[t]).epsilon(1e-12));
    if (t > 0) CHECK(a.values[t] <= a.values[t - 1] + 1e-15);
  }

  Waveform z;
  z.samples.assign(100, 0.0);
  CHECK_THROWS_AS(edc(z), InputError);
}

TEST_CASE("t60: analytic exponentials within 2%") {
  for (double t60_true : {0.2, 0.5, 1.0, 2.0}) {
    const double lambda = 3.0 * std::log(10.0) / t60_true;
    Waveform h = exp_decay(lambda, static_cast<size_t>(16000 * 3 * t60_true));
    double est = t60(edc(h));
    CHECK(est == doctest::Approx(t60_true).epsilon(0.02));
  }
  // lambda = 13.8155 -> 0.5 s +/- 0.01.
  Waveform h = exp_decay(13.8155, 32000);
  CHECK(std::abs(t60(edc(h)) - 0.5) < 0.01);
}

TEST_CASE("t60: scale invariance and insufficient decay") {
  Waveform h = exp_decay(6.9078, 32000);
  double a = t60(edc(h));
  for (double& v : h.samples) v *= 7.3;
  CHECK(t60(edc(h)) == doctest::Approx(a).epsilon(1e-12));

  // Time-reversed (growing) signal never decays 25 dB.
  Waveform up;
  up.samples.resize(16000);
  for (size_t n = 0; n < up.size(); ++n)
    up.samples[n] = std::exp(6.9078 * static_cast<double>(n) / 16000.0 * 0.5);
  CHECK_THROWS_AS(t60(edc(up)), InputError);
}

TEST_CASE("drr: energy-ratio examples") {
  const int half = 40;  // 2.5 ms at 16 kHz

  SUBCASE("direct 1.0 vs reverberant 0.01 is 20 dB") {
    Waveform h;
    h.samples.assign(4000, 0.0);
    h.samples[100] = 1.0;  // direct window [60, 140]
    // Spread 0.01 of energy after the window.
    size_t tail_start = 100 + half + 1;
    size_t tail_len = 1000;
    double amp = std::sqrt(0.01 / tail_len);
    for (size_t i = 0; i < tail_len; ++i) h.samples[tail_start + i] = amp;
    DrrResult d = drr(h);
    CHECK(d.drr_db == doctest::Approx(20.0).epsilon(1e-9));
    CHECK(!d.clamped);
  }

  SUBCASE("equal energies are 0 dB") {
    Waveform h;
    h.samples.assign(4000, 0.0);
    h.samples[50] = 1.0;
    size_t tail_start = 50 + half + 1;
    for (size_t i = 0; i < 400; ++i)
      h.samples[tail_start + i] = std::sqrt(1.0 / 400.0);
    DrrResult d = drr(h);
    CHECK(d.drr_db == doctest::Approx(0.0).scale(1).epsilon(1e-9));
  }

  SUBCASE("pure impulse clamps to +60 dB with the flag set") {
    Waveform h;
    h.samples.assign(2000, 0.0);
    h.samples[10] = 1.0;
    DrrResult d = drr(h);
    CHECK(d.drr_db == 60.0);
    CHECK(d.clamped);
  }

  SUBCASE("adding tail energy strictly lowers DRR") {
    Waveform h;
    h.samples.assign(4000, 0.0);
    h.samples[100] = 1.0;
    double prev = drr(h).drr_db;
    for (double tail_amp : {0.001, 0.003, 0.01, 0.03}) {
      Waveform g = h;
      for (size_t i = 200; i < 2000; ++i) g.samples[i] = tail_amp;
      double cur = drr(g).drr_db;
      CHECK(cur < prev);
      prev = cur;
    }
  }
}

TEST_CASE("compare: bias, rmse, rho") {
  std::vector<double> truth = {0.3, 0.5, 0.9, 1.4, 2.0};

  SUBCASE("identical sequences") {
    ComparisonStats s = compare(truth, truth);
    CHECK(s.bias == 0.0);
    CHECK(s.rmse == 0.0);
    REQUIRE(s.pearson_rho.has_value());
    CHECK(*s.pearson_rho == doctest::Approx(1.0).epsilon(1e-12));
  }

  SUBCASE("constant offset") {
    std::vector<double> est;
    for (double v : truth) est.push_back(v + 1.0);
    ComparisonStats s = compare(est, truth);
    CHECK(s.bias == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(s.rmse == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(*s.pearson_rho == doctest::Approx(1.0).epsilon(1e-12));
  }

  SUBCASE("anti-correlation with zero-mean truths") {
    std::vector<double> zt = {-1.0, -0.5, 0.0, 0.5, 1.0};
    std::vector<double> est;
    for (double v : zt) est.push_back(-v);
    ComparisonStats s = compare(est, zt);
    CHECK(*s.pearson_rho == doctest::Approx(-1.0).epsilon(1e-12));
  }

  SUBCASE("translation consistency") {
    std::vector<double> est = {0.4, 0.6, 0.7, 1.2, 2.2};
    ComparisonStats base = compare(est, truth);
    std::vector<double> shifted;
    for (double v : est) shifted.push_back(v + 0.25);
    ComparisonStats s = compare(shifted, truth);
    CHECK(s.bias == doctest::Approx(base.bias + 0.25).epsilon(1e-12));
    CHECK(*s.pearson_rho == doctest::Approx(*base.pearson_rho).epsilon(1e-12));
    CHECK(std::abs(s.bias) <= s.rmse + 1e-15);
  }

  SUBCASE("constant truths leave rho undefined") {
    std::vector<double> ct = {1.0, 1.0, 1.0, 1.0, 1.0};
    std::vector<double> est = {0.9, 1.1, 1.0, 1.2, 0.8};
    ComparisonStats s = compare(est, ct);
    CHECK(!s.pearson_rho.has_value());
  }
}
