// Copyright 2026 The EchoMark Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "echomark/fft.hpp"

#include <fftw3.h>

#include <cstring>
#include <memory>
#include <mutex>
#include <unordered_map>

namespace echomark::fft {

namespace {

// fftw plan creation/destruction must be serialized; execution is
// thread-safe on distinct buffers, so each thread keeps its own plans.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

struct RfftPlan {
  size_t n = 0;
  double* real = nullptr;
  fftw_complex* cplx = nullptr;
  fftw_plan fwd = nullptr;
  fftw_plan bwd = nullptr;

  explicit RfftPlan(size_t size) : n(size) {
    std::lock_guard<std::mutex> lock(planner_mutex());
    real = fftw_alloc_real(n);
    cplx = fftw_alloc_complex(n / 2 + 1);
    fwd = fftw_plan_dft_r2c_1d(static_cast<int>(n), real, cplx, FFTW_ESTIMATE);
    bwd = fftw_plan_dft_c2r_1d(static_cast<int>(n), cplx, real, FFTW_ESTIMATE);
  }
  ~RfftPlan() {
    std::lock_guard<std::mutex> lock(planner_mutex());
    if (fwd) fftw_destroy_plan(fwd);
    if (bwd) fftw_destroy_plan(bwd);
    if (real) fftw_free(real);
    if (cplx) fftw_free(cplx);
  }
  RfftPlan(const RfftPlan&) = delete;
  RfftPlan& operator=(const RfftPlan&) = delete;
};

RfftPlan& plan_for(size_t n) {
  thread_local std::unordered_map<size_t, std::unique_ptr<RfftPlan>> cache;
  auto it = cache.find(n);
  if (it == cache.end())
    it = cache.emplace(n, std::make_unique<RfftPlan>(n)).first;
  return *it->second;
}

}  // namespace

void rfft(const double* in, size_t n, std::complex<double>* out) {
  RfftPlan& p = plan_for(n);
  std::memcpy(p.real, in, n * sizeof(double));
  fftw_execute(p.fwd);
  std::memcpy(out, p.cplx, (n / 2 + 1) * sizeof(fftw_complex));
}

std::vector<std::complex<double>> rfft(const std::vector<double>& in) {
  std::vector<std::complex<double>> out(in.size() / 2 + 1);
  rfft(in.data(), in.size(), out.data());
  return out;
}

void irfft(const std::complex<double>* in, size_t n, double* out) {
  RfftPlan& p = plan_for(n);
  std::memcpy(p.cplx, in, (n / 2 + 1) * sizeof(fftw_complex));
  fftw_execute(p.bwd);
  const double scale = 1.0 / static_cast<double>(n);
  for (size_t i = 0; i < n; ++i) out[i] = p.real[i] * scale;
}

std::vector<double> irfft(const std::vector<std::complex<double>>& in,
                          size_t n) {
  std::vector<double> out(n);
  irfft(in.data(), n, out.data());
  return out;
}

size_t next_pow2(size_t n) {
  size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

}  // namespace echomark::fft
