// Copyright 2026 The EchoMark Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef ECHOMARK_FFT_HPP
#define ECHOMARK_FFT_HPP

#include <complex>
#include <cstddef>
#include <vector>

namespace echomark::fft {

// Forward real FFT of length n; returns n/2 + 1 one-sided bins.
void rfft(const double* in, size_t n, std::complex<double>* out);
std::vector<std::complex<double>> rfft(const std::vector<double>& in);

// Inverse of rfft, including the 1/n normalization.
void irfft(const std::complex<double>* in, size_t n, double* out);
std::vector<double> irfft(const std::vector<std::complex<double>>& in,
                          size_t n);

// Smallest power of two >= n (convolution sizing).
size_t next_pow2(size_t n);

}  // namespace echomark::fft

#endif  // ECHOMARK_FFT_HPP
