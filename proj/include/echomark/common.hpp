// Copyright 2026 The EchoMark Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef ECHOMARK_COMMON_HPP
#define ECHOMARK_COMMON_HPP

#include <stdexcept>
#include <string>

namespace echomark {

inline constexpr const char* kToolVersion = "echomark 0.1.0";

// Canonical sample rate. All DSP operates at 16 kHz; mismatched inputs are
// rejected rather than resampled.
inline constexpr int kCanonicalRateHz = 16000;

// The early part of an RIR covers [0, 50 ms): 800 samples at 16 kHz.
inline constexpr int kEarlyLenSamples = 800;

// Bad argument values, mismatched rates/lengths, empty inputs. CLI exit 2.
class InputError : public std::runtime_error {
 public:
  explicit InputError(const std::string& msg) : std::runtime_error(msg) {}
};

// Malformed or unsupported file contents. CLI exit 3.
class FormatError : public std::runtime_error {
 public:
  explicit FormatError(const std::string& msg) : std::runtime_error(msg) {}
};

// Invalid analysis/synthesis configuration (e.g. non-invertible STFT).
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Optimization aborted (non-finite loss). CLI exit 4.
class ConvergenceError : public std::runtime_error {
 public:
  explicit ConvergenceError(const std::string& msg)
      : std::runtime_error(msg) {}
};

}  // namespace echomark

#endif  // ECHOMARK_COMMON_HPP
