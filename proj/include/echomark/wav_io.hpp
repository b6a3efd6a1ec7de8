// Copyright 2026 The EchoMark Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef ECHOMARK_WAV_IO_HPP
#define ECHOMARK_WAV_IO_HPP

#include <string>

#include "echomark/waveform.hpp"

namespace echomark {

enum class WavEncoding { kPcm16, kFloat32 };

// Mono RIFF/WAVE only, 16-bit PCM or 32-bit IEEE float. Anything else is a
// FormatError; no partial result is returned.
Waveform read_wav(const std::string& path);

void write_wav(const std::string& path, const Waveform& w,
               WavEncoding enc = WavEncoding::kFloat32);

}  // namespace echomark

#endif  // ECHOMARK_WAV_IO_HPP
