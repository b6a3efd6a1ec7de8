// Copyright 2026 The EchoMark Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef ECHOMARK_WATERMARK_HPP
#define ECHOMARK_WATERMARK_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "echomark/rir_model.hpp"
#include "echomark/waveform.hpp"

namespace echomark {

// M information bits (1 <= M <= 5) plus the embedding key.
struct WatermarkMessage {
  std::vector<uint8_t> bits;
  uint64_t key = 0;

  void validate() const;
};

// Keyed +/-1 spreading codes over the late-tail support. codes[0] is the
// presence code, codes[1..M] carry the message bits. Codes are built from a
// keyed sign stream modulated by distinct Walsh rows, so same-key codes are
// orthogonal by construction (inner products vanish on every 8-sample
// block) and different keys decorrelate statistically.
struct PnCodebook {
  std::vector<std::vector<double>> codes;
  uint64_t key = 0;
};

struct DetectionResult {
  bool present = false;
  double presence_score = 0.0;
  std::vector<double> bit_scores;
  std::vector<uint8_t> message;  // meaningful only when present
};

struct EmbedOptions {
  // Watermark level relative to the fitted RMS envelope of the late field.
  double gain_db = -20.0;
  // Presence decision value on the normalized correlation score; NaN picks
  // the build-time calibrated default for this gain/M.
  double threshold = std::numeric_limits<double>::quiet_NaN();
  // Nominal code support used when decoding (embedding always spans the
  // late field of the RIR being marked).
  double code_len_s = 2.0;
  // Regularizer forwarded to informed deconvolution in audio-domain decode.
  double deconv_reg = 1e-3;
};

struct SequentialDecodeResult {
  std::vector<uint8_t> bits;
  std::vector<DetectionResult> chunks;
};

// Calibrated default presence threshold for a given embedding level.
double default_presence_threshold(double gain_db, int num_bits);

PnCodebook derive_codebook(uint64_t key, int num_bits, size_t len);

// The additive carrier for a given late field: gain * envelope * code sum.
// Used by render() when a payload is attached.
std::vector<double> watermark_carrier(const std::vector<double>& late,
                                      const WatermarkPayload& payload);

// Per-sample exponential envelope fitted to the RMS of a late tail.
std::vector<double> fit_exp_envelope(const std::vector<double>& tail);

// Attaches the message to the RIR's late field. Rejects an already
// watermarked RIR and an RIR with no late energy to hide in.
ParametricRir embed(const ParametricRir& r, const WatermarkMessage& msg,
                    const EmbedOptions& opts = {});

// Correlation detector on a rendered (or recovered) RIR.
DetectionResult decode_from_rir(const Waveform& h, uint64_t key, int num_bits,
                                const EmbedOptions& opts = {});

// Informed audio-domain detection: deconvolve the clean source out of the
// reverberant signal, then decode the recovered RIR.
DetectionResult decode_from_audio(const Waveform& y, const Waveform& x,
                                  uint64_t key, int num_bits,
                                  const EmbedOptions& opts = {});

// Chunked transfer: successive chunk_s-second chunks of x are convolved
// with per-chunk watermarked renders of the base RIR (num_bits bits per
// chunk) and overlap-added.
Waveform sequential_embed(const Waveform& x, const ParametricRir& base,
                          const std::vector<uint8_t>& message, double chunk_s,
                          uint64_t key, const EmbedOptions& opts = {});

// Non-overlapping windows decoded independently; assumes perfect
// synchronization between y and x.
SequentialDecodeResult sequential_decode(const Waveform& y, const Waveform& x,
                                         double chunk_s, uint64_t key,
                                         int num_bits,
                                         const EmbedOptions& opts = {});

// 16-hex-digit key and "10110"-style bit string parsing for the CLI/JSON.
uint64_t parse_key(const std::string& hex);
std::string format_key(uint64_t key);
std::vector<uint8_t> parse_bits(const std::string& bits);
std::string format_bits(const std::vector<uint8_t>& bits);

}  // namespace echomark

#endif  // ECHOMARK_WATERMARK_HPP
