// Copyright 2026 The EchoMark Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "echomark/wav_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <vector>

namespace echomark {

namespace {

constexpr uint16_t kFormatPcm = 1;
constexpr uint16_t kFormatFloat = 3;

uint32_t rd_u32(const uint8_t* p) {
  return static_cast<uint32_t>(p[0]) | (static_cast<uint32_t>(p[1]) << 8) |
         (static_cast<uint32_t>(p[2]) << 16) |
         (static_cast<uint32_t>(p[3]) << 24);
}
uint16_t rd_u16(const uint8_t* p) {
  return static_cast<uint16_t>(p[0] | (p[1] << 8));
}

void wr_u32(std::vector<uint8_t>& b, uint32_t v) {
  b.push_back(v & 0xff);
  b.push_back((v >> 8) & 0xff);
  b.push_back((v >> 16) & 0xff);
  b.push_back((v >> 24) & 0xff);
}
void wr_u16(std::vector<uint8_t>& b, uint16_t v) {
  b.push_back(v & 0xff);
  b.push_back((v >> 8) & 0xff);
}

}  // namespace

Waveform read_wav(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw FormatError("read_wav: cannot open " + path);
  std::vector<uint8_t> data((std::istreambuf_iterator<char>(f)),
                            std::istreambuf_iterator<char>());

  if (data.size() < 12 || std::memcmp(data.data(), "RIFF", 4) != 0 ||
      std::memcmp(data.data() + 8, "WAVE", 4) != 0)
    throw FormatError("read_wav: not a RIFF/WAVE file: " + path);

  uint16_t format = 0, channels = 0, bits = 0;
  uint32_t rate = 0;
  bool have_fmt = false;
  const uint8_t* pcm = nullptr;
  size_t pcm_len = 0;

  size_t pos = 12;
  while (pos + 8 <= data.size()) {
    const uint8_t* hdr = data.data() + pos;
    uint32_t chunk_len = rd_u32(hdr + 4);
    pos += 8;
    if (pos + chunk_len > data.size())
      throw FormatError("read_wav: truncated chunk in " + path);
    if (std::memcmp(hdr, "fmt ", 4) == 0) {
      if (chunk_len < 16) throw FormatError("read_wav: short fmt chunk");
      format = rd_u16(data.data() + pos);
      channels = rd_u16(data.data() + pos + 2);
      rate = rd_u32(data.data() + pos + 4);
      bits = rd_u16(data.data() + pos + 14);
      have_fmt = true;
    } else if (std::memcmp(hdr, "data", 4) == 0) {
      pcm = data.data() + pos;
      pcm_len = chunk_len;
    }
    pos += chunk_len + (chunk_len & 1);  // chunks are word-aligned
  }

  if (!have_fmt || !pcm) throw FormatError("read_wav: missing fmt/data chunk");
  if (channels != 1)
    throw FormatError("read_wav: only mono supported (got " +
                      std::to_string(channels) + " channels)");

  Waveform out;
  out.sample_rate_hz = static_cast<int>(rate);
  if (format == kFormatPcm && bits == 16) {
    size_t n = pcm_len / 2;
    if (n == 0) throw FormatError("read_wav: empty data chunk");
    out.samples.resize(n);
    for (size_t i = 0; i < n; ++i) {
      int16_t v = static_cast<int16_t>(rd_u16(pcm + 2 * i));
      out.samples[i] = static_cast<double>(v) / 32767.0;
    }
  } else if (format == kFormatFloat && bits == 32) {
    size_t n = pcm_len / 4;
    if (n == 0) throw FormatError("read_wav: empty data chunk");
    out.samples.resize(n);
    for (size_t i = 0; i < n; ++i) {
      uint32_t u = rd_u32(pcm + 4 * i);
      float v;
      std::memcpy(&v, &u, 4);
      out.samples[i] = static_cast<double>(v);
    }
  } else {
    throw FormatError("read_wav: unsupported encoding (format " +
                      std::to_string(format) + ", " + std::to_string(bits) +
                      " bits)");
  }
  return out;
}

void write_wav(const std::string& path, const Waveform& w, WavEncoding enc) {
  w.validate("write_wav");
  const bool is_float = enc == WavEncoding::kFloat32;
  const uint16_t bytes_per = is_float ? 4 : 2;
  const uint32_t data_len = static_cast<uint32_t>(w.size() * bytes_per);

  std::vector<uint8_t> b;
  b.reserve(44 + data_len);
  b.insert(b.end(), {'R', 'I', 'F', 'F'});
  wr_u32(b, 36 + data_len);
  b.insert(b.end(), {'W', 'A', 'V', 'E', 'f', 'm', 't', ' '});
  wr_u32(b, 16);
  wr_u16(b, is_float ? kFormatFloat : kFormatPcm);
  wr_u16(b, 1);  // mono
  wr_u32(b, static_cast<uint32_t>(w.sample_rate_hz));
  wr_u32(b, static_cast<uint32_t>(w.sample_rate_hz) * bytes_per);
  wr_u16(b, bytes_per);
  wr_u16(b, is_float ? 32 : 16);
  b.insert(b.end(), {'d', 'a', 't', 'a'});
  wr_u32(b, data_len);

  for (double s : w.samples) {
    if (is_float) {
      float v = static_cast<float>(s);
      uint32_t u;
      std::memcpy(&u, &v, 4);
      wr_u32(b, u);
    } else {
      double c = std::clamp(s, -1.0, 1.0);
      int16_t v = static_cast<int16_t>(std::lround(c * 32767.0));
      wr_u16(b, static_cast<uint16_t>(v));
    }
  }

  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw FormatError("write_wav: cannot open " + path);
  f.write(reinterpret_cast<const char*>(b.data()),
          static_cast<std::streamsize>(b.size()));
  if (!f) throw FormatError("write_wav: write failed for " + path);
}

}  // namespace echomark
