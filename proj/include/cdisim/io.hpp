#pragma once

// Artifact writers: round-trip CSV, 16-bit graymaps, atomic file replacement
// and SHA-256 content hashes.

#include <openssl/evp.h>

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "cdisim/errors.hpp"

namespace cdisim {

/// Shortest decimal representation that parses back to the same double.
inline std::string format_double(double v) {
  std::array<char, 32> buf{};
  const auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  if (ec != std::errc{}) throw Error("format_double: conversion failed");
  return std::string(buf.data(), end);
}

/// CSV text with a header row; every column must have the same length.
inline std::string csv_text(const std::vector<std::string>& header, const std::vector<std::vector<double>>& columns) {
  if (header.size() != columns.size()) throw ConstructionError("csv: header and column counts differ");
  const std::size_t rows = columns.empty() ? 0 : columns.front().size();
  for (const auto& c : columns)
    if (c.size() != rows) throw ConstructionError("csv: columns have different lengths");
  std::string out;
  for (std::size_t j = 0; j < header.size(); ++j) {
    if (j) out += ',';
    out += header[j];
  }
  out += '\n';
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < columns.size(); ++j) {
      if (j) out += ',';
      out += format_double(columns[j][i]);
    }
    out += '\n';
  }
  return out;
}

/// Binary 16-bit PGM (P5, maxval 65535, big-endian samples). `values` is
/// row-major height × width; values are scaled linearly so the maximum maps
/// to 65535 and negatives clamp to 0.
inline std::string pgm16_bytes(const std::vector<double>& values, std::size_t width, std::size_t height) {
  if (values.size() != width * height) throw ConstructionError("pgm: size mismatch");
  double top = 0.0;
  for (const double v : values)
    if (std::isfinite(v)) top = std::max(top, v);
  std::ostringstream header;
  header << "P5\n" << width << ' ' << height << "\n65535\n";
  std::string out = header.str();
  out.reserve(out.size() + 2 * values.size());
  for (const double v : values) {
    const double scaled = top > 0.0 && std::isfinite(v) ? std::clamp(v / top, 0.0, 1.0) * 65535.0 : 0.0;
    const auto q = static_cast<std::uint16_t>(std::lround(scaled));
    out += static_cast<char>(q >> 8);
    out += static_cast<char>(q & 0xff);
  }
  return out;
}

struct Pgm16 {
  std::size_t width = 0, height = 0;
  std::vector<std::uint16_t> samples;
};

inline Pgm16 parse_pgm16(std::string_view bytes) {
  std::istringstream in{std::string(bytes)};
  std::string magic;
  Pgm16 img;
  unsigned maxval = 0;
  in >> magic >> img.width >> img.height >> maxval;
  if (magic != "P5" || maxval != 65535 || !in) throw Error("pgm: not a 16-bit P5 image");
  in.get();
  img.samples.resize(img.width * img.height);
  for (auto& s : img.samples) {
    const int hi = in.get(), lo = in.get();
    if (lo == std::char_traits<char>::eof()) throw Error("pgm: truncated pixel data");
    s = static_cast<std::uint16_t>((hi << 8) | lo);
  }
  return img;
}

inline std::string sha256_hex(std::string_view data) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest.data(), &len, EVP_sha256(), nullptr) != 1)
    throw Error("sha256: digest failed");
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  for (unsigned i = 0; i < len; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 0xf];
  }
  return out;
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Writes to `<path>.tmp` and renames over `path`, so readers never see a
/// partially written file.
inline void write_file_atomic(const std::filesystem::path& path, std::string_view data) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + tmp.string());
    out.write(data.data(), static_cast<std::streamsize>(data.size()));
    out.flush();
    if (!out) {
      std::error_code ec;
      std::filesystem::remove(tmp, ec);
      throw Error("write failed for " + tmp.string());
    }
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace cdisim
