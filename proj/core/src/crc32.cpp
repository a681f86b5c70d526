// Copyright 2026 Losscape Contributors
// SPDX-License-Identifier: Apache-2.0

#include "losscape/crc32.hpp"

#include <array>
#include <cstdio>
#include <fstream>
#include <vector>

#include "losscape/errors.hpp"

namespace losscape {

namespace {

std::array<std::uint32_t, 256> make_table() {
  std::array<std::uint32_t, 256> table{};
  for (std::uint32_t i = 0; i < 256; ++i) {
    std::uint32_t c = i;
    for (int k = 0; k < 8; ++k) {
      c = (c & 1u) ? (0xedb88320u ^ (c >> 1)) : (c >> 1);
    }
    table[i] = c;
  }
  return table;
}

const std::array<std::uint32_t, 256>& table() {
  static const std::array<std::uint32_t, 256> t = make_table();
  return t;
}

}  // namespace

void Crc32::update(const void* data, std::size_t size) {
  const auto* p = static_cast<const unsigned char*>(data);
  std::uint32_t c = state_;
  for (std::size_t i = 0; i < size; ++i) {
    c = table()[(c ^ p[i]) & 0xffu] ^ (c >> 8);
  }
  state_ = c;
}

std::uint32_t crc32(const void* data, std::size_t size) {
  Crc32 c;
  c.update(data, size);
  return c.value();
}

std::string crc32_file_hex(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(Errc::missing_input, "cannot open file for hashing: " + path);
  }
  Crc32 c;
  std::vector<char> buf(1 << 16);
  while (in) {
    in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
    c.update(buf.data(), static_cast<std::size_t>(in.gcount()));
  }
  char hex[9];
  std::snprintf(hex, sizeof(hex), "%08x", c.value());
  return std::string(hex);
}

}  // namespace losscape
