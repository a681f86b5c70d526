// Copyright 2026 Losscape Contributors
// SPDX-License-Identifier: Apache-2.0

#include "losscape/binio.hpp"

#include <fstream>

#include "losscape/errors.hpp"

namespace losscape::binio {

void put_u32(std::vector<unsigned char>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<unsigned char>((v >> (8 * i)) & 0xffu));
}

void put_u64(std::vector<unsigned char>& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<unsigned char>((v >> (8 * i)) & 0xffu));
}

void put_f64(std::vector<unsigned char>& out, double d) {
  std::uint64_t bits;
  std::memcpy(&bits, &d, 8);
  put_u64(out, bits);
}

void Reader::need(std::size_t n, const char* what) const {
  if (pos_ + n > size_) {
    throw Error(Errc::format, path_ + ": truncated while reading " + what + ": expected " +
                                  std::to_string(pos_ + n) + " bytes, file has " +
                                  std::to_string(size_));
  }
}

std::uint32_t Reader::u32(const char* what) {
  need(4, what);
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(data_[pos_ + i]) << (8 * i);
  pos_ += 4;
  return v;
}

std::uint64_t Reader::u64(const char* what) {
  need(8, what);
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(data_[pos_ + i]) << (8 * i);
  pos_ += 8;
  return v;
}

double Reader::f64(const char* what) {
  std::uint64_t bits = u64(what);
  double d;
  std::memcpy(&d, &bits, 8);
  return d;
}

void Reader::raw(void* dst, std::size_t n, const char* what) {
  need(n, what);
  std::memcpy(dst, data_ + pos_, n);
  pos_ += n;
}

std::vector<unsigned char> read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary | std::ios::ate);
  if (!in) throw Error(Errc::missing_input, "cannot open file: " + path);
  std::streamsize size = in.tellg();
  in.seekg(0);
  std::vector<unsigned char> buf(static_cast<std::size_t>(size));
  if (size > 0) in.read(reinterpret_cast<char*>(buf.data()), size);
  if (!in) throw Error(Errc::format, path + ": short read");
  return buf;
}

void write_file(const std::string& path, const std::vector<unsigned char>& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Errc::missing_input, "cannot create file: " + path);
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(Errc::format, path + ": short write");
}

}  // namespace losscape::binio
