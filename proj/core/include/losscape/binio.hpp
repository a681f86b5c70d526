// Copyright 2026 Losscape Contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <cstring>
#include <string>
#include <vector>

namespace losscape::binio {

void put_u32(std::vector<unsigned char>& out, std::uint32_t v);
void put_u64(std::vector<unsigned char>& out, std::uint64_t v);
void put_f64(std::vector<unsigned char>& out, double d);

/// Little-endian cursor over an in-memory file image. Out-of-range reads
/// raise format errors naming the offending offset.
class Reader {
 public:
  Reader(const unsigned char* data, std::size_t size, std::string path)
      : data_(data), size_(size), path_(std::move(path)) {}

  std::size_t offset() const { return pos_; }
  std::size_t size() const { return size_; }

  void need(std::size_t n, const char* what) const;
  std::uint32_t u32(const char* what);
  std::uint64_t u64(const char* what);
  double f64(const char* what);
  void raw(void* dst, std::size_t n, const char* what);

 private:
  const unsigned char* data_;
  std::size_t size_;
  std::string path_;
  std::size_t pos_ = 0;
};

std::vector<unsigned char> read_file(const std::string& path);
void write_file(const std::string& path, const std::vector<unsigned char>& bytes);

}  // namespace losscape::binio
