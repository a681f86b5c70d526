// Copyright 2026 Losscape Contributors
// SPDX-License-Identifier: Apache-2.0

#include "losscape/data_io.hpp"

#include <cstring>

#include "losscape/binio.hpp"
#include "losscape/crc32.hpp"
#include "losscape/errors.hpp"

namespace losscape {

namespace {
constexpr std::uint32_t kDatasetVersion = 1;
}

void save_dataset(const std::string& path, const Dataset& ds) {
  using namespace binio;
  std::vector<unsigned char> out;
  out.reserve(32 + ds.features().size() * 8 + ds.labels().size() * 4);
  for (char c : {'G', 'V', 'D', 'S'}) out.push_back(static_cast<unsigned char>(c));
  put_u32(out, kDatasetVersion);
  put_u64(out, static_cast<std::uint64_t>(ds.size()));
  put_u32(out, static_cast<std::uint32_t>(ds.sample_shape().size()));
  for (std::int64_t d : ds.sample_shape()) put_u32(out, static_cast<std::uint32_t>(d));
  put_u32(out, static_cast<std::uint32_t>(ds.num_classes()));
  for (int y : ds.labels()) put_u32(out, static_cast<std::uint32_t>(y));
  for (double v : ds.features()) put_f64(out, v);
  put_u32(out, crc32(out.data(), out.size()));
  write_file(path, out);
}

Dataset load_dataset(const std::string& path) {
  std::vector<unsigned char> bytes = binio::read_file(path);
  binio::Reader r(bytes.data(), bytes.size(), path);

  char magic[4];
  r.raw(magic, 4, "magic");
  if (std::memcmp(magic, "GVDS", 4) != 0) {
    throw Error(Errc::format, path + ": bad magic at byte offset 0");
  }
  std::uint32_t version = r.u32("version");
  if (version != kDatasetVersion) {
    throw Error(Errc::format, path + ": unsupported version " + std::to_string(version) +
                                  " at byte offset 4");
  }
  std::uint64_t count = r.u64("sample count");
  std::uint32_t ndims = r.u32("dim count");
  if (ndims == 0 || ndims > 8) {
    throw Error(Errc::format,
                path + ": implausible dim count at byte offset " + std::to_string(r.offset() - 4));
  }
  std::vector<std::int64_t> dims(ndims);
  std::int64_t sample_dim = 1;
  for (std::uint32_t i = 0; i < ndims; ++i) {
    dims[i] = static_cast<std::int64_t>(r.u32("dims"));
    sample_dim *= dims[i];
  }
  std::uint32_t num_classes = r.u32("class count");

  std::vector<int> labels(count);
  for (std::uint64_t i = 0; i < count; ++i) labels[i] = static_cast<int>(r.u32("labels"));
  std::vector<double> features(count * static_cast<std::uint64_t>(sample_dim));
  for (double& v : features) v = r.f64("features");

  std::uint32_t stored_crc = r.u32("crc32");
  std::uint32_t actual_crc = crc32(bytes.data(), bytes.size() - 4);
  if (stored_crc != actual_crc) {
    throw Error(Errc::format, path + ": checksum mismatch");
  }
  return Dataset(std::move(features), std::move(dims), std::move(labels),
                 static_cast<int>(num_classes));
}

}  // namespace losscape
