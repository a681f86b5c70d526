// Copyright 2026 Losscape Contributors
// SPDX-License-Identifier: Apache-2.0

#include "losscape/checkpoint.hpp"

#include <cstring>
#include <fstream>

#include <json.hpp>

#include "losscape/binio.hpp"
#include "losscape/crc32.hpp"
#include "losscape/errors.hpp"

namespace losscape {

namespace {
constexpr std::uint32_t kCheckpointVersion = 1;
}

void save_checkpoint(const std::string& path, const FlatParams& params) {
  if (!params.layout) throw Error(Errc::layout, "save_checkpoint: params have no layout");
  using namespace binio;
  std::vector<unsigned char> out;
  out.reserve(24 + params.values.size() * 8);
  for (char c : {'G', 'V', 'C', 'K'}) out.push_back(static_cast<unsigned char>(c));
  put_u32(out, kCheckpointVersion);
  put_u64(out, static_cast<std::uint64_t>(params.values.size()));
  for (double v : params.values) put_f64(out, v);
  put_u32(out, crc32(out.data(), out.size()));
  write_file(path, out);

  nlohmann::json groups = nlohmann::json::array();
  for (const ParamGroup& g : params.layout->groups()) {
    groups.push_back({{"name", g.name},
                      {"offset", g.offset},
                      {"count", g.count},
                      {"kind", to_string(g.kind)},
                      {"filter_shape", g.filter_shape}});
  }
  nlohmann::json sidecar = {{"groups", groups}};
  std::ofstream js(path + ".json", std::ios::trunc);
  if (!js) throw Error(Errc::missing_input, "cannot create sidecar: " + path + ".json");
  js << sidecar.dump(2) << "\n";
}

FlatParams load_checkpoint(const std::string& path) {
  std::vector<unsigned char> bytes = binio::read_file(path);
  binio::Reader r(bytes.data(), bytes.size(), path);

  char magic[4];
  r.raw(magic, 4, "magic");
  if (std::memcmp(magic, "GVCK", 4) != 0) {
    throw Error(Errc::format, path + ": bad magic at byte offset 0");
  }
  std::uint32_t version = r.u32("version");
  if (version != kCheckpointVersion) {
    throw Error(Errc::format, path + ": unsupported version " + std::to_string(version) +
                                  " at byte offset 4");
  }
  std::uint64_t count = r.u64("param count");
  std::vector<double> values(count);
  for (double& v : values) v = r.f64("values");
  std::uint32_t stored_crc = r.u32("crc32");
  if (stored_crc != crc32(bytes.data(), bytes.size() - 4)) {
    throw Error(Errc::format, path + ": checksum mismatch");
  }

  std::ifstream js(path + ".json");
  if (!js) throw Error(Errc::missing_input, "missing layout sidecar: " + path + ".json");
  nlohmann::json sidecar;
  try {
    js >> sidecar;
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::format, path + ".json: " + e.what());
  }

  std::vector<ParamGroup> groups;
  for (const auto& jg : sidecar.at("groups")) {
    ParamGroup g;
    g.name = jg.at("name").get<std::string>();
    g.offset = jg.at("offset").get<std::size_t>();
    g.count = jg.at("count").get<std::size_t>();
    g.kind = group_kind_from_string(jg.at("kind").get<std::string>());
    g.filter_shape = jg.at("filter_shape").get<std::vector<std::int64_t>>();
    groups.push_back(std::move(g));
  }
  auto layout = std::make_shared<const ParamLayout>(std::move(groups));
  if (layout->total_count() != values.size()) {
    throw Error(Errc::format, path + ": sidecar layout covers " +
                                  std::to_string(layout->total_count()) + " values, file has " +
                                  std::to_string(values.size()));
  }
  return FlatParams(std::move(values), std::move(layout));
}

}  // namespace losscape
