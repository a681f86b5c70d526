// Copyright 2026 Losscape Contributors
// SPDX-License-Identifier: Apache-2.0
//
// End-to-end tests of the command-line tool: artifact layout, exit codes,
// determinism across reruns and worker counts.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <string>

#include <json.hpp>

#include "losscape/binio.hpp"
#include "losscape/rng.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

#ifndef LOSSCAPE_CLI_PATH
#error "LOSSCAPE_CLI_PATH must point at the built binary"
#endif

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("losscape_cli_" + std::to_string(::getpid()) + "_" +
            std::to_string(reinterpret_cast<std::uintptr_t>(this)));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string sub(const std::string& name) const { return (path / name).string(); }
};

int run_cli(const std::string& args) {
  const std::string cmd = std::string(LOSSCAPE_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

json load_json(const std::string& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  json j;
  in >> j;
  return j;
}

json payload_without_meta(json j) {
  j.erase("meta");
  return j;
}

std::string train_args(std::uint64_t seed = 11, double lr = 0.02) {
  return "train --model lenet-mini --hw 8 --channels 3,6 --classes 5 --activation tanh "
         "--data synth --dim 64 --samples 200 --batch-size 25 --epochs 1 --lr " +
         std::to_string(lr) + " --seed " + std::to_string(seed) + " ";
}

}  // namespace

TEST_CASE("training twice with one seed produces byte-identical checkpoints") {
  TempDir tmp;
  REQUIRE(run_cli(train_args() + "--out " + tmp.sub("a")) == 0);
  REQUIRE(run_cli(train_args() + "--out " + tmp.sub("b")) == 0);

  int compared = 0;
  for (const auto& entry : fs::directory_iterator(tmp.sub("a"))) {
    if (entry.path().extension() != ".gvck") continue;
    auto a = losscape::binio::read_file(entry.path().string());
    auto b = losscape::binio::read_file((fs::path(tmp.sub("b")) / entry.path().filename()).string());
    CHECK(a == b);
    ++compared;
  }
  CHECK(compared == 9);  // 8 iterations + initial point
}

TEST_CASE("zero learning rate yields a constant trajectory") {
  TempDir tmp;
  REQUIRE(run_cli(train_args(11, 0.0) + "--out " + tmp.sub("t")) == 0);
  auto first = losscape::binio::read_file(tmp.sub("t") + "/iter_000000.gvck");
  auto last = losscape::binio::read_file(tmp.sub("t") + "/iter_000008.gvck");
  CHECK(first == last);
}

TEST_CASE("landscape artifact has the documented shape and exit codes work") {
  TempDir tmp;
  REQUIRE(run_cli(train_args() + "--out " + tmp.sub("t")) == 0);

  SUBCASE("a 2x2 grid emits a 4-entry z array") {
    REQUIRE(run_cli("landscape --traj " + tmp.sub("t") + " --dirs random --grid 2 --seed 1 --out " +
                    tmp.sub("l")) == 0);
    json j = load_json(tmp.sub("l") + "/landscape.json");
    CHECK(j.at("N") == 2);
    CHECK(j.at("z").size() == 4);
    CHECK(j.at("path").size() == 9);
    CHECK(j.at("meta").at("command") == "landscape");
    CHECK(fs::exists(tmp.sub("l") + "/landscape.csv"));
  }

  SUBCASE("missing trajectory exits 2") {
    CHECK(run_cli("landscape --traj " + tmp.sub("nope") + " --out " + tmp.sub("x")) == 2);
  }

  SUBCASE("rank-deficient pca exits 3") {
    REQUIRE(run_cli(train_args(11, 0.0) + "--out " + tmp.sub("flat")) == 0);
    CHECK(run_cli("landscape --traj " + tmp.sub("flat") + " --dirs pca --grid 2 --out " +
                  tmp.sub("y")) == 3);
  }

  SUBCASE("degenerate user directions exit 4") {
    // The same file for both directions is exactly parallel.
    const std::string ckpt = tmp.sub("t") + "/iter_000000.gvck";
    CHECK(run_cli("landscape --traj " + tmp.sub("t") + " --dirs user --dir1 " + ckpt +
                  " --dir2 " + ckpt + " --grid 2 --out " + tmp.sub("z")) == 4);
  }
}

TEST_CASE("computed directions are exported and reusable as user directions") {
  TempDir tmp;
  REQUIRE(run_cli(train_args() + "--out " + tmp.sub("t")) == 0);
  REQUIRE(run_cli("landscape --traj " + tmp.sub("t") +
                  " --dirs pca --grid 4 --fraction 0.5 --seed 3 --out " + tmp.sub("orig")) == 0);
  REQUIRE(fs::exists(tmp.sub("orig") + "/dir1.gvck"));
  REQUIRE(fs::exists(tmp.sub("orig") + "/dir2.gvck"));

  // Re-running through the exported pair reproduces the same surface (the
  // export is already normalized, so normalization is skipped).
  REQUIRE(run_cli("landscape --traj " + tmp.sub("t") + " --dirs user --dir1 " +
                  tmp.sub("orig") + "/dir1.gvck --dir2 " + tmp.sub("orig") +
                  "/dir2.gvck --no-normalize --grid 4 --fraction 0.5 --seed 3 --out " +
                  tmp.sub("reuse")) == 0);
  json a = load_json(tmp.sub("orig") + "/landscape.json");
  json b = load_json(tmp.sub("reuse") + "/landscape.json");
  CHECK(a.at("z").dump() == b.at("z").dump());
  CHECK(a.at("path").dump() == b.at("path").dump());
}

TEST_CASE("rerunning landscape reproduces the payload exactly") {
  TempDir tmp;
  REQUIRE(run_cli(train_args() + "--out " + tmp.sub("t")) == 0);
  const std::string args = "landscape --traj " + tmp.sub("t") +
                           " --dirs pca --grid 5 --fraction 0.5 --seed 3 --out ";
  REQUIRE(run_cli(args + tmp.sub("l1")) == 0);
  REQUIRE(run_cli(args + tmp.sub("l2")) == 0);
  json a = load_json(tmp.sub("l1") + "/landscape.json");
  json b = load_json(tmp.sub("l2") + "/landscape.json");
  CHECK(payload_without_meta(a).dump() == payload_without_meta(b).dump());
  // Configuration and input hashes agree too; only timing may differ.
  a["meta"].erase("timing");
  a["meta"].erase("timing_breakdown");
  b["meta"].erase("timing");
  b["meta"].erase("timing_breakdown");
  CHECK(a.dump() == b.dump());
}

TEST_CASE("spectrum json is worker-count invariant and matches a known operator") {
  TempDir tmp;

  SUBCASE("model spectrum across workers") {
    REQUIRE(run_cli(train_args() + "--out " + tmp.sub("t")) == 0);
    const std::string base = "spectrum --traj " + tmp.sub("t") +
                             " --k 4 --m 20 --fraction 0.5 --seed 5 --out ";
    REQUIRE(run_cli(base + tmp.sub("w1") + " --workers 1") == 0);
    REQUIRE(run_cli(base + tmp.sub("w4") + " --workers 4") == 0);
    json a = load_json(tmp.sub("w1") + "/spectrum.json");
    json b = load_json(tmp.sub("w4") + "/spectrum.json");
    // Identical except metadata (worker count and timing).
    CHECK(payload_without_meta(a).dump() == payload_without_meta(b).dump());
  }

  SUBCASE("explicit diagonal operator approximates its exact smoothed density") {
    json op;
    std::vector<double> diag(500);
    losscape::SplitMix64 rng(4242);
    for (std::size_t i = 0; i < 490; ++i) diag[i] = 0.3 * rng.gaussian();
    for (std::size_t i = 0; i < 10; ++i) diag[490 + i] = 5.0 + 4.0 * static_cast<double>(i);
    op["diag"] = diag;
    std::ofstream(tmp.sub("op.json")) << op.dump();

    REQUIRE(run_cli("spectrum --operator-file " + tmp.sub("op.json") +
                    " --k 10 --m 80 --seed 2 --out " + tmp.sub("s")) == 0);
    json j = load_json(tmp.sub("s") + "/spectrum.json");
    const double sigma = j.at("sigma").get<double>();
    auto grid = j.at("grid").get<std::vector<double>>();
    auto density = j.at("density").get<std::vector<double>>();

    double l1 = 0.0;
    for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
      auto exact = [&](double t) {
        double acc = 0.0;
        for (double lam : diag) {
          const double d = (t - lam) / sigma;
          acc += std::exp(-0.5 * d * d) / (sigma * std::sqrt(2.0 * 3.14159265358979323846));
        }
        return acc / static_cast<double>(diag.size());
      };
      const double e0 = std::fabs(density[i] - exact(grid[i]));
      const double e1 = std::fabs(density[i + 1] - exact(grid[i + 1]));
      l1 += 0.5 * (e0 + e1) * (grid[i + 1] - grid[i]);
    }
    CHECK(l1 <= 0.05);
  }
}

TEST_CASE("interpolation endpoints and layout mismatches behave as documented") {
  TempDir tmp;
  REQUIRE(run_cli(train_args(21) + "--out " + tmp.sub("a")) == 0);
  REQUIRE(run_cli(train_args(22) + "--out " + tmp.sub("b")) == 0);
  const std::string model_flags =
      " --model lenet-mini --hw 8 --channels 3,6 --classes 5 --activation tanh --data synth "
      "--dim 64 --samples 200";

  SUBCASE("two points evaluate the endpoints only") {
    REQUIRE(run_cli("interpolate " + tmp.sub("a") + "/iter_000008.gvck " + tmp.sub("b") +
                    "/iter_000008.gvck" + model_flags + " --points 2 --seed 1 --out " +
                    tmp.sub("i")) == 0);
    json j = load_json(tmp.sub("i") + "/interpolation.json");
    REQUIRE(j.at("points").size() == 2);
    CHECK(j.at("points")[0].at("lambda") == 0.0);
    CHECK(j.at("points")[1].at("lambda") == 1.0);
  }

  SUBCASE("mismatched checkpoint layouts exit 5") {
    TempDir other;
    REQUIRE(run_cli("train --model mlp --layers 8,4 --data synth --dim 8 --samples 64 "
                    "--batch-size 16 --epochs 1 --seed 2 --out " +
                    other.sub("m")) == 0);
    CHECK(run_cli("interpolate " + tmp.sub("a") + "/iter_000008.gvck " + other.sub("m") +
                  "/iter_000004.gvck" + model_flags + " --points 2 --out " + tmp.sub("j")) == 5);
  }
}

TEST_CASE("every-checkpoint mode emits one spectrum per snapshot") {
  TempDir tmp;
  REQUIRE(run_cli(train_args() + "--save-every 4 --out " + tmp.sub("t")) == 0);
  REQUIRE(run_cli("spectrum --traj " + tmp.sub("t") +
                  " --every-checkpoint --k 2 --m 10 --fraction 0.5 --seed 5 --out " +
                  tmp.sub("s")) == 0);
  // 8 iterations, cadence 4: snapshots at 0, 4, 8.
  for (const char* name : {"spectrum_iter_000000.json", "spectrum_iter_000004.json",
                           "spectrum_iter_000008.json"}) {
    CAPTURE(name);
    REQUIRE(fs::exists(fs::path(tmp.sub("s")) / name));
    json j = load_json((fs::path(tmp.sub("s")) / name).string());
    CHECK(j.at("probes").size() == 2);
    CHECK(j.at("meta").contains("iteration"));
  }
}

TEST_CASE("bench emits speedup rows and a fitted fraction") {
  TempDir tmp;
  REQUIRE(run_cli("bench --task slq-iteration --model mlp --layers 32,16,4 --classes 4 "
                  "--data synth --dim 32 --samples 256 --workers 1,2 --repeats 2 --k 4 --m 8 "
                  "--seed 9 --out " +
                  tmp.sub("bench")) == 0);
  json j = load_json(tmp.sub("bench") + "/scaling.json");
  REQUIRE(j.at("speedup").size() == 2);
  CHECK(j.at("speedup")[0].at("p") == 1);
  CHECK(j.at("speedup")[0].at("S") == 1.0);
  CHECK(j.at("amdahl").at("f").get<double>() >= 0.0);
  CHECK(j.at("amdahl").at("f").get<double>() <= 1.0);
  CHECK(fs::exists(tmp.sub("bench") + "/scaling.csv"));
}
